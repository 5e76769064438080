#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <map>
#include <stdexcept>
#include <string>

namespace conncalc {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                            boost::multiprecision::et_off>;

enum class CaseId { Sqrt13, Sqrt17 };

std::string case_name(CaseId c);
CaseId case_from_name(const std::string& s);

// Complex number over Real.  Arithmetic only; sqrt is defined for
// non-negative reals (the expression grammar never needs a complex branch).
struct Scalar {
    Real re, im;

    Scalar() : re(0), im(0) {}
    Scalar(int v) : re(v), im(0) {}
    Scalar(const Real& r) : re(r), im(0) {}
    Scalar(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    Scalar operator+(const Scalar& o) const { return {re + o.re, im + o.im}; }
    Scalar operator-(const Scalar& o) const { return {re - o.re, im - o.im}; }
    Scalar operator-() const { return {-re, -im}; }
    Scalar operator*(const Scalar& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Scalar operator/(const Scalar& o) const;
    Scalar& operator+=(const Scalar& o) { re += o.re; im += o.im; return *this; }
    Scalar& operator-=(const Scalar& o) { re -= o.re; im -= o.im; return *this; }
    Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

Scalar conj(const Scalar& z);
Real abs2(const Scalar& z);
Real abs(const Scalar& z);
Real sqrt_nonneg(const Real& r);  // domain error on negative input

struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };
struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

// Case constants plus numeric policy.  Creating a context sets the working
// mpfr precision for the calling thread; one context at a time is assumed.
class FieldContext {
  public:
    static FieldContext make(CaseId c, unsigned digits);
    static FieldContext make(CaseId c, unsigned digits, const Real& tol);

    CaseId case_id() const { return case_; }
    unsigned digits() const { return digits_; }
    const Real& tol() const { return tol_; }

    // generator: lambda for Sqrt13, beta for Sqrt17 (positive root > 2)
    const Scalar& generator() const { return gen_; }
    const Scalar& rho() const { return rho_; }
    const Scalar& tau() const { return tau_; }
    Real gen2() const { return gen_.re * gen_.re; }

    Scalar from_int(long v) const { return Scalar(Real(v)); }
    Real defining_poly_residual() const;

  private:
    FieldContext() = default;
    CaseId case_ = CaseId::Sqrt13;
    unsigned digits_ = 0;
    Real tol_;
    Scalar gen_, rho_, tau_;
};

// Recursive-descent evaluator for the scalar expression grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)?
//   atom   := rational | 'i' | 'lambda' | 'beta' | 'sqrt' '(' expr ')'
//           | '(' expr ')' | '-' atom
// 'lambda' is accepted only in Sqrt13 contexts, 'beta' only in Sqrt17.
Scalar parse_scalar(const std::string& text, const FieldContext& ctx);

// Decimal rendering that re-parses to the same value within ctx.tol().
std::string format_scalar(const Scalar& z, const FieldContext& ctx);
std::string format_real(const Real& r, unsigned digits);
// scientific rendering for reports (not grammar-compatible)
std::string format_real_sci(const Real& r, unsigned digits);

}  // namespace conncalc
