#include "conncalc/scalar.hpp"

#include <cctype>
#include <sstream>

namespace conncalc {

std::string case_name(CaseId c) { return c == CaseId::Sqrt13 ? "sqrt13" : "sqrt17"; }

CaseId case_from_name(const std::string& s) {
    if (s == "sqrt13") return CaseId::Sqrt13;
    if (s == "sqrt17") return CaseId::Sqrt17;
    throw ConfigError("unknown case '" + s + "' (expected sqrt13 or sqrt17)");
}

Scalar Scalar::operator/(const Scalar& o) const {
    Real d = o.re * o.re + o.im * o.im;
    if (d.is_zero()) throw std::domain_error("scalar division by zero");
    return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
}

Scalar conj(const Scalar& z) { return {z.re, -z.im}; }
Real abs2(const Scalar& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Scalar& z) { return sqrt(abs2(z)); }

Real sqrt_nonneg(const Real& r) {
    if (r < 0) throw std::domain_error("sqrt of negative real (write imaginary parts with i)");
    return sqrt(r);
}

FieldContext FieldContext::make(CaseId c, unsigned digits) {
    // default tolerance: 1e-40 at 60 digits, loosening for the fast mode
    long e = std::min<long>(2L * digits / 3, static_cast<long>(digits) - 10);
    Real::default_precision(digits + 10);
    Real tol = pow(Real(10), -e);
    return make(c, digits, tol);
}

FieldContext FieldContext::make(CaseId c, unsigned digits, const Real& tol) {
    if (digits < 16) throw ConfigError("precision below minimum (16 decimal digits)");
    Real::default_precision(digits + 10);
    FieldContext ctx;
    ctx.case_ = c;
    ctx.digits_ = digits;
    ctx.tol_ = tol;
    int disc = (c == CaseId::Sqrt13) ? 13 : 17;
    Real g2 = (Real(5) + sqrt(Real(disc))) / 2;
    Real g = sqrt(g2);
    ctx.gen_ = Scalar(g);
    if (c == CaseId::Sqrt13) {
        ctx.rho_ = Scalar(-sqrt(g2 - 4) / 2, sqrt(Real(8) - g2) / 2);
        ctx.tau_ = Scalar(-sqrt(g2 - 1) / 2, -sqrt(Real(5) - g2) / 2);
    }
    Real res = ctx.defining_poly_residual();
    Real bound = pow(Real(10), -static_cast<long>(digits) + 5);
    if (res > bound) throw ConfigError("generator residual exceeds 10^(-precision+5)");
    return ctx;
}

Real FieldContext::defining_poly_residual() const {
    Real g2 = gen2();
    Real c = (case_ == CaseId::Sqrt13) ? Real(3) : Real(2);
    return boost::multiprecision::abs(g2 * g2 - 5 * g2 + c);
}

namespace {

class Parser {
  public:
    Parser(const std::string& s, const FieldContext& ctx) : s_(s), ctx_(ctx) {}

    Scalar run() {
        Scalar v = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("trailing input", pos_);
        return v;
    }

  private:
    const std::string& s_;
    const FieldContext& ctx_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Scalar expr() {
        Scalar v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    Scalar term() {
        Scalar v = factor();
        for (;;) {
            if (eat('*')) v *= factor();
            else if (eat('/')) v = v / factor();
            else return v;
        }
    }

    Scalar factor() {
        Scalar v = atom();
        if (eat('^')) {
            skip_ws();
            bool neg = eat('-');
            size_t start = pos_;
            long n = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                n = 10 * n + (s_[pos_++] - '0');
            if (pos_ == start) throw ParseError("expected integer exponent", pos_);
            Scalar r(1);
            for (long k = 0; k < n; ++k) r *= v;
            if (neg) r = Scalar(1) / r;
            return r;
        }
        return v;
    }

    Scalar atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '-') { ++pos_; return -atom(); }
        if (c == '(') {
            ++pos_;
            Scalar v = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return rational();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "i") return Scalar(Real(0), Real(1));
            if (name == "lambda") {
                if (ctx_.case_id() != CaseId::Sqrt13)
                    throw ParseError("'lambda' is only legal in sqrt13 data", start);
                return ctx_.generator();
            }
            if (name == "beta") {
                if (ctx_.case_id() != CaseId::Sqrt17)
                    throw ParseError("'beta' is only legal in sqrt17 data", start);
                return ctx_.generator();
            }
            if (name == "sqrt") {
                if (!eat('(')) throw ParseError("expected '(' after sqrt", pos_);
                Scalar v = expr();
                if (!eat(')')) throw ParseError("expected ')'", pos_);
                if (!v.im.is_zero() && boost::multiprecision::abs(v.im) > ctx_.tol())
                    throw std::domain_error("sqrt of a non-real subexpression");
                return Scalar(sqrt_nonneg(v.re));
            }
            throw ParseError("unknown name '" + name + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Scalar rational() {
        size_t start = pos_;
        std::string digits;
        bool dot = false;
        long frac = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                if (dot) ++frac;
                ++pos_;
            } else if (c == '.' && !dot) {
                dot = true;
                ++pos_;
            } else {
                break;
            }
        }
        if (digits.empty()) throw ParseError("expected number", start);
        Real num(digits.c_str());
        if (frac > 0) num /= pow(Real(10), frac);
        return Scalar(num);
    }
};

}  // namespace

Scalar parse_scalar(const std::string& text, const FieldContext& ctx) {
    return Parser(text, ctx).run();
}

std::string format_real_sci(const Real& r, unsigned digits) {
    std::ostringstream os;
    os.precision(digits);
    os << r;
    return os.str();
}

std::string format_real(const Real& r, unsigned digits) {
    std::ostringstream os;
    os.precision(digits);
    os << r;
    std::string s = os.str();
    // mpfr prints exponents as 'e'; the grammar has no exponent form, so expand
    auto epos = s.find_first_of("eE");
    if (epos == std::string::npos) return s;
    std::string mant = s.substr(0, epos);
    long ex = std::stol(s.substr(epos + 1));
    bool neg = !mant.empty() && mant[0] == '-';
    if (neg) mant = mant.substr(1);
    auto dpos = mant.find('.');
    std::string d = (dpos == std::string::npos) ? mant : mant.substr(0, dpos) + mant.substr(dpos + 1);
    long point = (dpos == std::string::npos) ? static_cast<long>(mant.size()) : static_cast<long>(dpos);
    point += ex;
    std::string out;
    if (point <= 0) {
        out = "0." + std::string(-point, '0') + d;
    } else if (point >= static_cast<long>(d.size())) {
        out = d + std::string(point - d.size(), '0');
    } else {
        out = d.substr(0, point) + "." + d.substr(point);
    }
    return (neg ? "-" : "") + out;
}

std::string format_scalar(const Scalar& z, const FieldContext& ctx) {
    unsigned digits = ctx.digits() + 5;
    if (z.im.is_zero()) return format_real(z.re, digits);
    std::string im = format_real(boost::multiprecision::abs(z.im), digits);
    std::string sign = z.im < 0 ? " - " : " + ";
    if (z.re.is_zero()) return (z.im < 0 ? "-i*" : "i*") + im;
    return format_real(z.re, digits) + sign + "i*" + im;
}

}  // namespace conncalc
