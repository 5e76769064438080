#pragma once

#include "conncalc/scalar.hpp"

#include <vector>

namespace conncalc {

struct PrecisionError : std::runtime_error { using std::runtime_error::runtime_error; };

class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t r, size_t c) : rows_(r), cols_(c), a_(r * c) {}

    static Matrix identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    Scalar& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Scalar& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    Matrix operator*(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix adjoint() const;
    Matrix transpose() const;
    Matrix scaled(const Scalar& s) const;

    Real max_abs() const;                  // entrywise max modulus
    Real unitarity_residual() const;       // max |A A^H - I|, |A^H A - I| (inf if not square)

  private:
    size_t rows_, cols_;
    std::vector<Scalar> a_;
};

// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
// Eigenvalues ascending, eigenvectors as columns of V (A = V diag(w) V^H).
struct EigenResult {
    std::vector<Real> values;
    Matrix vectors;
};
EigenResult hermitian_eigen(const Matrix& a, const Real& tol);

// Unitary polar factor U of X (X = U P, P >= 0), via eigen of X^H X.
// Requires X square and numerically invertible.
Matrix polar_unitary(const Matrix& x, const Real& tol);

// Nullspace of a positive-semidefinite matrix K via diagonally pivoted
// LDL^H.  Rank decisions require a clean spectral gap: the smallest kept
// pivot must exceed the largest dropped one by `gap` (default 1e12,
// i.e. 1e6 on singular values of the underlying system), and dropped
// pivots must lie below cut.  Throws PrecisionError on an ambiguous gap.
struct NullspaceResult {
    size_t rank = 0;
    std::vector<std::vector<Scalar>> basis;  // orthonormal kernel vectors
    Real kept_min, dropped_max;
};
NullspaceResult psd_nullspace(Matrix k, const Real& cut, const Real& gap_required);

// Sparse accumulation helper for K = M^H M built row by row.
class GramAccumulator {
  public:
    explicit GramAccumulator(size_t n) : n_(n), k_(n, n) {}
    // adds the outer product row^H row for a sparse row {(index, value)}
    void add_row(const std::vector<std::pair<size_t, Scalar>>& row);
    Matrix take() { return std::move(k_); }
    size_t size() const { return n_; }

  private:
    size_t n_;
    Matrix k_;
};

}  // namespace conncalc
