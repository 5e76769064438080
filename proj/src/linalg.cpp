#include "conncalc/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace conncalc {

Matrix Matrix::identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
    Matrix r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t k = 0; k < cols_; ++k) {
            const Scalar& v = at(i, k);
            if (v.is_zero()) continue;
            for (size_t j = 0; j < o.cols_; ++j) r.at(i, j) += v * o.at(k, j);
        }
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

Matrix Matrix::adjoint() const {
    Matrix r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(j, i) = conj(at(i, j));
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

Matrix Matrix::scaled(const Scalar& s) const {
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
    return r;
}

Real Matrix::max_abs() const {
    Real m(0);
    for (const auto& v : a_) {
        Real x = abs(v);
        if (x > m) m = x;
    }
    return m;
}

Real Matrix::unitarity_residual() const {
    if (rows_ != cols_) return Real("1e1000");
    Matrix r1 = (*this) * adjoint() - identity(rows_);
    Matrix r2 = adjoint() * (*this) - identity(rows_);
    Real a = r1.max_abs(), b = r2.max_abs();
    return a > b ? a : b;
}

EigenResult hermitian_eigen(const Matrix& a, const Real& tol) {
    size_t n = a.rows();
    Matrix m = a;
    Matrix v = Matrix::identity(n);
    Real thresh = tol * tol;
    // off-diagonal scale
    Real scale(0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Real x = abs(m.at(i, j));
            if (x > scale) scale = x;
        }
    if (scale.is_zero()) scale = Real(1);
    Real stop = scale * thresh;

    for (int sweep = 0; sweep < 60; ++sweep) {
        Real off(0);
        for (size_t p = 0; p + 1 < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                Real apq = abs(m.at(p, q));
                if (apq > off) off = apq;
            }
        if (off < stop) break;
        for (size_t p = 0; p + 1 < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                Scalar mpq = m.at(p, q);
                Real apq = abs(mpq);
                if (apq < stop / n) continue;
                // 2x2 Hermitian rotation: diagonalize [[app, mpq],[conj(mpq), aqq]]
                Real app = m.at(p, p).re, aqq = m.at(q, q).re;
                Scalar phase = mpq * Scalar(Real(1) / apq);  // e^{i arg}
                Real theta = (aqq - app) / (2 * apq);
                Real t;  // tan of rotation angle
                {
                    Real at = boost::multiprecision::abs(theta);
                    Real sgn = theta >= 0 ? Real(1) : Real(-1);
                    t = sgn / (at + sqrt(theta * theta + 1));
                }
                Real c = 1 / sqrt(t * t + 1);
                Real s = t * c;
                Scalar cs = Scalar(c);
                Scalar sn = phase * Scalar(s);  // complex sine
                // columns p,q of m and v: apply from right by G, from left by G^H
                for (size_t i = 0; i < n; ++i) {
                    Scalar mip = m.at(i, p), miq = m.at(i, q);
                    m.at(i, p) = mip * cs - miq * conj(sn);
                    m.at(i, q) = mip * sn + miq * cs;
                    Scalar vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = vip * cs - viq * conj(sn);
                    v.at(i, q) = vip * sn + viq * cs;
                }
                for (size_t j = 0; j < n; ++j) {
                    Scalar mpj = m.at(p, j), mqj = m.at(q, j);
                    m.at(p, j) = mpj * cs - mqj * sn;
                    m.at(q, j) = mpj * conj(sn) + mqj * cs;
                }
                m.at(p, q) = Scalar(0);
                m.at(q, p) = Scalar(0);
            }
        }
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return m.at(i, i).re < m.at(j, j).re; });
    EigenResult r;
    r.values.reserve(n);
    r.vectors = Matrix(n, n);
    for (size_t j = 0; j < n; ++j) {
        r.values.push_back(m.at(order[j], order[j]).re);
        for (size_t i = 0; i < n; ++i) r.vectors.at(i, j) = v.at(i, order[j]);
    }
    return r;
}

Matrix polar_unitary(const Matrix& x, const Real& tol) {
    EigenResult e = hermitian_eigen(x.adjoint() * x, tol);
    size_t n = x.rows();
    Matrix d(n, n);
    for (size_t i = 0; i < n; ++i) {
        if (e.values[i] <= 0) throw PrecisionError("polar factor of a singular matrix");
        d.at(i, i) = Scalar(1 / sqrt(e.values[i]));
    }
    return x * (e.vectors * d * e.vectors.adjoint());
}

void GramAccumulator::add_row(const std::vector<std::pair<size_t, Scalar>>& row) {
    for (const auto& [i, vi] : row) {
        Scalar ci = conj(vi);
        for (const auto& [j, vj] : row) {
            if (j < i) continue;  // keep upper triangle, mirror at the end of take()
            k_.at(i, j) += ci * vj;
        }
    }
}

NullspaceResult psd_nullspace(Matrix k, const Real& cut, const Real& gap_required) {
    size_t n = k.rows();
    // mirror upper triangle (GramAccumulator fills the upper half only)
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < i; ++j) k.at(i, j) = conj(k.at(j, i));

    // diagonally pivoted LDL^H (pivoted Cholesky without the square roots)
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Real> d(n, Real(0));
    Matrix l = Matrix::identity(n);
    size_t rank = n;
    Real kept_min("1e1000"), dropped_max(0);

    size_t done = 0;  // columns of l already built
    auto swap_rows_cols = [&](size_t a, size_t b) {
        if (a == b) return;
        std::swap(perm[a], perm[b]);
        for (size_t j = 0; j < n; ++j) std::swap(k.at(a, j), k.at(b, j));
        for (size_t i = 0; i < n; ++i) std::swap(k.at(i, a), k.at(i, b));
        for (size_t j = 0; j < done; ++j) std::swap(l.at(a, j), l.at(b, j));
    };

    for (size_t step = 0; step < n; ++step) {
        done = step;
        size_t piv = step;
        Real best = k.at(step, step).re;
        for (size_t i = step + 1; i < n; ++i)
            if (k.at(i, i).re > best) { best = k.at(i, i).re; piv = i; }
        swap_rows_cols(step, piv);
        Real dv = k.at(step, step).re;
        if (dv <= cut) { rank = step; break; }
        d[step] = dv;
        if (dv < kept_min) kept_min = dv;
        Scalar inv = Scalar(1 / dv);
        for (size_t i = step + 1; i < n; ++i) {
            Scalar lik = k.at(i, step) * inv;
            l.at(i, step) = lik;
            if (lik.is_zero()) continue;
            for (size_t j = step + 1; j <= i; ++j)
                k.at(i, j) -= lik * conj(k.at(j, step));
            for (size_t j = i + 1; j < n; ++j)
                k.at(i, j) -= lik * conj(k.at(j, step));
        }
    }
    for (size_t i = rank; i < n; ++i) {
        Real dv = k.at(i, i).re;
        if (dv > dropped_max) dropped_max = dv;
    }
    if (rank < n && rank > 0) {
        if (dropped_max > 0 && kept_min / dropped_max < gap_required)
            throw PrecisionError("ambiguous rank decision: pivot gap below threshold");
    }

    NullspaceResult res;
    res.rank = rank;
    res.kept_min = rank ? kept_min : Real(0);
    res.dropped_max = dropped_max;
    // kernel: solve L^H x = e_j (unit upper triangular back-substitution) for
    // each trailing pivot j, then undo the permutation
    for (size_t j = rank; j < n; ++j) {
        std::vector<Scalar> x(n);
        x[j] = Scalar(1);
        for (size_t i = j; i-- > 0;) {
            Scalar s;
            for (size_t m2 = i + 1; m2 <= j; ++m2) {
                if (!l.at(m2, i).is_zero()) s += conj(l.at(m2, i)) * x[m2];
            }
            x[i] = -s;
        }
        std::vector<Scalar> v(n);
        for (size_t i = 0; i < n; ++i) v[perm[i]] = x[i];
        res.basis.push_back(std::move(v));
    }
    // modified Gram-Schmidt on the kernel vectors
    for (size_t a = 0; a < res.basis.size(); ++a) {
        auto& va = res.basis[a];
        for (size_t b = 0; b < a; ++b) {
            const auto& vb = res.basis[b];
            Scalar ip;
            for (size_t i = 0; i < n; ++i) ip += conj(vb[i]) * va[i];
            for (size_t i = 0; i < n; ++i) va[i] -= ip * vb[i];
        }
        Real nrm(0);
        for (size_t i = 0; i < n; ++i) nrm += abs2(va[i]);
        nrm = sqrt(nrm);
        Scalar inv = Scalar(1 / nrm);
        for (size_t i = 0; i < n; ++i) va[i] *= inv;
    }
    return res;
}

}  // namespace conncalc
