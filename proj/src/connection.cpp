#include "conncalc/connection.hpp"

#include <algorithm>

namespace conncalc {

size_t WeightedSquare::left_total() const {
    size_t n = 0;
    for (int v : left) n += static_cast<size_t>(v);
    return n;
}

size_t WeightedSquare::right_total() const {
    size_t n = 0;
    for (int v : right) n += static_cast<size_t>(v);
    return n;
}

bool WeightedSquare::same_horizontals(const WeightedSquare& o, const Real& tol) const {
    if (v0 != o.v0 || v1 != o.v1 || v2 != o.v2 || v3 != o.v3) return false;
    if (upper != o.upper || lower != o.lower) return false;
    auto close = [&](const std::vector<Real>& a, const std::vector<Real>& b) {
        for (size_t i = 0; i < a.size(); ++i)
            if (boost::multiprecision::abs(a[i] - b[i]) > tol) return false;
        return true;
    };
    return close(mu0, o.mu0) && close(mu1, o.mu1) && close(mu2, o.mu2) && close(mu3, o.mu3);
}

bool WeightedSquare::same_verticals(const WeightedSquare& o) const {
    return left == o.left && right == o.right;
}

Real WeightedSquare::horizontal_residual(const Real&) const {
    Real worst(0);
    auto upd = [&](const Real& d) { if (d > worst) worst = d; };
    // upper graph: ||G|| mu0 = G mu1 and transpose, with ||G|| from the pair
    // of eigen-equations; we only check consistency of a single norm value.
    // The norm is recovered from the basepoint row.
    // For simplicity check G mu1 = n mu0 with n inferred at base_upper.
    Real n(0);
    {
        Real s(0);
        for (size_t b = 0; b < v1.size(); ++b)
            if (int m = um(base_upper, b)) s += m * mu1[b];
        n = s / mu0[base_upper];
    }
    for (size_t a = 0; a < v0.size(); ++a) {
        Real s(0);
        for (size_t b = 0; b < v1.size(); ++b)
            if (int m = um(a, b)) s += m * mu1[b];
        upd(boost::multiprecision::abs(s - n * mu0[a]));
    }
    for (size_t b = 0; b < v1.size(); ++b) {
        Real s(0);
        for (size_t a = 0; a < v0.size(); ++a)
            if (int m = um(a, b)) s += m * mu0[a];
        upd(boost::multiprecision::abs(s - n * mu1[b]));
    }
    for (size_t a = 0; a < v3.size(); ++a) {
        Real s(0);
        for (size_t b = 0; b < v2.size(); ++b)
            if (int m = lm(a, b)) s += m * mu2[b];
        upd(boost::multiprecision::abs(s - n * mu3[a]));
    }
    for (size_t b = 0; b < v2.size(); ++b) {
        Real s(0);
        for (size_t a = 0; a < v3.size(); ++a)
            if (int m = lm(a, b)) s += m * mu3[a];
        upd(boost::multiprecision::abs(s - n * mu2[b]));
    }
    return worst;
}

std::pair<Real, Real> WeightedSquare::vertical_eigenvalue() const {
    Real d(0);
    bool have = false;
    Real worst(0);
    for (size_t a = 0; a < v0.size(); ++a) {
        Real s(0);
        for (size_t b = 0; b < v3.size(); ++b)
            if (int m = Lm(a, b)) s += m * mu3[b];
        Real val = s / mu0[a];
        if (!have) { d = val; have = true; }
        Real diff = boost::multiprecision::abs(val - d);
        if (diff > worst) worst = diff;
    }
    for (size_t a = 0; a < v1.size(); ++a) {
        Real s(0);
        for (size_t b = 0; b < v2.size(); ++b)
            if (int m = Rm(a, b)) s += m * mu2[b];
        Real val = s / mu1[a];
        if (!have) { d = val; have = true; }
        Real diff = boost::multiprecision::abs(val - d);
        if (diff > worst) worst = diff;
    }
    return {d, worst};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<size_t> build_offsets(const std::vector<int>& m, size_t rows, size_t cols) {
    std::vector<size_t> off(rows * cols + 1, 0);
    for (size_t i = 0; i < rows * cols; ++i) off[i + 1] = off[i] + static_cast<size_t>(m[i]);
    return off;
}

}  // namespace

void Connection::finalize() {
    const auto& s = *sq_;
    upper_off_ = build_offsets(s.upper, s.v0.size(), s.v1.size());
    lower_off_ = build_offsets(s.lower, s.v3.size(), s.v2.size());
    left_off_ = build_offsets(s.left, s.v0.size(), s.v3.size());
    right_off_ = build_offsets(s.right, s.v1.size(), s.v2.size());
}

const std::vector<size_t>& Connection::offs(Side s) const {
    switch (s) {
        case Side::Upper: return upper_off_;
        case Side::Lower: return lower_off_;
        case Side::Left: return left_off_;
        default: return right_off_;
    }
}

std::pair<size_t, size_t> Connection::dims(Side s) const {
    const auto& q = *sq_;
    switch (s) {
        case Side::Upper: return {q.v0.size(), q.v1.size()};
        case Side::Lower: return {q.v3.size(), q.v2.size()};
        case Side::Left: return {q.v0.size(), q.v3.size()};
        default: return {q.v1.size(), q.v2.size()};
    }
}

size_t Connection::edge_id(Side s, size_t from, size_t to, int copy) const {
    auto [r, c] = dims(s);
    (void)r;
    return offs(s)[from * c + to] + static_cast<size_t>(copy - 1);
}

CellKey Connection::key(size_t top, size_t left, size_t bottom, size_t right) const {
    return (static_cast<CellKey>(top) << 48) | (static_cast<CellKey>(left) << 32) |
           (static_cast<CellKey>(bottom) << 16) | static_cast<CellKey>(right);
}

void Connection::unpack(CellKey k, size_t& t, size_t& l, size_t& b, size_t& r) {
    t = (k >> 48) & 0xffff;
    l = (k >> 32) & 0xffff;
    b = (k >> 16) & 0xffff;
    r = k & 0xffff;
}

Connection::EdgeInfo Connection::edge(Side s, size_t id) const {
    const auto& off = offs(s);
    auto [rows, cols] = dims(s);
    size_t cell = static_cast<size_t>(
        std::upper_bound(off.begin(), off.end(), id) - off.begin() - 1);
    return {cell / cols, cell % cols, static_cast<int>(id - off[cell] + 1)};
}

Scalar Connection::value(CellKey k) const {
    auto it = table_.find(k);
    return it == table_.end() ? Scalar() : it->second;
}

// ---------------------------------------------------------------------------

BiunitarityReport check_biunitary(const Connection& c, const FieldContext& ctx) {
    const auto& q = c.square();
    BiunitarityReport rep;
    rep.unitarity_residual = Real(0);
    rep.renormalization_residual = Real(0);
    bool structural_ok = true;

    // horizontal blocks (p in V0, s in V2)
    for (size_t p = 0; p < q.v0.size(); ++p) {
        for (size_t s = 0; s < q.v2.size(); ++s) {
            std::vector<std::pair<size_t, size_t>> rows, cols;  // (left id, bottom id) / (top id, right id)
            for (size_t y = 0; y < q.v3.size(); ++y)
                for (int kl = 1; kl <= q.Lm(p, y); ++kl)
                    for (int kb = 1; kb <= q.lm(y, s); ++kb)
                        rows.emplace_back(c.edge_id(Side::Left, p, y, kl),
                                          c.edge_id(Side::Lower, y, s, kb));
            for (size_t z = 0; z < q.v1.size(); ++z)
                for (int kt = 1; kt <= q.um(p, z); ++kt)
                    for (int kr = 1; kr <= q.Rm(z, s); ++kr)
                        cols.emplace_back(c.edge_id(Side::Upper, p, z, kt),
                                          c.edge_id(Side::Right, z, s, kr));
            if (rows.empty() && cols.empty()) continue;
            if (rows.size() != cols.size()) {
                rep.notes.push_back("horizontal block (" + q.v0[p] + "," + q.v2[s] +
                                    ") is " + std::to_string(rows.size()) + "x" +
                                    std::to_string(cols.size()));
                structural_ok = false;
                continue;
            }
            Matrix m(rows.size(), cols.size());
            for (size_t i = 0; i < rows.size(); ++i)
                for (size_t j = 0; j < cols.size(); ++j)
                    m.at(i, j) = c.value(c.key(cols[j].first, rows[i].first,
                                               rows[i].second, cols[j].second));
            Real r = m.unitarity_residual();
            if (r > rep.unitarity_residual) rep.unitarity_residual = r;
        }
    }

    // vertical blocks (y in V3, z in V1): renormalized table must be unitary
    for (size_t y = 0; y < q.v3.size(); ++y) {
        for (size_t z = 0; z < q.v1.size(); ++z) {
            std::vector<std::pair<size_t, size_t>> rows, cols;  // (left id, top id) / (bottom id, right id)
            for (size_t x = 0; x < q.v0.size(); ++x)
                for (int kl = 1; kl <= q.Lm(x, y); ++kl)
                    for (int kt = 1; kt <= q.um(x, z); ++kt)
                        rows.emplace_back(c.edge_id(Side::Left, x, y, kl),
                                          c.edge_id(Side::Upper, x, z, kt));
            for (size_t w = 0; w < q.v2.size(); ++w)
                for (int kb = 1; kb <= q.lm(y, w); ++kb)
                    for (int kr = 1; kr <= q.Rm(z, w); ++kr)
                        cols.emplace_back(c.edge_id(Side::Lower, y, w, kb),
                                          c.edge_id(Side::Right, z, w, kr));
            if (rows.empty() && cols.empty()) continue;
            if (rows.size() != cols.size()) {
                rep.notes.push_back("vertical block (" + q.v3[y] + "," + q.v1[z] +
                                    ") is " + std::to_string(rows.size()) + "x" +
                                    std::to_string(cols.size()));
                structural_ok = false;
                continue;
            }
            Matrix m(rows.size(), cols.size());
            for (size_t i = 0; i < rows.size(); ++i) {
                auto le = c.edge(Side::Left, rows[i].first);
                for (size_t j = 0; j < cols.size(); ++j) {
                    auto re = c.edge(Side::Right, cols[j].second);
                    Scalar v = c.value(c.key(rows[i].second, rows[i].first,
                                             cols[j].first, cols[j].second));
                    Real f = sqrt(q.mu0[le.from] * q.mu2[re.to] / (q.mu3[y] * q.mu1[z]));
                    m.at(i, j) = conj(v) * Scalar(f);
                }
            }
            Real r = m.unitarity_residual();
            if (r > rep.renormalization_residual) rep.renormalization_residual = r;
        }
    }
    rep.pass = structural_ok && rep.unitarity_residual < ctx.tol() &&
               rep.renormalization_residual < ctx.tol();
    return rep;
}

// ---------------------------------------------------------------------------

Connection sum(const Connection& a, const Connection& b) {
    const auto& qa = a.square();
    const auto& qb = b.square();
    if (qa.v0 != qb.v0 || qa.v1 != qb.v1 || qa.v2 != qb.v2 || qa.v3 != qb.v3 ||
        qa.upper != qb.upper || qa.lower != qb.lower)
        throw StructuralError("sum: horizontal data mismatch");
    auto sq = std::make_shared<WeightedSquare>(qa);
    for (size_t i = 0; i < sq->left.size(); ++i) sq->left[i] += qb.left[i];
    for (size_t i = 0; i < sq->right.size(); ++i) sq->right[i] += qb.right[i];
    Connection r{SquarePtr(sq)};
    r.finalize();
    // a-cells keep copies; b-cells shift by a's multiplicities
    for (const auto& [k, v] : a.table()) {
        size_t t, l, bb, rr;
        Connection::unpack(k, t, l, bb, rr);
        auto le = a.edge(Side::Left, l);
        auto re = a.edge(Side::Right, rr);
        r.set(r.key(t, r.edge_id(Side::Left, le.from, le.to, le.copy), bb,
                    r.edge_id(Side::Right, re.from, re.to, re.copy)),
              v);
    }
    for (const auto& [k, v] : b.table()) {
        size_t t, l, bb, rr;
        Connection::unpack(k, t, l, bb, rr);
        auto le = b.edge(Side::Left, l);
        auto re = b.edge(Side::Right, rr);
        r.set(r.key(t,
                    r.edge_id(Side::Left, le.from, le.to,
                              le.copy + qa.Lm(le.from, le.to)),
                    bb,
                    r.edge_id(Side::Right, re.from, re.to,
                              re.copy + qa.Rm(re.from, re.to))),
              v);
    }
    return r;
}

Connection product(const Connection& a, const Connection& b) {
    const auto& qa = a.square();
    const auto& qb = b.square();
    if (qa.v3 != qb.v0 || qa.v2 != qb.v1 || qa.lower != qb.upper)
        throw StructuralError("product: interface graphs do not match");
    for (size_t i = 0; i < qa.mu3.size(); ++i)
        if (qa.mu3[i] != qb.mu0[i] && boost::multiprecision::abs(qa.mu3[i] - qb.mu0[i]) >
                                          Real("1e-10") * qa.mu3[i])
            throw StructuralError("product: interface weights do not match");

    auto sq = std::make_shared<WeightedSquare>();
    sq->v0 = qa.v0; sq->v1 = qa.v1; sq->v2 = qb.v2; sq->v3 = qb.v3;
    sq->mu0 = qa.mu0; sq->mu1 = qa.mu1; sq->mu2 = qb.mu2; sq->mu3 = qb.mu3;
    sq->upper = qa.upper;
    sq->lower = qb.lower;
    sq->base_upper = qa.base_upper;
    sq->base_lower = qb.base_lower;
    size_t n0 = sq->v0.size(), n1 = sq->v1.size(), n2 = sq->v2.size(), n3 = sq->v3.size();
    size_t mid3 = qa.v3.size(), mid2 = qa.v2.size();
    sq->left.assign(n0 * n3, 0);
    sq->right.assign(n1 * n2, 0);
    for (size_t x = 0; x < n0; ++x)
        for (size_t q2 = 0; q2 < n3; ++q2) {
            int m = 0;
            for (size_t y = 0; y < mid3; ++y) m += qa.Lm(x, y) * qb.Lm(y, q2);
            sq->Lm(x, q2) = m;
        }
    for (size_t z = 0; z < n1; ++z)
        for (size_t u = 0; u < n2; ++u) {
            int m = 0;
            for (size_t w = 0; w < mid2; ++w) m += qa.Rm(z, w) * qb.Rm(w, u);
            sq->Rm(z, u) = m;
        }
    Connection r{SquarePtr(sq)};
    r.finalize();

    // composite copies enumerated lexicographically by (mid vertex, copyA, copyB)
    for (size_t x = 0; x < n0; ++x)
        for (size_t q2 = 0; q2 < n3; ++q2) {
            if (!sq->Lm(x, q2)) continue;
            for (size_t z = 0; z < n1; ++z) {
                if (!sq->um(x, z)) continue;
                for (size_t u = 0; u < n2; ++u) {
                    if (!sq->Rm(z, u) || !sq->lm(q2, u)) continue;
                    // enumerate left composite copies
                    int lcopy = 0;
                    for (size_t y = 0; y < mid3; ++y)
                        for (int ka = 1; ka <= qa.Lm(x, y); ++ka)
                            for (int kb = 1; kb <= qb.Lm(y, q2); ++kb) {
                                ++lcopy;
                                int rcopy = 0;
                                for (size_t w = 0; w < mid2; ++w)
                                    for (int ra = 1; ra <= qa.Rm(z, w); ++ra)
                                        for (int rb = 1; rb <= qb.Rm(w, u); ++rb) {
                                            ++rcopy;
                                            for (int kt = 1; kt <= sq->um(x, z); ++kt)
                                                for (int kbt = 1; kbt <= sq->lm(q2, u); ++kbt) {
                                                    Scalar acc;
                                                    for (int km = 1; km <= qa.lm(y, w); ++km) {
                                                        Scalar va = a.value(a.key(
                                                            a.edge_id(Side::Upper, x, z, kt),
                                                            a.edge_id(Side::Left, x, y, ka),
                                                            a.edge_id(Side::Lower, y, w, km),
                                                            a.edge_id(Side::Right, z, w, ra)));
                                                        if (va.is_zero()) continue;
                                                        Scalar vb = b.value(b.key(
                                                            b.edge_id(Side::Upper, y, w, km),
                                                            b.edge_id(Side::Left, y, q2, kb),
                                                            b.edge_id(Side::Lower, q2, u, kbt),
                                                            b.edge_id(Side::Right, w, u, rb)));
                                                        if (vb.is_zero()) continue;
                                                        acc += va * vb;
                                                    }
                                                    if (!acc.is_zero())
                                                        r.set(r.key(r.edge_id(Side::Upper, x, z, kt),
                                                                    r.edge_id(Side::Left, x, q2, lcopy),
                                                                    r.edge_id(Side::Lower, q2, u, kbt),
                                                                    r.edge_id(Side::Right, z, u, rcopy)),
                                                              acc);
                                                }
                                        }
                            }
                }
            }
        }
    return r;
}

Connection renormalize(const Connection& c) {
    const auto& q = c.square();
    auto sq = std::make_shared<WeightedSquare>();
    sq->v0 = q.v3; sq->v1 = q.v2; sq->v2 = q.v1; sq->v3 = q.v0;
    sq->mu0 = q.mu3; sq->mu1 = q.mu2; sq->mu2 = q.mu1; sq->mu3 = q.mu0;
    sq->upper = q.lower;
    sq->lower = q.upper;
    sq->base_upper = q.base_lower;
    sq->base_lower = q.base_upper;
    // left' = left^t (V3 x V0), right' = right^t (V2 x V1)
    size_t n0 = q.v0.size(), n1 = q.v1.size(), n2 = q.v2.size(), n3 = q.v3.size();
    sq->left.assign(n3 * n0, 0);
    sq->right.assign(n2 * n1, 0);
    for (size_t x = 0; x < n0; ++x)
        for (size_t y = 0; y < n3; ++y) sq->left[y * n0 + x] = q.Lm(x, y);
    for (size_t z = 0; z < n1; ++z)
        for (size_t w = 0; w < n2; ++w) sq->right[w * n1 + z] = q.Rm(z, w);
    Connection r{SquarePtr(sq)};
    r.finalize();
    for (const auto& [k, v] : c.table()) {
        size_t t, l, bb, rr;
        Connection::unpack(k, t, l, bb, rr);
        auto te = c.edge(Side::Upper, t);
        auto le = c.edge(Side::Left, l);
        auto be = c.edge(Side::Lower, bb);
        auto re = c.edge(Side::Right, rr);
        Real f = sqrt(q.mu0[te.from] * q.mu2[re.to] / (q.mu3[le.to] * q.mu1[te.to]));
        r.set(r.key(r.edge_id(Side::Upper, be.from, be.to, be.copy),
                    r.edge_id(Side::Left, le.to, le.from, le.copy),
                    r.edge_id(Side::Lower, te.from, te.to, te.copy),
                    r.edge_id(Side::Right, re.to, re.from, re.copy)),
              conj(v) * Scalar(f));
    }
    return r;
}

namespace {

SquarePtr square_over_graph(const BipartiteGraph& g, const FieldContext& ctx) {
    auto sq = std::make_shared<WeightedSquare>();
    sq->v0 = g.even();
    sq->v1 = g.odd();
    sq->v2 = g.odd();
    sq->v3 = g.even();
    size_t ne = sq->v0.size(), no = sq->v1.size();
    sq->upper.assign(ne * no, 0);
    sq->lower.assign(ne * no, 0);
    for (size_t e = 0; e < ne; ++e)
        for (size_t o = 0; o < no; ++o) {
            sq->upper[e * no + o] = g.mult(e, o);
            sq->lower[e * no + o] = g.mult(e, o);
        }
    PFData pf = pf_data(g, g.even().front(), ctx);
    sq->mu0 = pf.even_weights;
    sq->mu1 = pf.odd_weights;
    sq->mu2 = pf.odd_weights;
    sq->mu3 = pf.even_weights;
    sq->base_upper = 0;
    sq->base_lower = 0;
    return sq;
}

}  // namespace

Connection trivial_connection(const BipartiteGraph& g, const FieldContext& ctx) {
    auto sq = std::make_shared<WeightedSquare>(*square_over_graph(g, ctx));
    size_t ne = sq->v0.size(), no = sq->v1.size();
    sq->left.assign(ne * ne, 0);
    sq->right.assign(no * no, 0);
    for (size_t e = 0; e < ne; ++e) sq->left[e * ne + e] = 1;
    for (size_t o = 0; o < no; ++o) sq->right[o * no + o] = 1;
    Connection c{SquarePtr(sq)};
    c.finalize();
    for (size_t e = 0; e < ne; ++e)
        for (size_t o = 0; o < no; ++o)
            for (int k = 1; k <= sq->um(e, o); ++k)
                c.set(c.key(c.edge_id(Side::Upper, e, o, k), c.edge_id(Side::Left, e, e, 1),
                            c.edge_id(Side::Lower, e, o, k), c.edge_id(Side::Right, o, o, 1)),
                      Scalar(1));
    return c;
}

Connection automorphism_connection(const BipartiteGraph& g,
                                   const std::map<std::string, std::string>& map,
                                   const FieldContext& ctx) {
    auto base = square_over_graph(g, ctx);
    auto sq = std::make_shared<WeightedSquare>(*base);
    size_t ne = sq->v0.size(), no = sq->v1.size();
    std::vector<size_t> se(ne), so(no);
    for (size_t e = 0; e < ne; ++e) {
        auto it = map.find(sq->v0[e]);
        if (it == map.end()) throw StructuralError("automorphism map misses vertex " + sq->v0[e]);
        se[e] = g.even_index(it->second);
    }
    for (size_t o = 0; o < no; ++o) {
        auto it = map.find(sq->v1[o]);
        if (it == map.end()) throw StructuralError("automorphism map misses vertex " + sq->v1[o]);
        so[o] = g.odd_index(it->second);
    }
    for (size_t e = 0; e < ne; ++e)
        for (size_t o = 0; o < no; ++o)
            if (g.mult(e, o) != g.mult(se[e], so[o]))
                throw StructuralError("vertex map is not a graph automorphism");
    for (size_t e = 0; e < ne; ++e)
        if (boost::multiprecision::abs(sq->mu0[e] - sq->mu0[se[e]]) > ctx.tol())
            throw StructuralError("vertex map does not preserve the weights");
    sq->left.assign(ne * ne, 0);
    sq->right.assign(no * no, 0);
    for (size_t e = 0; e < ne; ++e) sq->left[e * ne + se[e]] = 1;
    for (size_t o = 0; o < no; ++o) sq->right[o * no + so[o]] = 1;
    Connection c{SquarePtr(sq)};
    c.finalize();
    for (size_t e = 0; e < ne; ++e)
        for (size_t o = 0; o < no; ++o)
            for (int k = 1; k <= sq->um(e, o); ++k)
                c.set(c.key(c.edge_id(Side::Upper, e, o, k), c.edge_id(Side::Left, e, se[e], 1),
                            c.edge_id(Side::Lower, se[e], so[o], k),
                            c.edge_id(Side::Right, o, so[o], 1)),
                      Scalar(1));
    return c;
}

Real Gauge::max_block_residual(const Connection&) const {
    Real worst(0);
    for (const auto& [k, m] : left) {
        Real r = m.unitarity_residual();
        if (r > worst) worst = r;
    }
    for (const auto& [k, m] : right) {
        Real r = m.unitarity_residual();
        if (r > worst) worst = r;
    }
    return worst;
}

Connection apply_gauge(const Connection& c, const Gauge& g, const FieldContext& ctx) {
    if (g.max_block_residual(c) > ctx.tol())
        throw ValidationError("apply_gauge: non-unitary gauge block");
    const auto& q = c.square();
    Connection r{c.square_ptr()};
    r.finalize();
    // group cells by (left pair, right pair); transform blocks
    for (size_t x = 0; x < q.v0.size(); ++x)
        for (size_t y = 0; y < q.v3.size(); ++y) {
            int ml = q.Lm(x, y);
            if (!ml) continue;
            auto itL = g.left.find({x, y});
            const Matrix* gl = itL == g.left.end() ? nullptr : &itL->second;
            for (size_t z = 0; z < q.v1.size(); ++z) {
                if (!q.um(x, z)) continue;
                for (size_t w = 0; w < q.v2.size(); ++w) {
                    int mr = q.Rm(z, w);
                    if (!mr || !q.lm(y, w)) continue;
                    auto itR = g.right.find({z, w});
                    const Matrix* gr = itR == g.right.end() ? nullptr : &itR->second;
                    if (!gl && !gr) {
                        for (int kt = 1; kt <= q.um(x, z); ++kt)
                            for (int kb = 1; kb <= q.lm(y, w); ++kb)
                                for (int kl = 1; kl <= ml; ++kl)
                                    for (int kr = 1; kr <= mr; ++kr) {
                                        CellKey kk = c.key(c.edge_id(Side::Upper, x, z, kt),
                                                           c.edge_id(Side::Left, x, y, kl),
                                                           c.edge_id(Side::Lower, y, w, kb),
                                                           c.edge_id(Side::Right, z, w, kr));
                                        Scalar v = c.value(kk);
                                        if (!v.is_zero()) r.set(kk, v);
                                    }
                        continue;
                    }
                    for (int kt = 1; kt <= q.um(x, z); ++kt)
                        for (int kb = 1; kb <= q.lm(y, w); ++kb) {
                            Matrix blk(ml, mr);
                            for (int kl = 1; kl <= ml; ++kl)
                                for (int kr = 1; kr <= mr; ++kr)
                                    blk.at(kl - 1, kr - 1) =
                                        c.value(c.key(c.edge_id(Side::Upper, x, z, kt),
                                                      c.edge_id(Side::Left, x, y, kl),
                                                      c.edge_id(Side::Lower, y, w, kb),
                                                      c.edge_id(Side::Right, z, w, kr)));
                            Matrix out = blk;
                            if (gl) out = gl->adjoint() * out;
                            if (gr) out = out * (*gr);
                            for (int kl = 1; kl <= ml; ++kl)
                                for (int kr = 1; kr <= mr; ++kr)
                                    r.set(r.key(r.edge_id(Side::Upper, x, z, kt),
                                                r.edge_id(Side::Left, x, y, kl),
                                                r.edge_id(Side::Lower, y, w, kb),
                                                r.edge_id(Side::Right, z, w, kr)),
                                          out.at(kl - 1, kr - 1));
                        }
                }
            }
        }
    return r;
}

Real max_entry_diff(const Connection& a, const Connection& b) {
    Real worst(0);
    auto upd = [&](const Real& d) { if (d > worst) worst = d; };
    for (const auto& [k, v] : a.table()) upd(abs(v - b.value(k)));
    for (const auto& [k, v] : b.table()) upd(abs(v - a.value(k)));
    return worst;
}

Real dimension(const Connection& c, const FieldContext& ctx) {
    auto [d, res] = c.square().vertical_eigenvalue();
    if (res > ctx.tol() * (1 + d))
        throw StructuralError("dimension: verticals are not harmonic (residual " +
                              format_real(res, 8) + ")");
    return d;
}

}  // namespace conncalc
