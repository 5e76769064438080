#include "conncalc/gauge.hpp"

#include <algorithm>
#include <numeric>

namespace conncalc {

namespace {

using Pair = std::pair<size_t, size_t>;

// index bookkeeping for the intertwiner system
struct Sys {
    std::vector<Pair> spairs, tpairs;
    std::vector<int> sLa, sLb, tRa, tRb;
    std::vector<size_t> toff;  // flat offsets of T blocks
    size_t tdim = 0;
};

Sys index_system(const Connection& a, const Connection& b) {
    Sys s;
    const auto& qa = a.square();
    const auto& qb = b.square();
    for (size_t x = 0; x < qa.v0.size(); ++x)
        for (size_t y = 0; y < qa.v3.size(); ++y) {
            int la = qa.Lm(x, y), lb = qb.Lm(x, y);
            if (la > 0 && lb > 0) {
                s.spairs.push_back({x, y});
                s.sLa.push_back(la);
                s.sLb.push_back(lb);
            }
        }
    for (size_t z = 0; z < qa.v1.size(); ++z)
        for (size_t w = 0; w < qa.v2.size(); ++w) {
            int ra = qa.Rm(z, w), rb = qb.Rm(z, w);
            if (ra > 0 && rb > 0) {
                s.tpairs.push_back({z, w});
                s.tRa.push_back(ra);
                s.tRb.push_back(rb);
                s.toff.push_back(s.tdim);
                s.tdim += static_cast<size_t>(ra) * rb;
            }
        }
    return s;
}

// Q[s][t] with rows (l,m) flattened l*Lb+m and columns (r,rh) flattened
// r*Rb+rh:  Q = sum over cells (top, bottom) of a[..l..r..] conj(b[..m..rh..])
// The Schur complement of the S unknowns (whose normal blocks are exact
// multiples of the identity by unitarity of b) leaves a T-only PSD system.
struct QBlock {
    size_t tindex;
    Matrix q;  // (La*Lb) x (Ra*Rb)
};

std::vector<std::vector<QBlock>> build_q(const Connection& a, const Connection& b,
                                         const Sys& sys) {
    const auto& q = a.square();
    std::vector<std::vector<QBlock>> out(sys.spairs.size());
    for (size_t si = 0; si < sys.spairs.size(); ++si) {
        auto [x, y] = sys.spairs[si];
        int La = sys.sLa[si], Lb = sys.sLb[si];
        for (size_t ti = 0; ti < sys.tpairs.size(); ++ti) {
            auto [z, w] = sys.tpairs[ti];
            if (!q.um(x, z) || !q.lm(y, w)) continue;
            int Ra = sys.tRa[ti], Rb = sys.tRb[ti];
            Matrix m(static_cast<size_t>(La) * Lb, static_cast<size_t>(Ra) * Rb);
            bool nonzero = false;
            for (int kt = 1; kt <= q.um(x, z); ++kt)
                for (int kb = 1; kb <= q.lm(y, w); ++kb) {
                    size_t tid = a.edge_id(Side::Upper, x, z, kt);
                    size_t bid = a.edge_id(Side::Lower, y, w, kb);
                    for (int l = 1; l <= La; ++l)
                        for (int r = 1; r <= Ra; ++r) {
                            Scalar av = a.value(a.key(tid, a.edge_id(Side::Left, x, y, l), bid,
                                                      a.edge_id(Side::Right, z, w, r)));
                            if (av.is_zero()) continue;
                            for (int mm = 1; mm <= Lb; ++mm)
                                for (int rh = 1; rh <= Rb; ++rh) {
                                    Scalar bv = b.value(b.key(tid, b.edge_id(Side::Left, x, y, mm),
                                                              bid, b.edge_id(Side::Right, z, w, rh)));
                                    if (bv.is_zero()) continue;
                                    m.at(static_cast<size_t>(l - 1) * Lb + (mm - 1),
                                         static_cast<size_t>(r - 1) * Rb + (rh - 1)) += av * conj(bv);
                                    nonzero = true;
                                }
                        }
                }
            if (nonzero) out[si].push_back({ti, std::move(m)});
        }
    }
    return out;
}

int lower_degree(const WeightedSquare& q, size_t y) {
    int d = 0;
    for (size_t w = 0; w < q.v2.size(); ++w) d += q.lm(y, w);
    return d;
}

int upper_degree(const WeightedSquare& q, size_t z) {
    int d = 0;
    for (size_t x = 0; x < q.v0.size(); ++x) d += q.um(x, z);
    return d;
}

// worst residual of the defining equations for one solution pair
Real equation_residual(const Connection& a, const Connection& b, const BlockPair& v) {
    const auto& q = a.square();
    const auto& qb = b.square();
    Real worst(0);
    for (size_t x = 0; x < q.v0.size(); ++x)
        for (size_t y = 0; y < q.v3.size(); ++y) {
            int La = q.Lm(x, y), Lb = qb.Lm(x, y);
            if (!La && !Lb) continue;
            const Matrix* xs = nullptr;
            if (auto it = v.left.find({x, y}); it != v.left.end()) xs = &it->second;
            for (size_t z = 0; z < q.v1.size(); ++z) {
                if (!q.um(x, z)) continue;
                for (size_t w = 0; w < q.v2.size(); ++w) {
                    if (!q.lm(y, w)) continue;
                    int Ra = q.Rm(z, w), Rb = qb.Rm(z, w);
                    if (!La || !Rb) continue;
                    const Matrix* xt = nullptr;
                    if (auto it = v.right.find({z, w}); it != v.right.end()) xt = &it->second;
                    for (int kt = 1; kt <= q.um(x, z); ++kt)
                        for (int kb = 1; kb <= q.lm(y, w); ++kb) {
                            size_t tid = a.edge_id(Side::Upper, x, z, kt);
                            size_t bid = a.edge_id(Side::Lower, y, w, kb);
                            for (int l = 1; l <= La; ++l)
                                for (int rh = 1; rh <= Rb; ++rh) {
                                    Scalar acc;
                                    if (xt)
                                        for (int r = 1; r <= Ra; ++r) {
                                            Scalar av = a.value(
                                                a.key(tid, a.edge_id(Side::Left, x, y, l), bid,
                                                      a.edge_id(Side::Right, z, w, r)));
                                            if (!av.is_zero())
                                                acc += av * xt->at(r - 1, rh - 1);
                                        }
                                    if (xs)
                                        for (int mm = 1; mm <= Lb; ++mm) {
                                            Scalar bv = b.value(
                                                b.key(tid, b.edge_id(Side::Left, x, y, mm), bid,
                                                      b.edge_id(Side::Right, z, w, rh)));
                                            if (!bv.is_zero())
                                                acc -= xs->at(l - 1, mm - 1) * bv;
                                        }
                                    Real d = abs(acc);
                                    if (d > worst) worst = d;
                                }
                        }
                }
            }
        }
    return worst;
}

}  // namespace

IntertwinerBasis intertwiner_space(const Connection& a, const Connection& b,
                                   const FieldContext& ctx) {
    IntertwinerBasis out;
    out.residual = Real(0);
    if (!a.square().same_horizontals(b.square(), ctx.tol())) {
        out.notes.push_back("horizontal graphs or weights differ");
        return out;
    }
    Sys sys = index_system(a, b);
    if (sys.tdim == 0) return out;
    auto qb = build_q(a, b, sys);
    const auto& q = a.square();

    // Schur system on the T unknowns
    Matrix st(sys.tdim, sys.tdim);
    for (size_t ti = 0; ti < sys.tpairs.size(); ++ti) {
        Real d(upper_degree(q, sys.tpairs[ti].first));
        size_t n = static_cast<size_t>(sys.tRa[ti]) * sys.tRb[ti];
        for (size_t i = 0; i < n; ++i) st.at(sys.toff[ti] + i, sys.toff[ti] + i) = Scalar(d);
    }
    for (size_t si = 0; si < sys.spairs.size(); ++si) {
        if (qb[si].empty()) continue;
        Real inv_deg = Real(1) / lower_degree(q, sys.spairs[si].second);
        for (const auto& qa1 : qb[si]) {
            Matrix qh = qa1.q.adjoint();
            for (const auto& qa2 : qb[si]) {
                if (qa2.tindex < qa1.tindex) continue;  // fill upper block triangle
                Matrix prod = qh * qa2.q;
                size_t o1 = sys.toff[qa1.tindex], o2 = sys.toff[qa2.tindex];
                bool same = qa1.tindex == qa2.tindex;
                for (size_t i = 0; i < prod.rows(); ++i)
                    for (size_t j = same ? i : 0; j < prod.cols(); ++j)
                        st.at(o1 + i, o2 + j) -= prod.at(i, j) * Scalar(inv_deg);
            }
        }
    }

    Real scale(1);
    for (size_t t = 0; t < sys.tpairs.size(); ++t) {
        Real d(upper_degree(q, sys.tpairs[t].first));
        if (d > scale) scale = d;
    }
    NullspaceResult ns = psd_nullspace(std::move(st), scale * ctx.tol(), Real("1e12"));

    for (const auto& vt : ns.basis) {
        BlockPair bp;
        for (size_t ti = 0; ti < sys.tpairs.size(); ++ti) {
            Matrix m(sys.tRa[ti], sys.tRb[ti]);
            bool nz = false;
            for (int r = 0; r < sys.tRa[ti]; ++r)
                for (int rh = 0; rh < sys.tRb[ti]; ++rh) {
                    m.at(r, rh) = vt[sys.toff[ti] + static_cast<size_t>(r) * sys.tRb[ti] + rh];
                    if (!m.at(r, rh).is_zero()) nz = true;
                }
            if (nz) bp.right[{sys.tpairs[ti].first, sys.tpairs[ti].second}] = std::move(m);
        }
        // back-substitute the S blocks: xS = (1/deg) Q vT
        for (size_t si = 0; si < sys.spairs.size(); ++si) {
            int La = sys.sLa[si], Lb = sys.sLb[si];
            Matrix m(La, Lb);
            bool nz = false;
            Real inv_deg = Real(1) / lower_degree(q, sys.spairs[si].second);
            for (const auto& qa1 : qb[si]) {
                size_t off = sys.toff[qa1.tindex];
                size_t ncols = qa1.q.cols();
                for (int l = 0; l < La; ++l)
                    for (int mm = 0; mm < Lb; ++mm) {
                        Scalar acc;
                        for (size_t j = 0; j < ncols; ++j) {
                            const Scalar& qv = qa1.q.at(static_cast<size_t>(l) * Lb + mm, j);
                            if (!qv.is_zero()) acc += qv * vt[off + j];
                        }
                        if (!acc.is_zero()) {
                            m.at(l, mm) += acc * Scalar(inv_deg);
                            nz = true;
                        }
                    }
            }
            if (nz) bp.left[{sys.spairs[si].first, sys.spairs[si].second}] = std::move(m);
        }
        Real res = equation_residual(a, b, bp);
        if (res > out.residual) out.residual = res;
        out.basis.push_back(std::move(bp));
    }
    out.dimension = out.basis.size();
    return out;
}

namespace {

BlockPair random_combination(const IntertwinerBasis& basis, Rng& rng) {
    BlockPair z;
    for (const auto& bp : basis.basis) {
        Scalar c = rng.complex();
        for (const auto& [k, m] : bp.left) {
            auto it = z.left.find(k);
            if (it == z.left.end())
                z.left[k] = m.scaled(c);
            else
                it->second = it->second + m.scaled(c);
        }
        for (const auto& [k, m] : bp.right) {
            auto it = z.right.find(k);
            if (it == z.right.end())
                z.right[k] = m.scaled(c);
            else
                it->second = it->second + m.scaled(c);
        }
    }
    return z;
}

}  // namespace

EquivalenceResult equivalent(const Connection& a, const Connection& b, const FieldContext& ctx,
                             Rng& rng) {
    EquivalenceResult res;
    res.residual = Real(0);
    if (!a.square().same_horizontals(b.square(), ctx.tol())) {
        res.diagnostic = "graph mismatch";
        return res;
    }
    if (!a.square().same_verticals(b.square())) {
        res.diagnostic = "graph mismatch";
        return res;
    }
    IntertwinerBasis basis = intertwiner_space(a, b, ctx);
    if (basis.dimension == 0) {
        res.diagnostic = "no intertwiner";
        return res;
    }
    const auto& q = a.square();
    for (int attempt = 0; attempt < 4; ++attempt) {
        BlockPair z = random_combination(basis, rng);
        Gauge g;
        bool ok = true;
        try {
            for (size_t x = 0; x < q.v0.size() && ok; ++x)
                for (size_t y = 0; y < q.v3.size() && ok; ++y)
                    if (q.Lm(x, y)) {
                        auto it = z.left.find({x, y});
                        if (it == z.left.end()) { ok = false; break; }
                        g.left[{x, y}] = polar_unitary(it->second, ctx.tol());
                    }
            for (size_t zz = 0; zz < q.v1.size() && ok; ++zz)
                for (size_t w = 0; w < q.v2.size() && ok; ++w)
                    if (q.Rm(zz, w)) {
                        auto it = z.right.find({zz, w});
                        if (it == z.right.end()) { ok = false; break; }
                        g.right[{zz, w}] = polar_unitary(it->second, ctx.tol());
                    }
        } catch (const PrecisionError&) {
            ok = false;
        }
        if (!ok) continue;
        Real r = max_entry_diff(apply_gauge(a, g, ctx), b);
        if (r < ctx.tol()) {
            res.gauge = std::move(g);
            res.residual = r;
            return res;
        }
    }
    res.diagnostic = "no unitary intertwiner";
    return res;
}

namespace {

// restriction of c along isometries (columns = new basis of each block range)
Connection restrict(const Connection& c, const std::map<Pair, Matrix>& qs,
                    const std::map<Pair, Matrix>& qt) {
    const auto& q = c.square();
    auto sq = std::make_shared<WeightedSquare>(q);
    sq->left.assign(q.left.size(), 0);
    sq->right.assign(q.right.size(), 0);
    for (const auto& [k, m] : qs) sq->Lm(k.first, k.second) = static_cast<int>(m.cols());
    for (const auto& [k, m] : qt) sq->Rm(k.first, k.second) = static_cast<int>(m.cols());
    Connection r{SquarePtr(sq)};
    r.finalize();
    for (const auto& [ks, ms] : qs) {
        auto [x, y] = ks;
        int La = q.Lm(x, y);
        size_t kNew = ms.cols();
        if (!kNew) continue;
        for (size_t z = 0; z < q.v1.size(); ++z) {
            if (!q.um(x, z)) continue;
            for (size_t w = 0; w < q.v2.size(); ++w) {
                if (!q.lm(y, w) || !q.Rm(z, w)) continue;
                auto it = qt.find({z, w});
                if (it == qt.end() || it->second.cols() == 0) continue;
                const Matrix& mt = it->second;
                int Ra = q.Rm(z, w);
                for (int kt = 1; kt <= q.um(x, z); ++kt)
                    for (int kb = 1; kb <= q.lm(y, w); ++kb) {
                        Matrix blk(La, Ra);
                        for (int l = 1; l <= La; ++l)
                            for (int rr = 1; rr <= Ra; ++rr)
                                blk.at(l - 1, rr - 1) =
                                    c.value(c.key(c.edge_id(Side::Upper, x, z, kt),
                                                  c.edge_id(Side::Left, x, y, l),
                                                  c.edge_id(Side::Lower, y, w, kb),
                                                  c.edge_id(Side::Right, z, w, rr)));
                        Matrix out = ms.adjoint() * blk * mt;
                        for (size_t l = 1; l <= kNew; ++l)
                            for (size_t rr = 1; rr <= mt.cols(); ++rr)
                                r.set(r.key(r.edge_id(Side::Upper, x, z, kt),
                                            r.edge_id(Side::Left, x, y, static_cast<int>(l)),
                                            r.edge_id(Side::Lower, y, w, kb),
                                            r.edge_id(Side::Right, z, w, static_cast<int>(rr))),
                                      out.at(l - 1, rr - 1));
                    }
            }
        }
    }
    return r;
}

}  // namespace

std::vector<Summand> decompose(const Connection& c, const FieldContext& ctx, Rng& rng) {
    IntertwinerBasis endo = intertwiner_space(c, c, ctx);
    if (endo.dimension == 0)
        throw StructuralError("decompose: empty self-intertwiner space");
    if (endo.dimension == 1) return {Summand{c, 1}};
    const auto& q = c.square();
    Real cluster_tol = Real(1000000) * ctx.tol();

    for (int attempt = 0; attempt < 4; ++attempt) {
        BlockPair x = random_combination(endo, rng);
        // z = x + x^* (blockwise adjoint is again an intertwiner for a = b)
        BlockPair z;
        for (auto& [k, m] : x.left) z.left[k] = m + m.adjoint();
        for (auto& [k, m] : x.right) z.right[k] = m + m.adjoint();
        if (equation_residual(c, c, z) > ctx.tol() * 100)
            throw PrecisionError("decompose: self-adjoint part left the intertwiner space");

        // eigen-decompose every block, pool the eigenvalues, cluster
        std::map<Pair, EigenResult> es, et;
        std::vector<Real> all;
        for (const auto& [k, m] : z.left) {
            es[k] = hermitian_eigen(m, ctx.tol());
            for (const auto& v : es[k].values) all.push_back(v);
        }
        for (const auto& [k, m] : z.right) {
            et[k] = hermitian_eigen(m, ctx.tol());
            for (const auto& v : et[k].values) all.push_back(v);
        }
        std::sort(all.begin(), all.end());
        std::vector<Real> reps;  // cluster representatives
        for (const auto& v : all)
            if (reps.empty() || v - reps.back() > cluster_tol) reps.push_back(v);

        if (reps.size() < 2) continue;  // degenerate element, retry

        auto cluster_of = [&](const Real& v) -> size_t {
            size_t best = 0;
            Real bd = boost::multiprecision::abs(v - reps[0]);
            for (size_t i = 1; i < reps.size(); ++i) {
                Real d = boost::multiprecision::abs(v - reps[i]);
                if (d < bd) { bd = d; best = i; }
            }
            return best;
        };

        std::vector<Summand> result;
        bool good = true;
        for (size_t cl = 0; cl < reps.size() && good; ++cl) {
            std::map<Pair, Matrix> qs, qt;
            for (size_t xx = 0; xx < q.v0.size(); ++xx)
                for (size_t yy = 0; yy < q.v3.size(); ++yy) {
                    int m = q.Lm(xx, yy);
                    if (!m) continue;
                    auto it = es.find({xx, yy});
                    std::vector<size_t> cols;
                    if (it != es.end())
                        for (size_t j = 0; j < it->second.values.size(); ++j)
                            if (cluster_of(it->second.values[j]) == cl) cols.push_back(j);
                    Matrix qm(m, cols.size());
                    for (size_t j = 0; j < cols.size(); ++j)
                        for (int i = 0; i < m; ++i) qm.at(i, j) = it->second.vectors.at(i, cols[j]);
                    qs[{xx, yy}] = std::move(qm);
                }
            for (size_t zz = 0; zz < q.v1.size(); ++zz)
                for (size_t ww = 0; ww < q.v2.size(); ++ww) {
                    int m = q.Rm(zz, ww);
                    if (!m) continue;
                    auto it = et.find({zz, ww});
                    std::vector<size_t> cols;
                    if (it != et.end())
                        for (size_t j = 0; j < it->second.values.size(); ++j)
                            if (cluster_of(it->second.values[j]) == cl) cols.push_back(j);
                    Matrix qm(m, cols.size());
                    for (size_t j = 0; j < cols.size(); ++j)
                        for (int i = 0; i < m; ++i) qm.at(i, j) = it->second.vectors.at(i, cols[j]);
                    qt[{zz, ww}] = std::move(qm);
                }
            Connection sub = restrict(c, qs, qt);
            if (sub.is_zero_object()) { good = false; break; }
            IntertwinerBasis sb = intertwiner_space(sub, sub, ctx);
            if (sb.dimension != 1) { good = false; break; }  // non-generic element
            result.push_back(Summand{std::move(sub), 1});
        }
        if (!good) continue;

        // group equal classes
        std::vector<Summand> grouped;
        for (auto& s : result) {
            bool found = false;
            for (auto& gsum : grouped) {
                if (gsum.connection.square().same_verticals(s.connection.square())) {
                    EquivalenceResult er = equivalent(gsum.connection, s.connection, ctx, rng);
                    if (er.gauge) { gsum.multiplicity += 1; found = true; break; }
                }
            }
            if (!found) grouped.push_back(std::move(s));
        }
        return grouped;
    }
    throw PrecisionError("decompose: failed to split with a generic element");
}

IndecomposabilityReport is_indecomposable(const Connection& c, const FieldContext& ctx,
                                          Rng& rng) {
    (void)rng;
    IndecomposabilityReport rep;
    IntertwinerBasis endo = intertwiner_space(c, c, ctx);
    rep.self_intertwiner_dim = endo.dimension;
    rep.indecomposable = endo.dimension == 1;
    const auto& q = c.square();
    for (size_t x = 0; x < q.v0.size() && rep.corollary2_vertex.empty(); ++x) {
        int d = 0;
        for (size_t y = 0; y < q.v3.size(); ++y) d += q.Lm(x, y);
        if (d == 1) rep.corollary2_vertex = q.v0[x];
    }
    for (size_t y = 0; y < q.v3.size() && rep.corollary2_vertex.empty(); ++y) {
        int d = 0;
        for (size_t x = 0; x < q.v0.size(); ++x) d += q.Lm(x, y);
        if (d == 1) rep.corollary2_vertex = q.v3[y];
    }
    for (size_t z = 0; z < q.v1.size() && rep.corollary2_vertex.empty(); ++z) {
        int d = 0;
        for (size_t w = 0; w < q.v2.size(); ++w) d += q.Rm(z, w);
        if (d == 1) rep.corollary2_vertex = q.v1[z];
    }
    for (size_t w = 0; w < q.v2.size() && rep.corollary2_vertex.empty(); ++w) {
        int d = 0;
        for (size_t z = 0; z < q.v1.size(); ++z) d += q.Rm(z, w);
        if (d == 1) rep.corollary2_vertex = q.v2[w];
    }
    return rep;
}

std::optional<Connection> subtract(const Connection& a, const Connection& b,
                                   const FieldContext& ctx, Rng& rng) {
    std::vector<Summand> parts = decompose(a, ctx, rng);
    // locate b's class
    int found = -1;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (!parts[i].connection.square().same_verticals(b.square())) continue;
        EquivalenceResult er = equivalent(parts[i].connection, b, ctx, rng);
        if (er.gauge) { found = static_cast<int>(i); break; }
    }
    if (found < 0) return std::nullopt;
    parts[static_cast<size_t>(found)].multiplicity -= 1;

    std::optional<Connection> acc;
    for (const auto& p : parts)
        for (int k = 0; k < p.multiplicity; ++k)
            acc = acc ? sum(*acc, p.connection) : p.connection;
    if (!acc) {
        // zero object on the shared horizontals
        auto sq = std::make_shared<WeightedSquare>(a.square());
        sq->left.assign(sq->left.size(), 0);
        sq->right.assign(sq->right.size(), 0);
        Connection z{SquarePtr(sq)};
        z.finalize();
        return z;
    }
    return acc;
}

}  // namespace conncalc
