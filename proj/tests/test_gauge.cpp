#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conncalc/fusion.hpp"

using namespace conncalc;

namespace {

Real tenpow(long e) { return pow(Real(10), e); }

struct Fix {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    CaseBundle b = load_bundle(CaseId::Sqrt13, ctx);
    Connection one = trivial_connection(b.upper, ctx);
    Connection sig = automorphism_connection(b.upper, b.sigma, ctx);
    Connection aa = product(b.alpha, renormalize(b.alpha));
};

// brute-force dense oracle for the intertwiner dimension: assemble the full
// linear system M and count small singular values of M^H M by Jacobi
size_t dense_hom_dim(const Connection& a, const Connection& b, const FieldContext& ctx) {
    const auto& q = a.square();
    if (!q.same_horizontals(b.square(), ctx.tol())) return 0;
    const auto& qb = b.square();
    // unknown layout
    std::map<std::pair<char, std::pair<size_t, size_t>>, size_t> off;
    size_t n = 0;
    for (size_t x = 0; x < q.v0.size(); ++x)
        for (size_t y = 0; y < q.v3.size(); ++y)
            if (q.Lm(x, y) && qb.Lm(x, y)) {
                off[{'S', {x, y}}] = n;
                n += static_cast<size_t>(q.Lm(x, y)) * qb.Lm(x, y);
            }
    for (size_t z = 0; z < q.v1.size(); ++z)
        for (size_t w = 0; w < q.v2.size(); ++w)
            if (q.Rm(z, w) && qb.Rm(z, w)) {
                off[{'T', {z, w}}] = n;
                n += static_cast<size_t>(q.Rm(z, w)) * qb.Rm(z, w);
            }
    if (!n) return 0;
    GramAccumulator acc(n);
    for (size_t x = 0; x < q.v0.size(); ++x)
        for (size_t y = 0; y < q.v3.size(); ++y) {
            if (!q.Lm(x, y)) continue;
            for (size_t z = 0; z < q.v1.size(); ++z) {
                if (!q.um(x, z)) continue;
                for (size_t w = 0; w < q.v2.size(); ++w) {
                    if (!q.lm(y, w) || !qb.Rm(z, w)) continue;
                    for (int kt = 1; kt <= q.um(x, z); ++kt)
                        for (int kb = 1; kb <= q.lm(y, w); ++kb)
                            for (int l = 1; l <= q.Lm(x, y); ++l)
                                for (int rh = 1; rh <= qb.Rm(z, w); ++rh) {
                                    std::vector<std::pair<size_t, Scalar>> row;
                                    if (auto it = off.find({'T', {z, w}}); it != off.end())
                                        for (int r = 1; r <= q.Rm(z, w); ++r) {
                                            Scalar av = a.value(
                                                a.key(a.edge_id(Side::Upper, x, z, kt),
                                                      a.edge_id(Side::Left, x, y, l),
                                                      a.edge_id(Side::Lower, y, w, kb),
                                                      a.edge_id(Side::Right, z, w, r)));
                                            if (!av.is_zero())
                                                row.emplace_back(it->second +
                                                                     (r - 1) * qb.Rm(z, w) +
                                                                     (rh - 1),
                                                                 av);
                                        }
                                    if (auto it = off.find({'S', {x, y}}); it != off.end())
                                        for (int m = 1; m <= qb.Lm(x, y); ++m) {
                                            Scalar bv = b.value(
                                                b.key(b.edge_id(Side::Upper, x, z, kt),
                                                      b.edge_id(Side::Left, x, y, m),
                                                      b.edge_id(Side::Lower, y, w, kb),
                                                      b.edge_id(Side::Right, z, w, rh)));
                                            if (!bv.is_zero())
                                                row.emplace_back(it->second +
                                                                     (l - 1) * qb.Lm(x, y) +
                                                                     (m - 1),
                                                                 -bv);
                                        }
                                    if (!row.empty()) acc.add_row(row);
                                }
                }
            }
        }
    Matrix k = acc.take();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < i; ++j) k.at(i, j) = conj(k.at(j, i));
    EigenResult e = hermitian_eigen(k, ctx.tol());
    size_t dim = 0;
    for (const auto& v : e.values)
        if (v < ctx.tol()) ++dim;
    return dim;
}

}  // namespace

TEST_CASE("self-intertwiners of the basic connections") {
    Fix f;
    IntertwinerBasis ia = intertwiner_space(f.b.alpha, f.b.alpha, f.ctx);
    CHECK(ia.dimension == 1);
    CHECK(ia.residual < f.ctx.tol());
    IntertwinerBasis iaa = intertwiner_space(f.aa, f.aa, f.ctx);
    CHECK(iaa.dimension == 2);
    CHECK(iaa.residual < f.ctx.tol());
    // dense-oracle cross-check of the Schur-reduced solver
    CHECK(dense_hom_dim(f.b.alpha, f.b.alpha, f.ctx) == 1);
    CHECK(dense_hom_dim(f.aa, f.aa, f.ctx) == 2);
}

TEST_CASE("alpha and sigma alpha do not intertwine") {
    Fix f;
    Connection sa = product(f.sig, f.b.alpha);
    IntertwinerBasis i = intertwiner_space(f.b.alpha, sa, f.ctx);
    CHECK(i.dimension == 0);
    CHECK(dense_hom_dim(f.b.alpha, sa, f.ctx) == 0);
}

TEST_CASE("horizontal mismatch gives dimension 0 with a note") {
    Fix f;
    auto ctx17 = FieldContext::make(CaseId::Sqrt17, 60);
    // different-square comparison is structural, not numeric
    IntertwinerBasis i = intertwiner_space(f.b.alpha, f.one, f.ctx);
    CHECK(i.dimension == 0);
    CHECK(!i.notes.empty());
}

TEST_CASE("equivalent: reflexive with identity-like gauge") {
    Fix f;
    Rng rng(4);
    EquivalenceResult r = equivalent(f.b.alpha, f.b.alpha, f.ctx, rng);
    REQUIRE(r.gauge.has_value());
    CHECK(r.residual < f.ctx.tol());
}

TEST_CASE("equivalent is symmetric and transitive on a gauged orbit") {
    Fix f;
    Rng rng(5);
    // scramble alpha by a random gauge on the (c,4)-ish edges: use polar of
    // random 1x1 blocks everywhere
    const auto& q = f.b.alpha.square();
    Gauge g;
    for (size_t x = 0; x < q.v0.size(); ++x)
        for (size_t y = 0; y < q.v3.size(); ++y)
            if (q.Lm(x, y)) {
                Matrix m(1, 1);
                Scalar z = rng.complex();
                m.at(0, 0) = z * Scalar(1 / abs(z));
                g.left[{x, y}] = m;
            }
    Connection a2 = apply_gauge(f.b.alpha, g, f.ctx);
    EquivalenceResult r12 = equivalent(f.b.alpha, a2, f.ctx, rng);
    REQUIRE(r12.gauge.has_value());
    EquivalenceResult r21 = equivalent(a2, f.b.alpha, f.ctx, rng);
    REQUIRE(r21.gauge.has_value());
}

TEST_CASE("decompose alpha alpha~ into trivial and table 5 class") {
    Fix f;
    Rng rng(6);
    std::vector<Summand> parts = decompose(f.aa, f.ctx, rng);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].multiplicity == 1);
    CHECK(parts[1].multiplicity == 1);
    Connection t5 = connection_from_json(load_json(data_dir() / "sqrt13/aab-minus-1.json"), f.ctx);
    int triv = -1, tbl = -1;
    for (int i = 0; i < 2; ++i) {
        if (parts[i].connection.square().same_verticals(f.one.square())) {
            EquivalenceResult er = equivalent(parts[i].connection, f.one, f.ctx, rng);
            if (er.gauge) triv = i;
        }
        if (parts[i].connection.square().same_verticals(t5.square())) {
            EquivalenceResult er = equivalent(parts[i].connection, t5, f.ctx, rng);
            if (er.gauge) tbl = i;
        }
    }
    CHECK(triv >= 0);
    CHECK(tbl >= 0);
    CHECK(triv != tbl);
    // dimension of the nontrivial part is lambda^2 - 1
    Real d = dimension(parts[static_cast<size_t>(tbl)].connection, f.ctx);
    CHECK(boost::multiprecision::abs(d - (f.ctx.gen2() - 1)) < tenpow(-40));
}

TEST_CASE("decompose sum(alpha, alpha) = 2 alpha") {
    Fix f;
    Rng rng(7);
    std::vector<Summand> parts = decompose(sum(f.b.alpha, f.b.alpha), f.ctx, rng);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].multiplicity == 2);
    EquivalenceResult er = equivalent(parts[0].connection, f.b.alpha, f.ctx, rng);
    CHECK(er.gauge.has_value());
}

TEST_CASE("is_indecomposable with corollary-2 shortcut") {
    Fix f;
    Rng rng(8);
    IndecomposabilityReport r = is_indecomposable(f.b.alpha, f.ctx, rng);
    CHECK(r.indecomposable);
    CHECK(r.self_intertwiner_dim == 1);
    CHECK_FALSE(r.corollary2_vertex.empty());  // * meets a single vertical edge
    Connection sa = product(f.sig, f.b.alpha);
    IndecomposabilityReport r2 = is_indecomposable(sum(f.b.alpha, sa), f.ctx, rng);
    CHECK_FALSE(r2.indecomposable);
    CHECK(r2.self_intertwiner_dim == 2);
}

TEST_CASE("subtract") {
    Fix f;
    Rng rng(9);
    // aa~ - 1 is the table 5 class
    auto y = subtract(f.aa, f.one, f.ctx, rng);
    REQUIRE(y.has_value());
    Connection t5 = connection_from_json(load_json(data_dir() / "sqrt13/aab-minus-1.json"), f.ctx);
    CHECK(y->square().same_verticals(t5.square()));
    EquivalenceResult er = equivalent(*y, t5, f.ctx, rng);
    CHECK(er.gauge.has_value());
    // alpha - alpha is the zero object
    auto z = subtract(f.b.alpha, f.b.alpha, f.ctx, rng);
    REQUIRE(z.has_value());
    CHECK(z->is_zero_object());
    // subtracting an absent class
    Connection sa = product(f.sig, f.b.alpha);
    CHECK_FALSE(subtract(f.b.alpha, sa, f.ctx, rng).has_value());
}

TEST_CASE("random gauge scramble of a sum decomposes back") {
    Fix f;
    Rng rng(10);
    Connection sa = product(f.sig, f.b.alpha);
    Connection s = sum(sum(f.b.alpha, sa), f.b.alpha);
    // scramble with a random unitary gauge built from polar factors
    const auto& q = s.square();
    Gauge g;
    for (size_t x = 0; x < q.v0.size(); ++x)
        for (size_t y = 0; y < q.v3.size(); ++y)
            if (int m = q.Lm(x, y)) {
                Matrix z(m, m);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) z.at(i, j) = rng.complex();
                g.left[{x, y}] = polar_unitary(z, f.ctx.tol());
            }
    for (size_t zz = 0; zz < q.v1.size(); ++zz)
        for (size_t w = 0; w < q.v2.size(); ++w)
            if (int m = q.Rm(zz, w)) {
                Matrix z(m, m);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) z.at(i, j) = rng.complex();
                g.right[{zz, w}] = polar_unitary(z, f.ctx.tol());
            }
    Connection scr = apply_gauge(s, g, f.ctx);
    std::vector<Summand> parts = decompose(scr, f.ctx, rng);
    REQUIRE(parts.size() == 2);
    int total = 0;
    bool saw_alpha2 = false, saw_sa = false;
    for (const auto& p : parts) {
        total += p.multiplicity;
        if (p.multiplicity == 2 && equivalent(p.connection, f.b.alpha, f.ctx, rng).gauge)
            saw_alpha2 = true;
        if (p.multiplicity == 1 && equivalent(p.connection, sa, f.ctx, rng).gauge) saw_sa = true;
    }
    CHECK(total == 3);
    CHECK(saw_alpha2);
    CHECK(saw_sa);
    // intertwiner dimension of the sum equals sum of squared multiplicities
    IntertwinerBasis ib = intertwiner_space(scr, scr, f.ctx);
    CHECK(ib.dimension == 5);
}

TEST_CASE("equivalence is transitive via composed gauges") {
    Fix f;
    Rng rng(31);
    // two independent scrambles of alpha
    auto scramble = [&](const Connection& c) {
        const auto& q = c.square();
        Gauge g;
        for (size_t x = 0; x < q.v0.size(); ++x)
            for (size_t y = 0; y < q.v3.size(); ++y)
                if (int m = q.Lm(x, y)) {
                    Matrix z(m, m);
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) z.at(i, j) = rng.complex();
                    g.left[{x, y}] = polar_unitary(z, f.ctx.tol());
                }
        return apply_gauge(c, g, f.ctx);
    };
    Connection a1 = scramble(f.b.alpha), a2 = scramble(f.b.alpha);
    auto g1 = equivalent(f.b.alpha, a1, f.ctx, rng);
    auto g2 = equivalent(a1, a2, f.ctx, rng);
    REQUIRE(g1.gauge.has_value());
    REQUIRE(g2.gauge.has_value());
    // composing the witnesses transports alpha to a2
    Connection via = apply_gauge(apply_gauge(f.b.alpha, *g1.gauge, f.ctx), *g2.gauge, f.ctx);
    CHECK(max_entry_diff(via, a2) < f.ctx.tol());
}

TEST_CASE("sum(1, aa~-1) is gauge equivalent to aa~") {
    Fix f;
    Rng rng(32);
    Connection t5 = connection_from_json(load_json(data_dir() / "sqrt13/aab-minus-1.json"), f.ctx);
    Connection s = sum(f.one, t5);
    CHECK(s.square().same_verticals(f.aa.square()));
    EquivalenceResult er = equivalent(s, f.aa, f.ctx, rng);
    REQUIRE(er.gauge.has_value());
    CHECK(er.residual < f.ctx.tol());
}

TEST_CASE("renormalize fixes the trivial connection") {
    Fix f;
    CHECK(max_entry_diff(renormalize(f.one), f.one) < f.ctx.tol());
}
