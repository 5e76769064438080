#include "conncalc/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace conncalc {

BipartiteGraph::BipartiteGraph(std::string name, std::vector<std::string> even,
                               std::vector<std::string> odd)
    : name_(std::move(name)), even_(std::move(even)), odd_(std::move(odd)),
      m_(even_.size() * odd_.size(), 0) {}

void BipartiteGraph::add_edge(const std::string& e, const std::string& o, int mult) {
    m_[even_index(e) * odd_.size() + odd_index(o)] += mult;
}

size_t BipartiteGraph::even_index(const std::string& v) const {
    auto it = std::find(even_.begin(), even_.end(), v);
    if (it == even_.end()) throw StructuralError("no even vertex '" + v + "' in graph " + name_);
    return static_cast<size_t>(it - even_.begin());
}

size_t BipartiteGraph::odd_index(const std::string& v) const {
    auto it = std::find(odd_.begin(), odd_.end(), v);
    if (it == odd_.end()) throw StructuralError("no odd vertex '" + v + "' in graph " + name_);
    return static_cast<size_t>(it - odd_.begin());
}

int BipartiteGraph::even_degree(size_t e) const {
    int d = 0;
    for (size_t o = 0; o < odd_.size(); ++o) d += mult(e, o);
    return d;
}

int BipartiteGraph::odd_degree(size_t o) const {
    int d = 0;
    for (size_t e = 0; e < even_.size(); ++e) d += mult(e, o);
    return d;
}

size_t BipartiteGraph::edge_count() const {
    size_t n = 0;
    for (int v : m_) n += static_cast<size_t>(v);
    return n;
}

bool BipartiteGraph::connected() const {
    size_t ne = even_.size(), no = odd_.size();
    if (ne + no == 0) return false;
    std::vector<char> se(ne, 0), so(no, 0);
    std::vector<std::pair<char, size_t>> stack{{0, 0}};
    se[0] = 1;
    while (!stack.empty()) {
        auto [side, i] = stack.back();
        stack.pop_back();
        if (side == 0) {
            for (size_t o = 0; o < no; ++o)
                if (mult(i, o) > 0 && !so[o]) { so[o] = 1; stack.push_back({1, o}); }
        } else {
            for (size_t e = 0; e < ne; ++e)
                if (mult(e, i) > 0 && !se[e]) { se[e] = 1; stack.push_back({0, e}); }
        }
    }
    return std::all_of(se.begin(), se.end(), [](char c) { return c; }) &&
           std::all_of(so.begin(), so.end(), [](char c) { return c; });
}

bool BipartiteGraph::has_zero_line() const {
    for (size_t e = 0; e < even_.size(); ++e)
        if (even_degree(e) == 0) return true;
    for (size_t o = 0; o < odd_.size(); ++o)
        if (odd_degree(o) == 0) return true;
    return false;
}

BipartiteGraph BipartiteGraph::transposed() const {
    BipartiteGraph t(name_.empty() ? "" : name_ + "^t", odd_, even_);
    for (size_t e = 0; e < even_.size(); ++e)
        for (size_t o = 0; o < odd_.size(); ++o) t.set_mult(o, e, mult(e, o));
    return t;
}

BipartiteGraph compose_graphs(const BipartiteGraph& g1, const BipartiteGraph& g2) {
    if (g1.odd() != g2.even())
        throw StructuralError("compose_graphs: odd side of '" + g1.name() +
                              "' does not match even side of '" + g2.name() + "'");
    BipartiteGraph r(g1.name() + "*" + g2.name(), g1.even(), g2.odd());
    for (size_t e = 0; e < g1.even().size(); ++e)
        for (size_t o = 0; o < g2.odd().size(); ++o) {
            int s = 0;
            for (size_t k = 0; k < g1.odd().size(); ++k) s += g1.mult(e, k) * g2.mult(k, o);
            r.set_mult(e, o, s);
        }
    return r;
}

PFData pf_data(const BipartiteGraph& g, const std::string& basepoint, const FieldContext& ctx) {
    if (!g.connected()) throw StructuralError("pf_data: graph '" + g.name() + "' is disconnected");
    size_t ne = g.even().size(), no = g.odd().size();
    std::vector<Real> v(no, Real(1)), u(ne);
    Real norm(0);
    const Real& tol = ctx.tol();
    size_t iter = 0, max_iter = 300000;
    for (; iter < max_iter; ++iter) {
        for (size_t e = 0; e < ne; ++e) {
            Real s(0);
            for (size_t o = 0; o < no; ++o)
                if (int m = g.mult(e, o)) s += m * v[o];
            u[e] = s;
        }
        std::vector<Real> v2(no, Real(0));
        for (size_t o = 0; o < no; ++o) {
            Real s(0);
            for (size_t e = 0; e < ne; ++e)
                if (int m = g.mult(e, o)) s += m * u[e];
            v2[o] = s;
        }
        Real n2(0), n1(0);
        for (size_t o = 0; o < no; ++o) { n2 += v2[o] * v2[o]; n1 += v[o] * v[o]; }
        norm = sqrt(sqrt(n2 / n1));  // ||G||
        Real scale = sqrt(n2);
        for (size_t o = 0; o < no; ++o) v2[o] /= scale;
        Real nv = sqrt(n1);
        Real diff(0);
        for (size_t o = 0; o < no; ++o) {
            Real d = boost::multiprecision::abs(v2[o] - v[o] / nv);
            if (d > diff) diff = d;
        }
        v = v2;
        if (diff < tol / 100) break;
    }
    if (iter == max_iter) throw NumericError("pf_data: power iteration did not converge");
    // weights: odd = v, even = G v / norm ; then normalize at basepoint
    for (size_t e = 0; e < ne; ++e) {
        Real s(0);
        for (size_t o = 0; o < no; ++o)
            if (int m = g.mult(e, o)) s += m * v[o];
        u[e] = s / norm;
    }
    Real base(0);
    bool found = false;
    for (size_t e = 0; e < ne && !found; ++e)
        if (g.even()[e] == basepoint) { base = u[e]; found = true; }
    for (size_t o = 0; o < no && !found; ++o)
        if (g.odd()[o] == basepoint) { base = v[o]; found = true; }
    if (!found) throw StructuralError("pf_data: basepoint '" + basepoint + "' not in graph");
    PFData pf;
    pf.norm = norm;
    pf.even_weights.reserve(ne);
    pf.odd_weights.reserve(no);
    for (size_t e = 0; e < ne; ++e) pf.even_weights.push_back(u[e] / base);
    for (size_t o = 0; o < no; ++o) pf.odd_weights.push_back(v[o] / base);
    // final residual both ways
    Real worst(0);
    for (size_t e = 0; e < ne; ++e) {
        Real s(0);
        for (size_t o = 0; o < no; ++o)
            if (int m = g.mult(e, o)) s += m * pf.odd_weights[o];
        Real d = boost::multiprecision::abs(s - pf.norm * pf.even_weights[e]);
        if (d > worst) worst = d;
    }
    for (size_t o = 0; o < no; ++o) {
        Real s(0);
        for (size_t e = 0; e < ne; ++e)
            if (int m = g.mult(e, o)) s += m * pf.even_weights[e];
        Real d = boost::multiprecision::abs(s - pf.norm * pf.odd_weights[o]);
        if (d > worst) worst = d;
    }
    pf.residual = worst;
    if (worst > ctx.tol() * pf.norm)
        throw NumericError("pf_data: eigen-equation residual " + format_real(worst, 8));
    return pf;
}

namespace {

using IMat = std::vector<long>;  // dense row-major integer matrix

IMat imul(const IMat& a, size_t ar, size_t ac, const IMat& b, size_t bc) {
    IMat r(ar * bc, 0);
    for (size_t i = 0; i < ar; ++i)
        for (size_t k = 0; k < ac; ++k) {
            long v = a[i * ac + k];
            if (!v) continue;
            for (size_t j = 0; j < bc; ++j) r[i * bc + j] += v * b[k * bc + j];
        }
    return r;
}

long imin(const IMat& a) { return *std::min_element(a.begin(), a.end()); }

}  // namespace

Lemma1Report lemma1_positivity(const BipartiteGraph& g) {
    if (!g.connected()) throw StructuralError("lemma1_positivity: graph disconnected");
    size_t ne = g.even().size(), no = g.odd().size();
    IMat G(ne * no);
    for (size_t e = 0; e < ne; ++e)
        for (size_t o = 0; o < no; ++o) G[e * no + o] = g.mult(e, o);
    IMat Gt(no * ne);
    for (size_t e = 0; e < ne; ++e)
        for (size_t o = 0; o < no; ++o) Gt[o * ne + e] = g.mult(e, o);
    IMat GGt = imul(G, ne, no, Gt, ne);
    IMat GGtG = imul(GGt, ne, ne, G, no);
    IMat GGt2 = imul(GGt, ne, ne, GGt, ne);
    IMat GGt2G = imul(GGt2, ne, ne, G, no);

    IMat m1 = GGt;
    for (size_t i = 0; i < ne; ++i) m1[i * ne + i] -= 1;
    IMat m2(ne * no);
    for (size_t i = 0; i < ne * no; ++i) m2[i] = GGtG[i] - 2 * G[i];
    IMat m3(ne * ne);
    for (size_t i = 0; i < ne * ne; ++i) m3[i] = GGt2[i] - 3 * GGt[i];
    for (size_t i = 0; i < ne; ++i) m3[i * ne + i] += 1;
    IMat m4(ne * no);
    for (size_t i = 0; i < ne * no; ++i) m4[i] = GGt2G[i] - 4 * GGtG[i] + 3 * G[i];

    Lemma1Report r;
    r.matrices = {"GG^t-1", "GG^tG-2G", "(GG^t)^2-3GG^t+1", "(GG^t)^2G-4GG^tG+3G"};
    r.minima = {imin(m1), imin(m2), imin(m3), imin(m4)};
    r.pass = std::all_of(r.minima.begin(), r.minima.end(), [](long v) { return v >= 0; });
    return r;
}

StringDimProfile string_dim(const BipartiteGraph& g, const std::string& basepoint, size_t length) {
    size_t ne = g.even().size(), no = g.odd().size();
    // locate basepoint (either side)
    int side = -1;
    size_t idx = 0;
    for (size_t e = 0; e < ne; ++e)
        if (g.even()[e] == basepoint) { side = 0; idx = e; }
    for (size_t o = 0; o < no; ++o)
        if (g.odd()[o] == basepoint) { side = 1; idx = o; }
    if (side < 0) throw StructuralError("string_dim: basepoint '" + basepoint + "' not in graph");

    std::vector<long> cur(side == 0 ? ne : no, 0);
    cur[idx] = 1;
    int cside = side;
    for (size_t step = 0; step < length; ++step) {
        if (cside == 0) {
            std::vector<long> nxt(no, 0);
            for (size_t e = 0; e < ne; ++e)
                if (cur[e])
                    for (size_t o = 0; o < no; ++o) nxt[o] += cur[e] * g.mult(e, o);
            cur = std::move(nxt);
            cside = 1;
        } else {
            std::vector<long> nxt(ne, 0);
            for (size_t o = 0; o < no; ++o)
                if (cur[o])
                    for (size_t e = 0; e < ne; ++e) nxt[e] += cur[o] * g.mult(e, o);
            cur = std::move(nxt);
            cside = 0;
        }
    }
    StringDimProfile p;
    p.length = length;
    const auto& names = (cside == 0) ? g.even() : g.odd();
    for (size_t i = 0; i < cur.size(); ++i)
        if (cur[i]) {
            p.blocks.emplace_back(names[i], cur[i]);
            p.total_dim += cur[i] * cur[i];
        }
    return p;
}

namespace {

// degree profile used as an isomorphism invariant: sorted multiset of
// (multiplicity, opposite-degree) over incident edges
std::vector<std::pair<int, int>> even_profile(const BipartiteGraph& g, size_t e) {
    std::vector<std::pair<int, int>> p;
    for (size_t o = 0; o < g.odd().size(); ++o)
        if (int m = g.mult(e, o)) p.emplace_back(m, g.odd_degree(o));
    std::sort(p.begin(), p.end());
    return p;
}

bool extend(const BipartiteGraph& a, const BipartiteGraph& b, std::vector<size_t>& emap,
            std::vector<size_t>& omap, std::vector<char>& used_e, std::vector<char>& used_o,
            size_t next_e) {
    size_t ne = a.even().size(), no = a.odd().size();
    if (next_e == ne) {
        // complete the odd map by exact row matching
        std::vector<size_t> cand(no);
        std::iota(cand.begin(), cand.end(), 0);
        std::vector<size_t> assign(no, no);
        std::vector<char> used(no, 0);
        std::function<bool(size_t)> rec = [&](size_t o) -> bool {
            if (o == no) return true;
            for (size_t t = 0; t < no; ++t) {
                if (used[t]) continue;
                bool ok = true;
                for (size_t e = 0; e < ne && ok; ++e)
                    if (a.mult(e, o) != b.mult(emap[e], t)) ok = false;
                if (!ok) continue;
                used[t] = 1;
                assign[o] = t;
                if (rec(o + 1)) return true;
                used[t] = 0;
            }
            return false;
        };
        if (!rec(0)) return false;
        omap = assign;
        return true;
    }
    auto prof = even_profile(a, next_e);
    for (size_t t = 0; t < b.even().size(); ++t) {
        if (used_e[t]) continue;
        if (even_profile(b, t) != prof) continue;
        emap[next_e] = t;
        used_e[t] = 1;
        if (extend(a, b, emap, omap, used_e, used_o, next_e + 1)) return true;
        used_e[t] = 0;
    }
    return false;
}

}  // namespace

std::optional<GraphIso> find_isomorphism(const BipartiteGraph& g1, const BipartiteGraph& g2) {
    if (g1.even().size() != g2.even().size() || g1.odd().size() != g2.odd().size())
        return std::nullopt;
    if (g1.edge_count() != g2.edge_count()) return std::nullopt;
    std::vector<size_t> emap(g1.even().size()), omap;
    std::vector<char> ue(g2.even().size(), 0), uo(g2.odd().size(), 0);
    if (!extend(g1, g2, emap, omap, ue, uo, 0)) return std::nullopt;
    GraphIso iso;
    iso.even_map = emap;
    iso.odd_map = omap;
    return iso;
}

}  // namespace conncalc
