#include "conncalc/io.hpp"

#include <cstdlib>
#include <fstream>

namespace conncalc {

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("CONNCALC_DATA")) return env;
    return "data";
}

Json load_json(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw StructuralError("cannot open " + p.string());
    Json j;
    f >> j;
    return j;
}

BipartiteGraph graph_from_json(const Json& j) {
    BipartiteGraph g(j.value("name", ""), j.at("even").get<std::vector<std::string>>(),
                     j.at("odd").get<std::vector<std::string>>());
    for (const auto& e : j.at("edges")) {
        int m = e.size() > 2 ? e.at(2).get<int>() : 1;
        g.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>(), m);
    }
    return g;
}

Json graph_to_json(const BipartiteGraph& g, const std::string& basepoint) {
    Json j;
    if (!g.name().empty()) j["name"] = g.name();
    j["even"] = g.even();
    j["odd"] = g.odd();
    Json edges = Json::array();
    for (size_t e = 0; e < g.even().size(); ++e)
        for (size_t o = 0; o < g.odd().size(); ++o)
            if (int m = g.mult(e, o)) edges.push_back({g.even()[e], g.odd()[o], m});
    j["edges"] = std::move(edges);
    if (!basepoint.empty()) j["basepoint"] = basepoint;
    return j;
}

namespace {

std::vector<int> mults_from_json(const Json& edges, const std::vector<std::string>& rows,
                                 const std::vector<std::string>& cols, const char* what) {
    std::vector<int> m(rows.size() * cols.size(), 0);
    auto idx = [&](const std::vector<std::string>& v, const std::string& s) -> size_t {
        auto it = std::find(v.begin(), v.end(), s);
        if (it == v.end())
            throw StructuralError(std::string(what) + ": unknown vertex '" + s + "'");
        return static_cast<size_t>(it - v.begin());
    };
    for (const auto& e : edges) {
        int mult = e.size() > 2 ? e.at(2).get<int>() : 1;
        m[idx(rows, e.at(0).get<std::string>()) * cols.size() +
          idx(cols, e.at(1).get<std::string>())] += mult;
    }
    return m;
}

std::vector<Real> mu_from_json(const Json& mu, const std::vector<std::string>& verts,
                               const FieldContext& ctx, const char* what) {
    std::vector<Real> w;
    w.reserve(verts.size());
    for (const auto& v : verts) {
        if (!mu.contains(v)) throw StructuralError(std::string(what) + ": missing weight for '" + v + "'");
        Scalar s = parse_scalar(mu.at(v).get<std::string>(), ctx);
        if (!s.im.is_zero() || s.re <= 0)
            throw StructuralError(std::string(what) + ": weight of '" + v + "' must be a positive real");
        w.push_back(s.re);
    }
    return w;
}

size_t vindex(const std::vector<std::string>& v, const std::string& s, const char* what) {
    auto it = std::find(v.begin(), v.end(), s);
    if (it == v.end()) throw StructuralError(std::string(what) + ": unknown vertex '" + s + "'");
    return static_cast<size_t>(it - v.begin());
}

}  // namespace

CaseId connection_case(const Json& j) { return case_from_name(j.at("case").get<std::string>()); }

Connection connection_from_json(const Json& j, const FieldContext& ctx) {
    if (connection_case(j) != ctx.case_id())
        throw ConfigError("connection file case does not match the context");
    const Json& sq = j.at("square");
    auto s = std::make_shared<WeightedSquare>();
    s->v0 = sq.at("v0").get<std::vector<std::string>>();
    s->v1 = sq.at("v1").get<std::vector<std::string>>();
    s->v2 = sq.at("v2").get<std::vector<std::string>>();
    s->v3 = sq.at("v3").get<std::vector<std::string>>();
    s->upper = mults_from_json(sq.at("upper"), s->v0, s->v1, "upper");
    s->lower = mults_from_json(sq.at("lower"), s->v3, s->v2, "lower");
    s->left = mults_from_json(sq.at("left"), s->v0, s->v3, "left");
    s->right = mults_from_json(sq.at("right"), s->v1, s->v2, "right");
    s->mu0 = mu_from_json(sq.at("mu0"), s->v0, ctx, "mu0");
    s->mu1 = mu_from_json(sq.at("mu1"), s->v1, ctx, "mu1");
    s->mu2 = mu_from_json(sq.at("mu2"), s->v2, ctx, "mu2");
    s->mu3 = mu_from_json(sq.at("mu3"), s->v3, ctx, "mu3");
    s->base_upper = vindex(s->v0, sq.at("base_upper").get<std::string>(), "base_upper");
    s->base_lower = vindex(s->v3, sq.at("base_lower").get<std::string>(), "base_lower");
    // reflected squares (contragredient fixtures) carry the original weights
    // and may not have a unit-weight vertex in V0
    if (j.value("normalized_base", true) &&
        boost::multiprecision::abs(s->mu0[s->base_upper] - 1) > ctx.tol())
        throw StructuralError("mu(base_upper) must be 1");
    Real hres = s->horizontal_residual(ctx.tol());
    if (hres > ctx.tol() * 100)
        throw StructuralError("weights are not harmonic on the horizontal graphs (residual " +
                              format_real(hres, 8) + ")");

    Connection c{SquarePtr(s)};
    c.finalize();
    bool dense = j.value("dense", true);
    auto edge_of = [&](const Json& e, Side side, const std::vector<std::string>& from,
                       const std::vector<std::string>& to, const char* what) -> size_t {
        size_t f = vindex(from, e.at(0).get<std::string>(), what);
        size_t t = vindex(to, e.at(1).get<std::string>(), what);
        int copy = e.size() > 2 ? e.at(2).get<int>() : 1;
        const auto& qq = c.square();
        int mx = side == Side::Upper   ? qq.um(f, t)
                 : side == Side::Lower ? qq.lm(f, t)
                 : side == Side::Left  ? qq.Lm(f, t)
                                       : qq.Rm(f, t);
        if (copy < 1 || copy > mx)
            throw StructuralError(std::string(what) + ": no copy " + std::to_string(copy) +
                                  " of edge " + e.at(0).get<std::string>() + "-" +
                                  e.at(1).get<std::string>());
        return c.edge_id(side, f, t, copy);
    };
    for (const auto& e : j.at("entries")) {
        size_t t = edge_of(e.at("top"), Side::Upper, s->v0, s->v1, "top");
        size_t l = edge_of(e.at("left"), Side::Left, s->v0, s->v3, "left");
        size_t b = edge_of(e.at("bottom"), Side::Lower, s->v3, s->v2, "bottom");
        size_t r = edge_of(e.at("right"), Side::Right, s->v1, s->v2, "right");
        c.set(c.key(t, l, b, r), parse_scalar(e.at("value").get<std::string>(), ctx));
    }
    if (dense) {
        // every structural cell must have been given (possibly zero) — collect absences
        std::vector<std::string> missing;
        const auto& q = c.square();
        std::map<CellKey, bool> given;
        for (const auto& e : j.at("entries")) {
            size_t t = edge_of(e.at("top"), Side::Upper, s->v0, s->v1, "top");
            size_t l = edge_of(e.at("left"), Side::Left, s->v0, s->v3, "left");
            size_t b = edge_of(e.at("bottom"), Side::Lower, s->v3, s->v2, "bottom");
            size_t r = edge_of(e.at("right"), Side::Right, s->v1, s->v2, "right");
            given[c.key(t, l, b, r)] = true;
        }
        for (size_t x = 0; x < q.v0.size(); ++x)
            for (size_t z = 0; z < q.v1.size(); ++z)
                for (int kt = 1; kt <= q.um(x, z); ++kt)
                    for (size_t y = 0; y < q.v3.size(); ++y)
                        for (int kl = 1; kl <= q.Lm(x, y); ++kl)
                            for (size_t w = 0; w < q.v2.size(); ++w)
                                for (int kb = 1; kb <= q.lm(y, w); ++kb)
                                    for (int kr = 1; kr <= q.Rm(z, w); ++kr) {
                                        CellKey kk = c.key(c.edge_id(Side::Upper, x, z, kt),
                                                           c.edge_id(Side::Left, x, y, kl),
                                                           c.edge_id(Side::Lower, y, w, kb),
                                                           c.edge_id(Side::Right, z, w, kr));
                                        if (!given.count(kk))
                                            missing.push_back(
                                                "(" + q.v0[x] + q.v3[y] + "," + q.v1[z] + q.v2[w] + ")");
                                    }
        if (!missing.empty()) {
            std::string msg = "dense table is missing cells:";
            for (size_t i = 0; i < missing.size() && i < 8; ++i) msg += " " + missing[i];
            throw StructuralError(msg);
        }
    }
    return c;
}

namespace {

Json edges_json(const std::vector<int>& m, const std::vector<std::string>& rows,
                const std::vector<std::string>& cols) {
    Json out = Json::array();
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            if (int v = m[i * cols.size() + j]) out.push_back({rows[i], cols[j], v});
    return out;
}

Json mu_json(const std::vector<Real>& mu, const std::vector<std::string>& verts,
             const FieldContext& ctx) {
    Json out;
    for (size_t i = 0; i < verts.size(); ++i) out[verts[i]] = format_real(mu[i], ctx.digits() + 5);
    return out;
}

}  // namespace

Json connection_to_json(const Connection& c, const FieldContext& ctx, CaseId case_id,
                        const std::string& name) {
    const auto& q = c.square();
    Json j;
    j["case"] = case_name(case_id);
    if (!name.empty()) j["name"] = name;
    if (boost::multiprecision::abs(q.mu0[q.base_upper] - 1) > Real("1e-10"))
        j["normalized_base"] = false;  // reflected square
    Json sq;
    sq["v0"] = q.v0;
    sq["v1"] = q.v1;
    sq["v2"] = q.v2;
    sq["v3"] = q.v3;
    sq["upper"] = edges_json(q.upper, q.v0, q.v1);
    sq["lower"] = edges_json(q.lower, q.v3, q.v2);
    sq["left"] = edges_json(q.left, q.v0, q.v3);
    sq["right"] = edges_json(q.right, q.v1, q.v2);
    sq["mu0"] = mu_json(q.mu0, q.v0, ctx);
    sq["mu1"] = mu_json(q.mu1, q.v1, ctx);
    sq["mu2"] = mu_json(q.mu2, q.v2, ctx);
    sq["mu3"] = mu_json(q.mu3, q.v3, ctx);
    sq["base_upper"] = q.v0[q.base_upper];
    sq["base_lower"] = q.v3[q.base_lower];
    j["square"] = std::move(sq);
    j["dense"] = false;
    Json entries = Json::array();
    for (const auto& [k, v] : c.table()) {
        size_t t, l, b, r;
        Connection::unpack(k, t, l, b, r);
        auto te = c.edge(Side::Upper, t);
        auto le = c.edge(Side::Left, l);
        auto be = c.edge(Side::Lower, b);
        auto re = c.edge(Side::Right, r);
        Json e;
        e["top"] = {q.v0[te.from], q.v1[te.to], te.copy};
        e["left"] = {q.v0[le.from], q.v3[le.to], le.copy};
        e["bottom"] = {q.v3[be.from], q.v2[be.to], be.copy};
        e["right"] = {q.v1[re.from], q.v2[re.to], re.copy};
        e["value"] = format_scalar(v, ctx);
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j;
}

Gauge gauge_from_json(const Json& j, const Connection& c, const FieldContext& ctx) {
    const auto& q = c.square();
    Gauge g;
    auto load_side = [&](const Json& arr, bool left) {
        for (const auto& b : arr) {
            size_t f = vindex(left ? q.v0 : q.v1, b.at("from").get<std::string>(), "gauge");
            size_t t = vindex(left ? q.v3 : q.v2, b.at("to").get<std::string>(), "gauge");
            const Json& rows = b.at("matrix");
            Matrix m(rows.size(), rows.empty() ? 0 : rows.at(0).size());
            for (size_t i = 0; i < rows.size(); ++i)
                for (size_t jj = 0; jj < rows.at(i).size(); ++jj)
                    m.at(i, jj) = parse_scalar(rows.at(i).at(jj).get<std::string>(), ctx);
            (left ? g.left : g.right)[{f, t}] = std::move(m);
        }
    };
    if (j.contains("left")) load_side(j.at("left"), true);
    if (j.contains("right")) load_side(j.at("right"), false);
    return g;
}

Json gauge_to_json(const Gauge& g, const Connection& c, const FieldContext& ctx) {
    const auto& q = c.square();
    Json j;
    auto dump_side = [&](const std::map<std::pair<size_t, size_t>, Matrix>& side, bool left) {
        Json arr = Json::array();
        for (const auto& [k, m] : side) {
            Json b;
            b["from"] = (left ? q.v0 : q.v1)[k.first];
            b["to"] = (left ? q.v3 : q.v2)[k.second];
            Json rows = Json::array();
            for (size_t i = 0; i < m.rows(); ++i) {
                Json row = Json::array();
                for (size_t jj = 0; jj < m.cols(); ++jj) row.push_back(format_scalar(m.at(i, jj), ctx));
                rows.push_back(std::move(row));
            }
            b["matrix"] = std::move(rows);
            arr.push_back(std::move(b));
        }
        return arr;
    };
    j["left"] = dump_side(g.left, true);
    j["right"] = dump_side(g.right, false);
    return j;
}

std::map<std::string, std::string> automorphism_from_json(const Json& j) {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : j.at("map").items()) m[k] = v.get<std::string>();
    return m;
}

CaseBundle load_bundle(CaseId c, const FieldContext& ctx) {
    auto dir = data_dir() / case_name(c);
    CaseBundle b;
    Json ju = load_json(dir / "upper-graph.json");
    b.upper = graph_from_json(ju);
    b.upper_basepoint = ju.value("basepoint", b.upper.even().front());
    Json jd = load_json(dir / "dual-graph.json");
    b.dual = graph_from_json(jd);
    b.dual_basepoint = jd.value("basepoint", b.dual.even().front());
    b.alpha = connection_from_json(load_json(dir / "alpha.json"), ctx);
    b.alpha_dual = connection_from_json(load_json(dir / "alpha-dual.json"), ctx);
    b.sigma = automorphism_from_json(load_json(dir / "sigma.json"));
    return b;
}

}  // namespace conncalc
