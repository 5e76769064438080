// Python bindings: thin wrappers over the connection calculus returning
// plain dict/list structures (reports mirror the CLI's JSON output).

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conncalc/fusion.hpp"

#include <complex>

namespace py = pybind11;
using namespace conncalc;

namespace {

py::object to_py(const Json& j) {
    switch (j.type()) {
        case Json::value_t::object: {
            py::dict d;
            for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
            return d;
        }
        case Json::value_t::array: {
            py::list l;
            for (const auto& v : j) l.append(to_py(v));
            return l;
        }
        case Json::value_t::string:
            return py::str(j.get<std::string>());
        case Json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case Json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case Json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case Json::value_t::number_float:
            return py::float_(j.get<double>());
        default:
            return py::none();
    }
}

FieldContext ctx_for(CaseId c, unsigned precision, const std::string& tol) {
    if (!tol.empty()) return FieldContext::make(c, precision, Real(tol.c_str()));
    return FieldContext::make(c, precision);
}

struct Loaded {
    FieldContext ctx;
    Connection conn;
};

Loaded load(const std::string& path, unsigned precision, const std::string& tol) {
    Json j = load_json(path);
    FieldContext ctx = ctx_for(connection_case(j), precision, tol);
    return {ctx, connection_from_json(j, ctx)};
}

void set_data(const std::string& data) {
    if (!data.empty()) setenv("CONNCALC_DATA", data.c_str(), 1);
}

py::object py_check(const std::string& path, unsigned precision, const std::string& tol) {
    Loaded l = load(path, precision, tol);
    BiunitarityReport r = check_biunitary(l.conn, l.ctx);
    Json out;
    out["unitarity_residual"] = format_real_sci(r.unitarity_residual, 8);
    out["renormalization_residual"] = format_real_sci(r.renormalization_residual, 8);
    out["pass"] = r.pass;
    if (!r.notes.empty()) out["notes"] = r.notes;
    return to_py(out);
}

py::object py_verify(const std::string& which, unsigned precision, const std::string& tol,
                     uint64_t seed, const std::string& data) {
    set_data(data);
    CaseId cid = case_from_name(which);
    FieldContext ctx = ctx_for(cid, precision, tol);
    return to_py(verify_case_report(cid, ctx, seed));
}

py::object py_decompose(const std::string& path, unsigned precision, const std::string& tol,
                        uint64_t seed) {
    Loaded l = load(path, precision, tol);
    Rng rng(seed);
    std::vector<Summand> parts = decompose(l.conn, l.ctx, rng);
    Json arr = Json::array();
    for (const auto& p : parts) {
        Json e;
        e["multiplicity"] = p.multiplicity;
        e["dimension"] = format_real(dimension(p.connection, l.ctx), 16);
        arr.push_back(std::move(e));
    }
    Json out;
    out["summands"] = std::move(arr);
    return to_py(out);
}

py::object py_equivalent(const std::string& pa, const std::string& pb, unsigned precision,
                         const std::string& tol, uint64_t seed) {
    Loaded l = load(pa, precision, tol);
    Connection b = connection_from_json(load_json(pb), l.ctx);
    Rng rng(seed);
    EquivalenceResult r = equivalent(l.conn, b, l.ctx, rng);
    Json out;
    out["equivalent"] = r.gauge.has_value();
    if (r.gauge)
        out["residual"] = format_real_sci(r.residual, 8);
    else
        out["diagnostic"] = r.diagnostic;
    return to_py(out);
}

py::object py_compose(const std::string& pa, const std::string& pb, const std::string& kind,
                      unsigned precision, const std::string& tol) {
    Loaded l = load(pa, precision, tol);
    Connection b = connection_from_json(load_json(pb), l.ctx);
    if (kind != "sum" && kind != "product")
        throw ConfigError("compose kind must be 'sum' or 'product'");
    Connection r = (kind == "sum") ? sum(l.conn, b) : product(l.conn, b);
    return to_py(connection_to_json(r, l.ctx, l.ctx.case_id()));
}

py::object py_dual(const std::string& pa, unsigned precision, const std::string& tol) {
    Loaded l = load(pa, precision, tol);
    return to_py(connection_to_json(renormalize(l.conn), l.ctx, l.ctx.case_id()));
}

py::object py_indecomposable(const std::string& pa, unsigned precision, const std::string& tol,
                             uint64_t seed) {
    Loaded l = load(pa, precision, tol);
    Rng rng(seed);
    IndecomposabilityReport r = is_indecomposable(l.conn, l.ctx, rng);
    Json out;
    out["indecomposable"] = r.indecomposable;
    out["self_intertwiner_dim"] = r.self_intertwiner_dim;
    if (!r.corollary2_vertex.empty()) out["single_vertical_edge_at"] = r.corollary2_vertex;
    return to_py(out);
}

py::object py_pf(const std::string& path, const std::string& basepoint, unsigned precision) {
    Json j = load_json(path);
    BipartiteGraph g = graph_from_json(j);
    std::string bp = basepoint.empty() ? j.value("basepoint", g.even().front()) : basepoint;
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, precision);
    PFData p = pf_data(g, bp, ctx);
    Json out;
    out["norm"] = format_real(p.norm, precision);
    Json w;
    for (size_t e = 0; e < g.even().size(); ++e)
        w[g.even()[e]] = format_real(p.even_weights[e], precision);
    for (size_t o = 0; o < g.odd().size(); ++o)
        w[g.odd()[o]] = format_real(p.odd_weights[o], precision);
    out["weights"] = std::move(w);
    return to_py(out);
}

py::object py_lemma1(const std::string& path) {
    Lemma1Report r = lemma1_positivity(graph_from_json(load_json(path)));
    Json out;
    Json arr = Json::array();
    for (size_t i = 0; i < r.matrices.size(); ++i)
        arr.push_back({r.matrices[i], r.minima[i]});
    out["minima"] = std::move(arr);
    out["pass"] = r.pass;
    return to_py(out);
}

py::object py_string_dim(const std::string& path, unsigned length, const std::string& basepoint) {
    Json j = load_json(path);
    BipartiteGraph g = graph_from_json(j);
    std::string bp = basepoint.empty() ? j.value("basepoint", g.even().front()) : basepoint;
    StringDimProfile p = string_dim(g, bp, length);
    Json out;
    out["length"] = p.length;
    Json blocks;
    for (const auto& [v, n] : p.blocks) blocks[v] = n;
    out["blocks"] = std::move(blocks);
    out["total_dim"] = p.total_dim;
    return to_py(out);
}

py::object py_fusion_graph(const std::string& path, unsigned max_depth, unsigned precision,
                           const std::string& tol, uint64_t seed) {
    Loaded l = load(path, precision, tol);
    Rng rng(seed);
    FusionGraphResult fg = fusion_graph(l.conn, max_depth, l.ctx, rng);
    Json out;
    out["finite_depth"] = fg.finite_depth;
    out["graph"] = graph_to_json(fg.graph);
    Json dims;
    for (size_t i = 0; i < fg.even_dims.size(); ++i)
        dims[fg.graph.even()[i]] = format_real(fg.even_dims[i], 12);
    for (size_t i = 0; i < fg.odd_dims.size(); ++i)
        dims[fg.graph.odd()[i]] = format_real(fg.odd_dims[i], 12);
    out["dimensions"] = std::move(dims);
    return to_py(out);
}

std::complex<double> py_eval_scalar(const std::string& expr, const std::string& which,
                                    unsigned precision) {
    FieldContext ctx = FieldContext::make(case_from_name(which), precision);
    Scalar v = parse_scalar(expr, ctx);
    return {static_cast<double>(v.re), static_cast<double>(v.im)};
}

}  // namespace

PYBIND11_MODULE(_conncalc, m) {
    m.doc() = "connection calculus for biunitary connections on four-graph squares";

    m.def("check", &py_check, py::arg("path"), py::arg("precision") = 60, py::arg("tol") = "",
          "biunitarity report for a connection file");
    m.def("verify", &py_verify, py::arg("case"), py::arg("precision") = 60, py::arg("tol") = "",
          py::arg("seed") = 1, py::arg("data") = "",
          "full verification pipeline for a bundled case (sqrt13 or sqrt17)");
    m.def("decompose", &py_decompose, py::arg("path"), py::arg("precision") = 60,
          py::arg("tol") = "", py::arg("seed") = 1);
    m.def("equivalent", &py_equivalent, py::arg("a"), py::arg("b"), py::arg("precision") = 60,
          py::arg("tol") = "", py::arg("seed") = 1);
    m.def("compose", &py_compose, py::arg("a"), py::arg("b"), py::arg("kind") = "product",
          py::arg("precision") = 60, py::arg("tol") = "");
    m.def("dual", &py_dual, py::arg("path"), py::arg("precision") = 60, py::arg("tol") = "");
    m.def("indecomposable", &py_indecomposable, py::arg("path"), py::arg("precision") = 60,
          py::arg("tol") = "", py::arg("seed") = 1);
    m.def("pf", &py_pf, py::arg("path"), py::arg("basepoint") = "", py::arg("precision") = 60);
    m.def("lemma1", &py_lemma1, py::arg("path"));
    m.def("string_dim", &py_string_dim, py::arg("path"), py::arg("length"),
          py::arg("basepoint") = "");
    m.def("fusion_graph", &py_fusion_graph, py::arg("path"), py::arg("max_depth") = 12,
          py::arg("precision") = 60, py::arg("tol") = "", py::arg("seed") = 1);
    m.def("eval_scalar", &py_eval_scalar, py::arg("expr"), py::arg("case"),
          py::arg("precision") = 60,
          "evaluate a scalar expression in a case context (returned as complex double)");

    py::register_exception<ParseError>(m, "ConncalcParseError");
    py::register_exception<StructuralError>(m, "ConncalcStructuralError");
    py::register_exception<PrecisionError>(m, "ConncalcPrecisionError");
}
