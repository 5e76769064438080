// Command-line front end for the connection calculus.
//
// Exit codes: 0 = verified true / success, 1 = verified false, 2 = input or
// configuration error.

#include <CLI11.hpp>

#include "conncalc/fusion.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>

using namespace conncalc;

namespace {

struct GlobalOpts {
    unsigned precision = 60;
    std::string tol;  // empty = default for the precision
    std::string format = "json";
    uint64_t seed = 1;
    std::string data;
};

FieldContext make_ctx(CaseId c, const GlobalOpts& g) {
    if (!g.tol.empty()) return FieldContext::make(c, g.precision, Real(g.tol.c_str()));
    return FieldContext::make(c, g.precision);
}

void emit(const Json& j, const GlobalOpts& g) {
    if (g.format == "json") {
        std::cout << j.dump(1) << "\n";
        return;
    }
    std::function<void(const Json&, std::string)> walk = [&](const Json& v, std::string prefix) {
        if (v.is_object()) {
            for (const auto& [k, sub] : v.items()) walk(sub, prefix.empty() ? k : prefix + "." + k);
        } else if (v.is_array()) {
            size_t i = 0;
            for (const auto& sub : v) walk(sub, prefix + "[" + std::to_string(i++) + "]");
        } else {
            std::cout << prefix << " = " << (v.is_string() ? v.get<std::string>() : v.dump())
                      << "\n";
        }
    };
    walk(j, "");
}

Connection load_conn(const std::string& path, const GlobalOpts& g, FieldContext& ctx_out) {
    Json j = load_json(path);
    ctx_out = make_ctx(connection_case(j), g);
    return connection_from_json(j, ctx_out);
}

void write_json(const Json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw StructuralError("cannot write " + path);
    f << j.dump(1) << "\n";
}

int cmd_check(const std::string& path, const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection c = load_conn(path, g, ctx);
    BiunitarityReport r = check_biunitary(c, ctx);
    Json out;
    out["command"] = "check";
    out["file"] = path;
    out["unitarity_residual"] = format_real_sci(r.unitarity_residual, 8);
    out["renormalization_residual"] = format_real_sci(r.renormalization_residual, 8);
    out["pass"] = r.pass;
    if (!r.notes.empty()) out["notes"] = r.notes;
    emit(out, g);
    return r.pass ? 0 : 1;
}

int cmd_compose(const std::string& pa, const std::string& pb, bool use_sum,
                const std::string& outp, const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection a = load_conn(pa, g, ctx);
    Connection b = connection_from_json(load_json(pb), ctx);
    Connection r = use_sum ? sum(a, b) : product(a, b);
    Json out = connection_to_json(r, ctx, ctx.case_id());
    if (!outp.empty())
        write_json(out, outp);
    else
        emit(out, g);
    return 0;
}

int cmd_dual(const std::string& pa, const std::string& outp, const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection a = load_conn(pa, g, ctx);
    Json out = connection_to_json(renormalize(a), ctx, ctx.case_id());
    if (!outp.empty())
        write_json(out, outp);
    else
        emit(out, g);
    return 0;
}

int cmd_equiv(const std::string& pa, const std::string& pb, const std::string& outp,
              const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection a = load_conn(pa, g, ctx);
    Connection b = connection_from_json(load_json(pb), ctx);
    Rng rng(g.seed);
    EquivalenceResult r = equivalent(a, b, ctx, rng);
    Json out;
    out["command"] = "equiv";
    out["equivalent"] = r.gauge.has_value();
    if (r.gauge) {
        out["residual"] = format_real_sci(r.residual, 8);
        Json gj = gauge_to_json(*r.gauge, a, ctx);
        if (!outp.empty())
            write_json(gj, outp);
        else
            out["gauge"] = gj;
    } else {
        out["diagnostic"] = r.diagnostic;
    }
    emit(out, g);
    return r.gauge ? 0 : 1;
}

int cmd_decompose(const std::string& pa, const std::string& prefix, const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection a = load_conn(pa, g, ctx);
    Rng rng(g.seed);
    std::vector<Summand> parts = decompose(a, ctx, rng);
    Json out;
    out["command"] = "decompose";
    Json arr = Json::array();
    for (size_t i = 0; i < parts.size(); ++i) {
        Json e;
        e["multiplicity"] = parts[i].multiplicity;
        e["dimension"] = format_real(dimension(parts[i].connection, ctx), 8);
        if (!prefix.empty()) {
            std::string f = prefix + std::to_string(i) + ".json";
            write_json(connection_to_json(parts[i].connection, ctx, ctx.case_id()), f);
            e["file"] = f;
        }
        arr.push_back(std::move(e));
    }
    out["summands"] = std::move(arr);
    emit(out, g);
    return 0;
}

int cmd_indecomposable(const std::string& pa, const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection a = load_conn(pa, g, ctx);
    Rng rng(g.seed);
    IndecomposabilityReport r = is_indecomposable(a, ctx, rng);
    Json out;
    out["command"] = "indecomposable";
    out["indecomposable"] = r.indecomposable;
    out["self_intertwiner_dim"] = r.self_intertwiner_dim;
    if (!r.corollary2_vertex.empty()) out["single_vertical_edge_at"] = r.corollary2_vertex;
    emit(out, g);
    return r.indecomposable ? 0 : 1;
}

int cmd_pf(const std::string& path, std::string basepoint, const GlobalOpts& g) {
    Json j = load_json(path);
    BipartiteGraph gr = graph_from_json(j);
    if (basepoint.empty()) basepoint = j.value("basepoint", gr.even().front());
    // graph files are case-agnostic; any context provides the numerics
    FieldContext ctx = make_ctx(CaseId::Sqrt13, g);
    PFData p = pf_data(gr, basepoint, ctx);
    Json out;
    out["command"] = "pf";
    out["norm"] = format_real(p.norm, g.precision);
    Json w;
    for (size_t e = 0; e < gr.even().size(); ++e)
        w[gr.even()[e]] = format_real(p.even_weights[e], g.precision);
    for (size_t o = 0; o < gr.odd().size(); ++o)
        w[gr.odd()[o]] = format_real(p.odd_weights[o], g.precision);
    out["weights"] = std::move(w);
    out["residual"] = format_real_sci(p.residual, 8);
    emit(out, g);
    return 0;
}

int cmd_lemma1(const std::string& path, const GlobalOpts& g) {
    BipartiteGraph gr = graph_from_json(load_json(path));
    Lemma1Report r = lemma1_positivity(gr);
    Json out;
    out["command"] = "lemma1";
    Json arr = Json::array();
    for (size_t i = 0; i < r.matrices.size(); ++i) {
        Json e;
        e["matrix"] = r.matrices[i];
        e["min_entry"] = r.minima[i];
        arr.push_back(std::move(e));
    }
    out["matrices"] = std::move(arr);
    out["pass"] = r.pass;
    emit(out, g);
    return r.pass ? 0 : 1;
}

int cmd_string_dim(const std::string& path, std::string basepoint, unsigned length,
                   const GlobalOpts& g) {
    Json j = load_json(path);
    BipartiteGraph gr = graph_from_json(j);
    if (basepoint.empty()) basepoint = j.value("basepoint", gr.even().front());
    StringDimProfile p = string_dim(gr, basepoint, length);
    Json out;
    out["command"] = "string-dim";
    out["length"] = p.length;
    Json blocks;
    for (const auto& [v, n] : p.blocks) blocks[v] = n;
    out["blocks"] = std::move(blocks);
    out["total_dim"] = p.total_dim;
    emit(out, g);
    return 0;
}

int cmd_fusion_graph(const std::string& pa, unsigned max_depth, const std::string& outp,
                     const GlobalOpts& g) {
    FieldContext ctx = FieldContext::make(CaseId::Sqrt13, 60);
    Connection a = load_conn(pa, g, ctx);
    Rng rng(g.seed);
    FusionGraphResult fg = fusion_graph(a, max_depth, ctx, rng);
    Json out;
    out["command"] = "fusion-graph";
    out["finite_depth"] = fg.finite_depth;
    out["depth_reached"] = fg.depth_reached;
    Json gj = graph_to_json(fg.graph);
    Json dims;
    for (size_t i = 0; i < fg.even_dims.size(); ++i)
        dims[fg.graph.even()[i]] = format_real(fg.even_dims[i], 12);
    for (size_t i = 0; i < fg.odd_dims.size(); ++i)
        dims[fg.graph.odd()[i]] = format_real(fg.odd_dims[i], 12);
    out["graph"] = gj;
    out["dimensions"] = std::move(dims);
    if (!outp.empty()) write_json(gj, outp);
    emit(out, g);
    return fg.finite_depth ? 0 : 1;
}

int cmd_verify(const std::string& which, const GlobalOpts& g) {
    CaseId cid = case_from_name(which);
    FieldContext ctx = make_ctx(cid, g);
    Json out = verify_case_report(cid, ctx, g.seed);
    emit(out, g);
    return out["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"connection calculus for biunitary connections on four-graph squares"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--precision", g.precision, "working precision in decimal digits");
    app.add_option("--tol", g.tol, "comparison tolerance (decimal)");
    app.add_option("--format", g.format, "output format: json|text")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--seed", g.seed, "seed for randomized internals");
    app.add_option("--data", g.data, "bundled data directory (default $CONNCALC_DATA or ./data)");

    std::string file_a, file_b, outp, basepoint, which;
    unsigned length = 0, max_depth = 12;
    bool use_sum = false, use_product = false;

    auto* c_check = app.add_subcommand("check", "biunitarity of a connection file");
    c_check->add_option("file", file_a)->required();

    auto* c_comp = app.add_subcommand("compose", "sum or product of two connections");
    c_comp->add_flag("--sum", use_sum);
    c_comp->add_flag("--product", use_product);
    c_comp->add_option("a", file_a)->required();
    c_comp->add_option("b", file_b)->required();
    c_comp->add_option("-o,--output", outp);

    auto* c_dual = app.add_subcommand("dual", "contragredient (renormalized) connection");
    c_dual->add_option("file", file_a)->required();
    c_dual->add_option("-o,--output", outp);

    auto* c_equiv = app.add_subcommand("equiv", "vertical-gauge equivalence of two connections");
    c_equiv->add_option("a", file_a)->required();
    c_equiv->add_option("b", file_b)->required();
    c_equiv->add_option("-o,--output", outp);

    auto* c_dec = app.add_subcommand("decompose", "split into indecomposable summands");
    c_dec->add_option("file", file_a)->required();
    c_dec->add_option("--out-prefix", outp);

    auto* c_ind = app.add_subcommand("indecomposable", "irreducibility certificate");
    c_ind->add_option("file", file_a)->required();

    auto* c_pf = app.add_subcommand("pf", "Perron-Frobenius norm and weights of a graph");
    c_pf->add_option("file", file_a)->required();
    c_pf->add_option("--basepoint", basepoint);

    auto* c_l1 = app.add_subcommand("lemma1", "positivity of the four graph polynomials");
    c_l1->add_option("file", file_a)->required();

    auto* c_sd = app.add_subcommand("string-dim", "path-count profile from the basepoint");
    c_sd->add_option("file", file_a)->required();
    c_sd->add_option("--length", length)->required();
    c_sd->add_option("--basepoint", basepoint);

    auto* c_fg = app.add_subcommand("fusion-graph", "principal graph from a generator");
    c_fg->add_option("file", file_a)->required();
    c_fg->add_option("--max-depth", max_depth);
    c_fg->add_option("-o,--output", outp);

    auto* c_ver = app.add_subcommand("verify", "run the full pipeline for a bundled case");
    c_ver->add_option("case", which, "sqrt13 or sqrt17")->required();

    for (auto* sc : app.get_subcommands({})) sc->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (!g.data.empty()) setenv("CONNCALC_DATA", g.data.c_str(), 1);

    try {
        if (app.got_subcommand(c_check)) return cmd_check(file_a, g);
        if (app.got_subcommand(c_comp)) {
            if (use_sum == use_product)
                throw ConfigError("compose: pass exactly one of --sum / --product");
            return cmd_compose(file_a, file_b, use_sum, outp, g);
        }
        if (app.got_subcommand(c_dual)) return cmd_dual(file_a, outp, g);
        if (app.got_subcommand(c_equiv)) return cmd_equiv(file_a, file_b, outp, g);
        if (app.got_subcommand(c_dec)) return cmd_decompose(file_a, outp, g);
        if (app.got_subcommand(c_ind)) return cmd_indecomposable(file_a, g);
        if (app.got_subcommand(c_pf)) return cmd_pf(file_a, basepoint, g);
        if (app.got_subcommand(c_l1)) return cmd_lemma1(file_a, g);
        if (app.got_subcommand(c_sd)) return cmd_string_dim(file_a, basepoint, length, g);
        if (app.got_subcommand(c_fg)) return cmd_fusion_graph(file_a, max_depth, outp, g);
        if (app.got_subcommand(c_ver)) return cmd_verify(which, g);
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
