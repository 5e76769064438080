#pragma once

#include "conncalc/connection.hpp"

#include <json.hpp>

#include <filesystem>

namespace conncalc {

using Json = nlohmann::ordered_json;

std::filesystem::path data_dir();  // $CONNCALC_DATA or ./data

Json load_json(const std::filesystem::path& p);

BipartiteGraph graph_from_json(const Json& j);
Json graph_to_json(const BipartiteGraph& g, const std::string& basepoint = "");

// connection files carry their case; the caller's context must match
Connection connection_from_json(const Json& j, const FieldContext& ctx);
Json connection_to_json(const Connection& c, const FieldContext& ctx, CaseId case_id,
                        const std::string& name = "");
CaseId connection_case(const Json& j);

Gauge gauge_from_json(const Json& j, const Connection& c, const FieldContext& ctx);
Json gauge_to_json(const Gauge& g, const Connection& c, const FieldContext& ctx);

// automorphism file: {"graph": {...}, "map": {vertex: vertex}}
std::map<std::string, std::string> automorphism_from_json(const Json& j);

// bundled per-case data
struct CaseBundle {
    BipartiteGraph upper, dual;      // principal graph pair
    std::string upper_basepoint, dual_basepoint;
    Connection alpha;
    Connection alpha_dual;           // bundled contragredient fixture
    std::map<std::string, std::string> sigma;
};
CaseBundle load_bundle(CaseId c, const FieldContext& ctx);

}  // namespace conncalc
