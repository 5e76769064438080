#pragma once

#include "conncalc/connection.hpp"
#include "conncalc/rng.hpp"

#include <optional>

namespace conncalc {

// Solution of the intertwiner equation  a . xT = xS . b  (cell-wise);
// blocks are not necessarily unitary.
struct BlockPair {
    std::map<std::pair<size_t, size_t>, Matrix> left, right;
};

struct IntertwinerBasis {
    size_t dimension = 0;
    std::vector<BlockPair> basis;     // orthonormal as flat vectors
    Real residual;                    // worst equation residual over the basis
    std::vector<std::string> notes;   // structural notes (horizontal mismatch)
};

// Basis of Hom(a, b).  a and b must live on the same horizontal graphs with
// matching weights; otherwise dimension 0 with a note.  Both connections are
// assumed biunitary (the solver exploits their unitarity blocks).
IntertwinerBasis intertwiner_space(const Connection& a, const Connection& b,
                                   const FieldContext& ctx);

struct EquivalenceResult {
    std::optional<Gauge> gauge;
    Real residual;            // ||apply_gauge(a, g) - b||_max when found
    std::string diagnostic;   // "graph mismatch" | "no unitary intertwiner" | ""
};

EquivalenceResult equivalent(const Connection& a, const Connection& b,
                             const FieldContext& ctx, Rng& rng);

struct Summand {
    Connection connection;
    int multiplicity = 1;
};

// Decomposition into indecomposable summands via eigen-projections of a
// random self-adjoint element of End(c).
std::vector<Summand> decompose(const Connection& c, const FieldContext& ctx, Rng& rng);

struct IndecomposabilityReport {
    bool indecomposable = false;
    size_t self_intertwiner_dim = 0;
    std::string corollary2_vertex;  // set when some vertex meets exactly one vertical edge
};

IndecomposabilityReport is_indecomposable(const Connection& c, const FieldContext& ctx,
                                          Rng& rng);

// a minus one copy of b's class; nullopt when b's class does not appear.
// Removing everything yields the zero object (empty verticals).
std::optional<Connection> subtract(const Connection& a, const Connection& b,
                                   const FieldContext& ctx, Rng& rng);

}  // namespace conncalc
