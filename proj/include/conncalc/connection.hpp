#pragma once

#include "conncalc/graph.hpp"
#include "conncalc/linalg.hpp"

#include <cstdint>
#include <map>
#include <memory>

namespace conncalc {

enum class Side : uint8_t { Upper = 0, Lower = 1, Left = 2, Right = 3 };

// Four vertex sets with the four multiplicity graphs and a harmonic weight.
//   upper: V0 x V1,  lower: V3 x V2,  left: V0 x V3,  right: V1 x V2
class WeightedSquare {
  public:
    std::vector<std::string> v0, v1, v2, v3;
    std::vector<int> upper, lower, left, right;  // row-major multiplicity matrices
    std::vector<Real> mu0, mu1, mu2, mu3;        // positive weights per vertex set
    size_t base_upper = 0;                       // index into v0
    size_t base_lower = 0;                       // index into v3

    int um(size_t a, size_t b) const { return upper[a * v1.size() + b]; }
    int lm(size_t a, size_t b) const { return lower[a * v2.size() + b]; }
    int Lm(size_t a, size_t b) const { return left[a * v3.size() + b]; }
    int Rm(size_t a, size_t b) const { return right[a * v2.size() + b]; }
    int& um(size_t a, size_t b) { return upper[a * v1.size() + b]; }
    int& lm(size_t a, size_t b) { return lower[a * v2.size() + b]; }
    int& Lm(size_t a, size_t b) { return left[a * v3.size() + b]; }
    int& Rm(size_t a, size_t b) { return right[a * v2.size() + b]; }

    size_t left_total() const;   // multiplicity-counted edges of the left graph
    size_t right_total() const;

    bool same_horizontals(const WeightedSquare& o, const Real& tol) const;
    bool same_verticals(const WeightedSquare& o) const;

    // harmonicity checks used at load / construction time
    Real horizontal_residual(const Real& tol) const;  // upper+lower eigen-equations via mu
    // common vertical eigenvalue d and its worst residual across V0 and V1
    std::pair<Real, Real> vertical_eigenvalue() const;
};

using SquarePtr = std::shared_ptr<const WeightedSquare>;

struct EdgeRef {
    Side side;
    uint16_t from, to, copy;  // copy is 1-based
};

struct Cell {
    EdgeRef top, left, bottom, right;
};

// packed cell key: 4 x (from, to, copy) would not fit, so cells are packed
// as (top edge #, left edge #, bottom edge #, right edge #) 16 bits each
using CellKey = uint64_t;

class Connection {
  public:
    Connection() = default;
    explicit Connection(SquarePtr sq) : sq_(std::move(sq)) {}

    const WeightedSquare& square() const { return *sq_; }
    const SquarePtr& square_ptr() const { return sq_; }

    void set(CellKey k, Scalar v) { if (!v.is_zero()) table_[k] = std::move(v); }
    Scalar value(CellKey k) const;
    const std::map<CellKey, Scalar>& table() const { return table_; }

    bool is_zero_object() const { return sq_->left_total() == 0 && sq_->right_total() == 0; }

    // --- cell enumeration -------------------------------------------------
    // edge numbering within a side: lexicographic by (from, to, copy)
    size_t upper_edges() const { return upper_off_.back(); }
    size_t lower_edges() const { return lower_off_.back(); }
    size_t left_edges() const { return left_off_.back(); }
    size_t right_edges() const { return right_off_.back(); }
    void finalize();  // builds edge offsets; call after square is set

    size_t edge_id(Side s, size_t from, size_t to, int copy) const;
    CellKey key(size_t top, size_t left, size_t bottom, size_t right) const;
    // unpack helpers
    static void unpack(CellKey k, size_t& t, size_t& l, size_t& b, size_t& r);
    // edge lookup by id
    struct EdgeInfo { size_t from, to; int copy; };
    EdgeInfo edge(Side s, size_t id) const;

  private:
    SquarePtr sq_;
    std::map<CellKey, Scalar> table_;
    std::vector<size_t> upper_off_, lower_off_, left_off_, right_off_;  // per (from,to) offsets

    const std::vector<size_t>& offs(Side s) const;
    std::pair<size_t, size_t> dims(Side s) const;
};

struct BiunitarityReport {
    Real unitarity_residual;
    Real renormalization_residual;
    bool pass = false;
    std::vector<std::string> notes;  // structural problems (missing cells, block shapes)
};

// Unitarity of every horizontal block plus unitarity of the renormalized
// table (the vertical blocks weighted by mu).
BiunitarityReport check_biunitary(const Connection& c, const FieldContext& ctx);

// block-diagonal direct sum; a and b must share horizontals and mu
Connection sum(const Connection& a, const Connection& b);

// relative product; a's lower graph must equal b's upper graph (with mu)
Connection product(const Connection& a, const Connection& b);

// contragredient: reflected square, renormalized entries
Connection renormalize(const Connection& c);

// trivial connection with identity vertical matchings over graph g
Connection trivial_connection(const BipartiteGraph& g, const FieldContext& ctx);

// connection of a graph automorphism (vertex map over even and odd vertices)
Connection automorphism_connection(const BipartiteGraph& g,
                                   const std::map<std::string, std::string>& map,
                                   const FieldContext& ctx);

struct Gauge {
    // blocks keyed by vertex-index pairs; missing block = identity
    std::map<std::pair<size_t, size_t>, Matrix> left, right;
    Real max_block_residual(const Connection& c) const;  // unitarity of all blocks
};

struct ValidationError : std::runtime_error { using std::runtime_error::runtime_error; };

Connection apply_gauge(const Connection& c, const Gauge& g, const FieldContext& ctx);

// entrywise maximum difference over the (shared) cell set
Real max_entry_diff(const Connection& a, const Connection& b);

// statistical dimension: the common harmonic eigenvalue of both verticals
Real dimension(const Connection& c, const FieldContext& ctx);

}  // namespace conncalc
