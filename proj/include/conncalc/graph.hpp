#pragma once

#include "conncalc/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conncalc {

struct StructuralError : std::runtime_error { using std::runtime_error::runtime_error; };
struct NumericError : std::runtime_error { using std::runtime_error::runtime_error; };

// Bipartite multiplicity graph: named even/odd vertices, integer
// multiplicity matrix (even x odd).
class BipartiteGraph {
  public:
    BipartiteGraph() = default;
    BipartiteGraph(std::string name, std::vector<std::string> even,
                   std::vector<std::string> odd);

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    const std::vector<std::string>& even() const { return even_; }
    const std::vector<std::string>& odd() const { return odd_; }

    int mult(size_t e, size_t o) const { return m_[e * odd_.size() + o]; }
    void set_mult(size_t e, size_t o, int v) { m_[e * odd_.size() + o] = v; }
    void add_edge(const std::string& e, const std::string& o, int mult = 1);

    size_t even_index(const std::string& v) const;  // throws StructuralError
    size_t odd_index(const std::string& v) const;
    int even_degree(size_t e) const;  // multiplicity-counted
    int odd_degree(size_t o) const;
    size_t edge_count() const;  // with multiplicity

    bool connected() const;
    bool has_zero_line() const;  // any all-zero row or column

    BipartiteGraph transposed() const;

  private:
    std::string name_;
    std::vector<std::string> even_, odd_;
    std::vector<int> m_;
};

// odd side of g1 must equal the even side of g2 (names, in order)
BipartiteGraph compose_graphs(const BipartiteGraph& g1, const BipartiteGraph& g2);

struct PFData {
    Real norm;
    std::vector<Real> even_weights, odd_weights;  // weight(basepoint) = 1
    Real residual;                                // final eigen-equation residual
};

// Perron-Frobenius data by power iteration on G^t G; basepoint may be on
// either side.  Throws StructuralError for disconnected graphs, NumericError
// if the iteration fails to converge.
PFData pf_data(const BipartiteGraph& g, const std::string& basepoint, const FieldContext& ctx);

struct Lemma1Report {
    std::vector<std::string> matrices;  // names of the four matrices
    std::vector<long> minima;           // entrywise minimum of each (exact integers)
    bool pass = false;
};

// Entrywise positivity of GG^t-1, GG^tG-2G, (GG^t)^2-3GG^t+1,
// (GG^t)^2G-4GG^tG+3G, computed in exact integer arithmetic.
Lemma1Report lemma1_positivity(const BipartiteGraph& g);

struct StringDimProfile {
    size_t length = 0;
    std::vector<std::pair<std::string, long>> blocks;  // endpoint -> path count (nonzero only)
    long total_dim = 0;                                // sum of squared path counts
};

StringDimProfile string_dim(const BipartiteGraph& g, const std::string& basepoint, size_t length);

// Bipartite isomorphism respecting multiplicities (even->even, odd->odd).
// Brute-force with degree-profile pruning; intended for graphs <= 20 vertices.
struct GraphIso {
    std::vector<size_t> even_map, odd_map;  // g1 index -> g2 index
};
std::optional<GraphIso> find_isomorphism(const BipartiteGraph& g1, const BipartiteGraph& g2);

}  // namespace conncalc
