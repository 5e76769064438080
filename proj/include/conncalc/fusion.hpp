#pragma once

#include "conncalc/gauge.hpp"
#include "conncalc/io.hpp"

namespace conncalc {

// Registry of pairwise-inequivalent irreducible connections with stable ids.
class ClassRegistry {
  public:
    struct Entry {
        std::string id;
        Connection rep;
        Real dim;
    };

    ClassRegistry(const FieldContext& ctx, Rng& rng, std::string prefix)
        : ctx_(ctx), rng_(rng), prefix_(std::move(prefix)) {}

    // index of the class of c, adding a new entry when unseen
    size_t find_or_add(const Connection& c);
    std::optional<size_t> find(const Connection& c);
    const Entry& entry(size_t i) const { return entries_[i]; }
    size_t size() const { return entries_.size(); }

  private:
    const FieldContext& ctx_;
    Rng& rng_;
    std::string prefix_;
    std::vector<Entry> entries_;
};

// integer combination of class ids
using FormalSum = std::map<std::string, long>;

bool is_positive(const FormalSum& s);
long inner_product(const FormalSum& x, const FormalSum& y);

struct ConditionResult {
    std::string name;
    bool pass = false;
    Real residual;
    std::string detail;
};

struct VerifyReport {
    std::vector<ConditionResult> conditions;
    bool pass() const;
};

// Proposition 1 (sqrt13): six indecomposable pairwise-inequivalent N-N
// connections, four irreducible pairwise-inequivalent N-M connections,
// and sigma(aa~-1) = (aa~-1) sigma^2 up to vertical gauge.
VerifyReport verify_lemma2_hypotheses(const CaseBundle& b, const FieldContext& ctx, Rng& rng);

// Proposition 2 (sqrt17): the eight/six class lists and
// sigma(aa~-1) sigma alpha = (aa~-1) sigma alpha.
VerifyReport verify_lemma3_hypotheses(const CaseBundle& b, const FieldContext& ctx, Rng& rng);

// index/dimension identities checked numerically
VerifyReport index_identity_checks(const CaseBundle& b, const FieldContext& ctx, Rng& rng);

struct FusionGraphResult {
    BipartiteGraph graph;  // even classes x odd classes
    std::vector<Real> even_dims, odd_dims;
    bool finite_depth = true;
    size_t depth_reached = 0;
    Real dim_residual;         // worst |d(ab) - d(a)d(b)| style deviation seen
    bool frobenius_symmetric = true;
};

FusionGraphResult fusion_graph(const Connection& generator, size_t max_depth,
                               const FieldContext& ctx, Rng& rng);

// consolidated verify pipeline (proposition + lemma 1 + fusion graph +
// index identities); deterministic for fixed (case, precision, seed)
Json verify_case_report(CaseId cid, const FieldContext& ctx, uint64_t seed);

}  // namespace conncalc
