#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fdg/core.hpp"

namespace fdg {

inline constexpr double kInvalidDistance = std::numeric_limits<double>::infinity();

struct MatchResult {
    double distance = kInvalidDistance;
    Labelling labelling;
    std::uint64_t explored_nodes = 0;
    std::uint64_t visited_leaves = 0;
    bool valid = false;
    // Nodes whose g + h exceeded the best leaf below them (only with audit on).
    std::uint64_t bound_violations = 0;
};

// Rows are AG vertices, columns FDG vertices plus a last column for the
// null target.
class AllowedMask {
public:
    AllowedMask() = default;
    AllowedMask(int n, int m, bool value = true) : n_(n), m_(m), d_(static_cast<std::size_t>(n) * (m + 1), value ? 1 : 0) {}

    int rows() const { return n_; }
    int fdg_order() const { return m_; }
    // j == kNullTarget addresses the null column.
    bool operator()(int i, int j) const { return d_[index(i, j)] != 0; }
    void set(int i, int j, bool v) { d_[index(i, j)] = v ? 1 : 0; }
    // True when every entry of *this is also allowed in `other`.
    bool subset_of(const AllowedMask& other) const;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * (m_ + 1) + (j == kNullTarget ? m_ : j); }
    int n_ = 0;
    int m_ = 0;
    std::vector<std::uint8_t> d_;
};

struct SearchOptions {
    bool use_bound = true;
    bool cost_pruning = true;
    bool antagonism_pruning = true;
    const AllowedMask* mask = nullptr;
    // Requires cost_pruning off; compares every node's g + h with its subtree minimum.
    bool audit_bound = false;
};

// -ln p / -ln K_pr for p >= K_pr, else 1.
double probability_cost(double p, double kpr);
double vertex_cost(const AttrTuple& a, const Pdf& p, const Binning& binning, double kpr);
// endpoint_null: one of the FDG arc's endpoints is matched to a null vertex.
double arc_cost(const AttrTuple& b, const Pdf& q, const Binning& binning, bool endpoint_null, double kpr);

enum class Relation { antagonism, occurrence, existence };

// FDG vertices p, q may be kNullTarget (an extension null vertex).
int second_order_vertex_cost(Relation kind, bool ai_null, bool aj_null, int p, int q, const Fdg& f);
// FDG arc slots s, t may be -1 (an extension null arc).
int second_order_arc_cost(Relation kind, bool bm_null, bool bn_null, int s, int t, const Fdg& f);

struct ConstraintSet {
    bool r3 = true;
    bool r4 = true;
    bool r5 = false;
};

struct ConstraintFlags {
    bool r3 = true;
    bool r4 = true;
    bool r5 = true;
    bool all() const { return r3 && r4 && r5; }
};

ConstraintFlags check_constraints(const Labelling& f, const AttributedGraph& g, const Fdg& fdg, ConstraintSet which);

// Sequence of distinct positions is a rotation of an increasing sequence.
bool cyclically_increasing(const std::vector<int>& seq);

struct LabellingEvaluation {
    double vertex_cost = 0.0;
    double arc_cost = 0.0;
    // A_v, A_e, O_v, O_e, E_v, E_e violation counts.
    int second_order[6] = {0, 0, 0, 0, 0, 0};
    double cost = 0.0;
    ConstraintFlags flags;
    // Restricted mode: R3 and R4 (and R5 if planar); relaxed: R5 if planar.
    bool valid = true;
};

LabellingEvaluation evaluate_labelling(const Labelling& f, const AttributedGraph& g, const Fdg& fdg,
                                       const CostWeights& w);
double labelling_cost(const Labelling& f, const AttributedGraph& g, const Fdg& fdg, const CostWeights& w);

MatchResult bnb_distance(const AttributedGraph& g, const Fdg& fdg, const CostWeights& w,
                         const SearchOptions& opt = {});
MatchResult exhaustive_oracle(const AttributedGraph& g, const Fdg& fdg, const CostWeights& w,
                              const AllowedMask* mask = nullptr);

std::uint64_t count_labellings(int n, int m);
std::uint64_t count_search_nodes(int n, int m);

} // namespace fdg
