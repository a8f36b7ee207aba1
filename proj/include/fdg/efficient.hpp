#pragma once

#include <vector>

#include "fdg/core.hpp"
#include "fdg/matching.hpp"

namespace fdg {

// Central vertex plus the targets of its outgoing arcs, in cyclic order.
struct ExpandedVertex {
    int center = 0;
    std::vector<int> externals;

    int size() const { return 1 + static_cast<int>(externals.size()); }
    bool operator==(const ExpandedVertex& o) const = default;
};

std::vector<ExpandedVertex> split_into_expanded_vertices(const AttributedGraph& g);
// FDG arcs count as outgoing when they are not always null.
std::vector<ExpandedVertex> split_into_expanded_vertices(const Fdg& f);

double expanded_max_distance(int n, int m);

// Edit costs of one (AG string, FDG string) pair. `subst` is n' x m' row-major.
struct CyclicCosts {
    double central = 0.0;
    std::vector<double> insert;
    std::vector<double> remove;
    std::vector<double> subst;

    int rows() const { return static_cast<int>(insert.size()); }
    int cols() const { return static_cast<int>(remove.size()); }
};

// Minimum over rotations of the AG string of the Levenshtein alignment cost,
// plus the central cost.
double cyclic_string_distance(const CyclicCosts& c);

CyclicCosts expanded_vertex_costs(const AttributedGraph& g, const ExpandedVertex& ev, const Fdg& f,
                                  const ExpandedVertex& ew, const CostWeights& w);
double expanded_vertex_distance(const AttributedGraph& g, const ExpandedVertex& ev, const Fdg& f,
                                const ExpandedVertex& ew, const CostWeights& w);

// n x m, true where the normalised local distance exceeds tau.
std::vector<std::vector<bool>> forbid_matrix(const AttributedGraph& g, const Fdg& f, double tau,
                                             const CostWeights& w);
// The null column is always allowed.
AllowedMask mask_from_forbid(const std::vector<std::vector<bool>>& forbid, int m);

enum class RelaxInit { vertex, expanded };

struct RelaxOptions {
    RelaxInit init = RelaxInit::vertex;
    int max_iterations = 20;
    double tolerance = 1e-3;
};

// Rows are AG vertices, columns FDG vertices plus the null vertex last.
struct ProbMatrix {
    int n = 0;
    int m = 0;
    int iterations = 0;
    std::vector<double> p;

    double operator()(int i, int a) const { return p[static_cast<std::size_t>(i) * (m + 1) + a]; }
    double& at(int i, int a) { return p[static_cast<std::size_t>(i) * (m + 1) + a]; }
};

ProbMatrix initial_probabilities(const AttributedGraph& g, const Fdg& f, RelaxInit init, const CostWeights& w);
// One synchronous update of every row.
ProbMatrix relaxation_step(const AttributedGraph& g, const Fdg& f, const ProbMatrix& p, const CostWeights& w);
ProbMatrix relax_probabilities(const AttributedGraph& g, const Fdg& f, const RelaxOptions& opt,
                               const CostWeights& w);

// Entries with P >= tp, each row's argmax, and the null column.
AllowedMask mask_from_probabilities(const ProbMatrix& p, double tp);

struct SuboptimalMethod {
    enum Kind { noniter, relax_vertex, relax_expanded };
    Kind kind = noniter;
    double tau = 1.0;
    double tp = 0.0;
    int iterations = 20;
};

MatchResult suboptimal_distance(const AttributedGraph& g, const Fdg& f, const CostWeights& w,
                                const SuboptimalMethod& method);

} // namespace fdg
