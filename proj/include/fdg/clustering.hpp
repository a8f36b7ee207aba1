#pragma once

#include <functional>
#include <vector>

#include "fdg/baseline.hpp"
#include "fdg/core.hpp"
#include "fdg/matching.hpp"

namespace fdg {

struct ExtendedPair {
    AttributedGraph g;
    Fdg f;
    Labelling mu;
};

struct ExtendedFdgPair {
    Fdg source;
    Fdg target;
    Labelling mu;
};

// Pads both sides with null vertices so mu becomes a bijection; unlabelled
// source vertices take the new target nulls in ascending order and the new
// source nulls take the unlabelled target vertices.
ExtendedPair extend_labelling(const AttributedGraph& g, const Fdg& f, const Labelling& mu);
ExtendedFdgPair extend_labelling(const Fdg& source, const Fdg& target, const Labelling& mu);

struct Clustering {
    std::vector<Fdg> fdgs;
    // Input indices feeding each FDG.
    std::vector<std::vector<int>> members;
    // Distance of every accepted join or merge, in order.
    std::vector<double> merge_distances;
};

struct IncrementalConfig {
    CostWeights weights;
    double d_alpha = 0.0;
};

// K3..K8 are forced to zero and the relaxed distance is used.
Clustering incremental_clustering(const std::vector<AttributedGraph>& seq, const IncrementalConfig& cfg);

enum class Linkage { single, complete };

struct AgMatch {
    double distance = 0.0;
    Labelling labelling;
};
using AgMatcher = std::function<AgMatch(const AttributedGraph&, const AttributedGraph&)>;

AgMatcher edit_distance_matcher(EditCosts costs);

struct HierarchicalConfig {
    AgMatcher matcher;  // defaults to edit distance with the "exact" preset
    double d_alpha = 0.0;
    Linkage linkage = Linkage::complete;
    unsigned threads = 1;
};

Clustering hierarchical_clustering(const std::vector<AttributedGraph>& set, const HierarchicalConfig& cfg);

// Merges `source` into `target` under mu (source -> target); the target keeps
// its numbering and unmatched source vertices are appended. `placed` receives
// each source vertex's position in the result.
Fdg merge_into(const Fdg& source, const Fdg& target, const Labelling& mu, Labelling* placed = nullptr);

} // namespace fdg
