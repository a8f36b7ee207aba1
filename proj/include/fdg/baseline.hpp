#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fdg/core.hpp"

namespace fdg {

using SubstitutionCost = std::function<double(const AttrTuple&, const AttrTuple&)>;

struct EditCosts {
    double vertex_insert = 1.0;
    double arc_insert = 1.0;
    double vertex_delete = 1.0;
    double arc_delete = 1.0;
    SubstitutionCost vertex_subst;
    SubstitutionCost arc_subst;

    void validate() const;
};

// Named presets: "exact" (0 on equal attributes, else 1), "squared"
// (1 when the squared difference exceeds 4), "abs" (1 above 10, 1/2 from 5
// to 10, else 0).
EditCosts edit_costs_preset(const std::string& name);
double euclidean_difference(const AttrTuple& a, const AttrTuple& b);

struct EditResult {
    double cost = 0.0;
    // G1 vertex -> G2 vertex or kNullTarget (deleted).
    Labelling labelling;
    std::uint64_t explored_nodes = 0;
};

// Cost of one complete labelling; unmatched elements of G2 are inserted.
double edit_cost(const AttributedGraph& g1, const AttributedGraph& g2, const Labelling& f, const EditCosts& c);
EditResult edit_distance(const AttributedGraph& g1, const AttributedGraph& g2, const EditCosts& c);

struct LabelledGraph {
    AttributedGraph graph;
    int label = 0;
};

struct KnnResult {
    int label = 0;
    std::vector<std::pair<double, int>> neighbours;  // (distance, reference index)
};

KnnResult knn_classify(const AttributedGraph& test, const std::vector<LabelledGraph>& refs, int k,
                       const EditCosts& c);

} // namespace fdg
