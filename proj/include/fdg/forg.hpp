#pragma once

#include <utility>

#include "fdg/core.hpp"
#include "fdg/synthesis.hpp"

namespace fdg {

Forg forg_from_ag(const AttributedGraph& g, const SynthOptions& opt = {});
Forg forg_from_fdg(const Fdg& f);

double forg_entropy(const FirstOrderGraph& r);

// mu maps R1 vertices onto R2 vertices (or the null target); R2 keeps its
// numbering and unmatched R1 vertices are appended.
Forg forg_synthesize(const FirstOrderGraph& r1, const FirstOrderGraph& r2, const Labelling& mu);

struct ForgDistance {
    double distance = 0.0;
    Labelling labelling;
};

// Weighted entropy increment, minimised by exhaustive search over labellings.
double forg_entropy_increment(const FirstOrderGraph& r1, const FirstOrderGraph& r2, const Labelling& mu);
ForgDistance forg_distance(const FirstOrderGraph& r1, const FirstOrderGraph& r2);

// G must have the same order as R; mu is a permutation of R's vertices.
double outcome_probability(const FirstOrderGraph& r, const AttributedGraph& g, const Labelling& mu);

} // namespace fdg
