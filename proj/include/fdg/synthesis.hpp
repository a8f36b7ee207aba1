#pragma once

#include <vector>

#include "fdg/core.hpp"

namespace fdg {

// One label map per source graph: source vertex -> label in [0, n), or
// kNullTarget for a null source vertex that takes no label.
using CommonLabelling = std::vector<Labelling>;

struct SynthOptions {
    Binning vertex_binning;
    Binning arc_binning;
};

// Places each graph at its label positions inside an extended graph of order n.
std::vector<AttributedGraph> place_sample(const std::vector<AttributedGraph>& d, const CommonLabelling& l, int n);

// Pdfs only, from graphs already placed at common positions.
FirstOrderGraph first_order_from_placed(const std::vector<AttributedGraph>& placed, const SynthOptions& opt = {});

// n < 0 means one more than the largest label used.
Fdg synth_from_labelled_ags(const std::vector<AttributedGraph>& d, const CommonLabelling& l, int n = -1,
                            const SynthOptions& opt = {});
Fdg synth_from_labelled_fdgs(const std::vector<Fdg>& d, const CommonLabelling& l, int n = -1);
Fdg ag_to_fdg(const AttributedGraph& g, const SynthOptions& opt = {});
Fdg update_fdg_with_ag(const AttributedGraph& g, const Fdg& f, const Labelling& mu);

// perm[old] = new; a bijection on [0, n).
Fdg permute_fdg(const Fdg& f, const std::vector<int>& perm);
FirstOrderGraph permute_first_order(const FirstOrderGraph& f, const std::vector<int>& perm);

// Completes a partial injective label map of a source with `source_order`
// vertices into a permutation of [0, n): unlabelled sources take the unused
// labels in ascending order.
std::vector<int> complete_labels(const Labelling& labels, int source_order, int n);

// Throws invalid_labelling unless `labels` is injective on non-null targets
// and every target is below `target_order`.
void check_injective(const Labelling& labels, int target_order);

} // namespace fdg
