#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fdg/baseline.hpp"
#include "test_support.hpp"

using namespace fdg;
using namespace testing_support;

namespace {

// Lexicographically smallest minimiser over every injective partial map.
EditResult brute_force(const AttributedGraph& g1, const AttributedGraph& g2, const EditCosts& c)
{
    EditResult best;
    best.cost = kInvalidDistance;
    for (const auto& f : all_labellings(g1.order(), g2.order())) {
        const double cost = edit_cost(g1, g2, f, c);
        if (cost < best.cost) {
            best.cost = cost;
            best.labelling = f;
        }
    }
    return best;
}

} // namespace

TEST_CASE("a graph is at edit distance zero from itself")
{
    std::mt19937 rng(3);
    for (const char* preset : {"exact", "squared", "abs"})
        for (int trial = 0; trial < 5; ++trial) {
            const AttributedGraph g = random_ag(rng, 2 + trial, 0.4, 20, 20, false);
            const EditResult r = edit_distance(g, g, edit_costs_preset(preset));
            CHECK(r.cost == 0.0);
        }
}

TEST_CASE("substitution beats deletion plus insertion")
{
    const AttributedGraph a({AttrTuple::of(1)});
    const AttributedGraph b({AttrTuple::of(2)});
    const EditResult r = edit_distance(a, b, edit_costs_preset("exact"));
    CHECK(r.cost == 1.0);
    CHECK(r.labelling == Labelling{0});
}

TEST_CASE("cost presets")
{
    const EditCosts abs = edit_costs_preset("abs");
    CHECK(abs.vertex_subst(AttrTuple::of(0), AttrTuple::of(11)) == 1.0);
    CHECK(abs.vertex_subst(AttrTuple::of(0), AttrTuple::of(10)) == 0.5);
    CHECK(abs.vertex_subst(AttrTuple::of(0), AttrTuple::of(5)) == 0.5);
    CHECK(abs.vertex_subst(AttrTuple::of(0), AttrTuple::of(4.9)) == 0.0);
    const EditCosts sq = edit_costs_preset("squared");
    CHECK(sq.vertex_subst(AttrTuple::of(0), AttrTuple::of(2)) == 0.0);
    CHECK(sq.vertex_subst(AttrTuple::of(0), AttrTuple::of(2.1)) == 1.0);
    CHECK(sq.arc_subst(AttrTuple::of({0.0, 0.0}), AttrTuple::of({1.5, 1.5})) == 1.0);
    CHECK_THROWS_AS(edit_costs_preset("nope"), Error);
}

TEST_CASE("edit distance equals the brute-force minimum")
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = trial % 5, m = (trial / 5) % 5;
        const AttributedGraph g1 = random_ag(rng, n, 0.4, 3, 3, false);
        const AttributedGraph g2 = random_ag(rng, m, 0.4, 3, 3, false);
        for (const char* preset : {"exact", "squared"}) {
            const EditCosts c = edit_costs_preset(preset);
            const EditResult fast = edit_distance(g1, g2, c);
            const EditResult slow = brute_force(g1, g2, c);
            CHECK(fast.cost == slow.cost);
            CHECK(fast.labelling == slow.labelling);
            CHECK(edit_cost(g1, g2, fast.labelling, c) == fast.cost);
        }
    }
}

TEST_CASE("edit distance is symmetric with symmetric costs")
{
    std::mt19937 rng(7);
    const EditCosts c = edit_costs_preset("abs");
    for (int trial = 0; trial < 40; ++trial) {
        const AttributedGraph g1 = random_ag(rng, 1 + trial % 4, 0.5, 20, 20, false);
        const AttributedGraph g2 = random_ag(rng, 1 + (trial / 4) % 4, 0.5, 20, 20, false);
        CHECK(edit_distance(g1, g2, c).cost == edit_distance(g2, g1, c).cost);
    }
}

TEST_CASE("nearest neighbour classification")
{
    std::mt19937 rng(9);
    std::vector<LabelledGraph> refs;
    for (int k = 0; k < 6; ++k)
        refs.push_back({random_ag(rng, 3, 0.5, 30, 30, false), k % 3});
    const EditCosts c = edit_costs_preset("exact");
    for (const auto& r : refs)
        CHECK(knn_classify(r.graph, refs, 1, c).label == r.label);

    // Every reference is the same distance away, so the lowest label wins.
    const AttributedGraph empty;
    std::vector<LabelledGraph> same{{AttributedGraph({AttrTuple::of(1)}), 2},
                                    {AttributedGraph({AttrTuple::of(2)}), 1},
                                    {AttributedGraph({AttrTuple::of(3)}), 0},
                                    {AttributedGraph({AttrTuple::of(4)}), 2}};
    CHECK(knn_classify(empty, {same.begin(), same.begin() + 3}, 3, c).label == 0);
    // Two votes beat one.
    CHECK(knn_classify(empty, same, 4, c).label == 2);
    CHECK_THROWS_AS(knn_classify(empty, {}, 1, c), Error);
    CHECK_THROWS_AS(knn_classify(empty, same, 0, c), Error);
}

TEST_CASE("ties between equally voted classes go to the smaller mean distance")
{
    const EditCosts c = edit_costs_preset("exact");
    const AttributedGraph test({AttrTuple::of(1), AttrTuple::of(2)});
    std::vector<LabelledGraph> refs{{AttributedGraph({AttrTuple::of(1), AttrTuple::of(2)}), 5},
                                    {AttributedGraph({AttrTuple::of(9)}), 1}};
    CHECK(knn_classify(test, refs, 2, c).label == 5);
}
