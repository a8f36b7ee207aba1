#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "fdg/efficient.hpp"
#include "test_support.hpp"

using namespace fdg;
using namespace testing_support;

namespace {

CyclicCosts random_costs(std::mt19937& rng, int rows, int cols)
{
    std::uniform_real_distribution<double> u(0.0, 2.0);
    CyclicCosts c;
    c.central = u(rng) / 2;
    for (int l = 0; l < rows; ++l)
        c.insert.push_back(u(rng));
    for (int k = 0; k < cols; ++k)
        c.remove.push_back(u(rng) / 2);
    for (int x = 0; x < rows * cols; ++x)
        c.subst.push_back(u(rng));
    return c;
}

struct Pair {
    AttributedGraph g;
    Fdg f;
};

Pair random_pair(std::mt19937& rng, int n, int m, double arc_p = 0.5)
{
    std::uniform_int_distribution<int> zd(1, 4);
    return {random_ag(rng, n, arc_p, 4, 3, false), random_fdg(rng, m, zd(rng), false, 4, 3, arc_p).fdg};
}

double row_sum(const ProbMatrix& p, int i)
{
    double s = 0.0;
    for (int a = 0; a <= p.m; ++a)
        s += p(i, a);
    return s;
}

} // namespace

TEST_CASE("splitting a star puts every arc in the centre's expanded vertex")
{
    AttributedGraph star({AttrTuple::of(0), AttrTuple::of(1), AttrTuple::of(1), AttrTuple::of(1)});
    for (int j = 1; j <= 3; ++j)
        star.add_arc(0, j, AttrTuple::of(j));
    const auto evs = split_into_expanded_vertices(star);
    REQUIRE(evs.size() == 4);
    CHECK(evs[0].externals == std::vector<int>{1, 2, 3});
    for (int j = 1; j <= 3; ++j)
        CHECK(evs[j].externals.empty());
}

TEST_CASE("splitting a complete digraph covers every arc once")
{
    AttributedGraph g({AttrTuple::of(0), AttrTuple::of(1), AttrTuple::of(2)});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j)
                g.add_arc(i, j, AttrTuple::of(0));
    std::set<std::pair<int, int>> covered;
    int total = 0;
    for (const auto& ev : split_into_expanded_vertices(g)) {
        CHECK(ev.externals.size() == 2);
        for (int x : ev.externals) {
            covered.insert({ev.center, x});
            ++total;
        }
    }
    CHECK(total == 6);
    CHECK(covered.size() == 6);

    const auto ews = split_into_expanded_vertices(ag_to_fdg(g));
    for (const auto& ew : ews)
        CHECK(ew.externals.size() == 2);
}

TEST_CASE("FDG expanded vertices follow the stored arc order")
{
    AttributedGraph g({AttrTuple::of(0), AttrTuple::of(1), AttrTuple::of(2), AttrTuple::of(3)});
    g.add_arc(0, 1, AttrTuple::of(0));
    g.add_arc(0, 2, AttrTuple::of(0));
    g.add_arc(0, 3, AttrTuple::of(0));
    g.arc_order = ArcOrder{{3, 1, 2}, {}, {}, {}};
    CHECK(split_into_expanded_vertices(g)[0].externals == std::vector<int>{3, 1, 2});
    CHECK(split_into_expanded_vertices(ag_to_fdg(g))[0].externals == std::vector<int>{3, 1, 2});
}

TEST_CASE("maximum expanded-vertex distance")
{
    CHECK(expanded_max_distance(1, 1) == 1.0);
    CHECK(expanded_max_distance(4, 2) == 7.0);
    CHECK(expanded_max_distance(2, 4) == 5.0);
    CHECK_THROWS_AS(expanded_max_distance(0, 2), Error);
}

TEST_CASE("trivial expanded vertex distances")
{
    AttributedGraph one({AttrTuple::of(2)});
    const Fdg f1 = ag_to_fdg(one);
    CostWeights w;
    CHECK(expanded_vertex_distance(one, {0, {}}, f1, {0, {}}, w) == 0.0);

    std::mt19937 rng(5);
    const Fdg f = random_fdg(rng, 4, 3, false, 4, 3, 0.9).fdg;
    const auto ews = split_into_expanded_vertices(f);
    for (const auto& ew : ews) {
        if (f.vertex_pdfs[ew.center].always_null())
            continue;
        const CyclicCosts c = expanded_vertex_costs(one, {0, {}}, f, ew, w);
        const double expected = std::accumulate(c.remove.begin(), c.remove.end(), c.central);
        CHECK(expanded_vertex_distance(one, {0, {}}, f, ew, w) == doctest::Approx(expected).epsilon(1e-15));
        for (std::size_t k = 0; k < ew.externals.size(); ++k)
            CHECK(c.remove[k] ==
                  doctest::Approx(probability_cost(f.vertex_pdfs[ew.externals[k]].prob_null(), w.kpr)));
    }
}

TEST_CASE("cyclic string distance equals the brute-force rotation and alignment minimum")
{
    std::mt19937 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const CyclicCosts c = random_costs(rng, trial % 6, (trial / 6) % 6);
        CHECK(cyclic_string_distance(c) == brute_force_cyclic(c));
    }
    for (int trial = 0; trial < 200; ++trial) {
        const Pair p = random_pair(rng, 1 + trial % 6, 1 + (trial / 6) % 6, 0.7);
        const auto evs = split_into_expanded_vertices(p.g);
        const auto ews = split_into_expanded_vertices(p.f);
        for (const auto& ev : evs)
            for (const auto& ew : ews) {
                if (p.f.vertex_pdfs[ew.center].always_null())
                    continue;
                const CyclicCosts c = expanded_vertex_costs(p.g, ev, p.f, ew, CostWeights{});
                CHECK(expanded_vertex_distance(p.g, ev, p.f, ew, CostWeights{}) == brute_force_cyclic(c));
            }
    }
}

TEST_CASE("rotating the FDG string leaves the distance unchanged")
{
    std::mt19937 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        CyclicCosts c = random_costs(rng, 1 + trial % 5, 1 + (trial / 5) % 5);
        const double base = cyclic_string_distance(c);
        const int rows = c.rows(), cols = c.cols();
        CyclicCosts r = c;
        for (int k = 0; k < cols; ++k) {
            r.remove[k] = c.remove[(k + 1) % cols];
            for (int l = 0; l < rows; ++l)
                r.subst[l * cols + k] = c.subst[l * cols + (k + 1) % cols];
        }
        CHECK(cyclic_string_distance(r) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("expanded vertex distance never exceeds its maximum")
{
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Pair p = random_pair(rng, 2 + trial % 5, 2 + (trial / 5) % 5, 0.6);
        const auto evs = split_into_expanded_vertices(p.g);
        const auto ews = split_into_expanded_vertices(p.f);
        for (const auto& ev : evs)
            for (const auto& ew : ews) {
                if (p.f.vertex_pdfs[ew.center].always_null())
                    continue;
                const double d = expanded_vertex_distance(p.g, ev, p.f, ew, CostWeights{});
                CHECK(d >= 0.0);
                CHECK(d <= expanded_max_distance(ev.size(), ew.size()) + 1e-12);
            }
    }
}

TEST_CASE("forbid matrix thresholds")
{
    std::mt19937 rng(29);
    const Pair p = random_pair(rng, 5, 5);
    for (const auto& row : forbid_matrix(p.g, p.f, 1.0, CostWeights{}))
        for (bool x : row)
            CHECK_FALSE(x);

    const AttributedGraph g = random_ag(rng, 5, 0.5, 6, 6, false);
    const auto identical = forbid_matrix(g, ag_to_fdg(g), 0.0, CostWeights{});
    for (int i = 0; i < 5; ++i)
        CHECK_FALSE(identical[i][i]);
    CHECK_THROWS_AS(forbid_matrix(g, ag_to_fdg(g), 1.5, CostWeights{}), Error);

    // Lowering tau only forbids more.
    for (int trial = 0; trial < 20; ++trial) {
        const Pair q = random_pair(rng, 4, 4);
        const auto loose = forbid_matrix(q.g, q.f, 0.6, CostWeights{});
        const auto tight = forbid_matrix(q.g, q.f, 0.3, CostWeights{});
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (loose[i][j])
                    CHECK(tight[i][j]);
    }
}

TEST_CASE("relaxation initialisation and updates keep rows normalised")
{
    std::mt19937 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const Pair p = random_pair(rng, 2 + trial % 4, 2 + (trial / 4) % 4);
        for (RelaxInit init : {RelaxInit::vertex, RelaxInit::expanded}) {
            ProbMatrix m = initial_probabilities(p.g, p.f, init, CostWeights{});
            for (int t = 0; t < 5; ++t) {
                for (int i = 0; i < m.n; ++i)
                    CHECK(row_sum(m, i) == doctest::Approx(1.0).epsilon(1e-9));
                m = relaxation_step(p.g, p.f, m, CostWeights{});
            }
            CHECK(m.iterations == 5);
        }
    }
}

TEST_CASE("zero iterations return the initialisation")
{
    std::mt19937 rng(37);
    const Pair p = random_pair(rng, 4, 4);
    RelaxOptions opt;
    opt.max_iterations = 0;
    const ProbMatrix r = relax_probabilities(p.g, p.f, opt, CostWeights{});
    CHECK(r.iterations == 0);
    CHECK(r.p == initial_probabilities(p.g, p.f, RelaxInit::vertex, CostWeights{}).p);
}

TEST_CASE("equal vertex costs give uniform rows and isolated vertices never move")
{
    AttributedGraph g({AttrTuple::of(5), AttrTuple::of(1), AttrTuple::of(2)});
    g.add_arc(1, 2, AttrTuple::of(0));
    AttributedGraph h({AttrTuple::of(1), AttrTuple::of(2)});
    h.add_arc(0, 1, AttrTuple::of(0));
    const Fdg f = ag_to_fdg(h);
    const ProbMatrix init = initial_probabilities(g, f, RelaxInit::vertex, CostWeights{});
    // Vertex 0 matches nothing, so every column costs 1.
    for (int a = 0; a <= 2; ++a)
        CHECK(init(0, a) == doctest::Approx(1.0 / 3.0));
    ProbMatrix m = init;
    for (int t = 0; t < 4; ++t)
        m = relaxation_step(g, f, m, CostWeights{});
    for (int a = 0; a <= 2; ++a)
        CHECK(m(0, a) == doctest::Approx(init(0, a)).epsilon(1e-15));
    // Vertex 1 has a neighbour and gains support for its consistent match.
    CHECK(m(1, 0) > init(1, 0));
}

TEST_CASE("probability masks keep the argmax and the null column")
{
    ProbMatrix p;
    p.n = 2;
    p.m = 2;
    p.p = {0.2, 0.5, 0.3, 0.6, 0.3, 0.1};
    const AllowedMask mask = mask_from_probabilities(p, 0.95);
    CHECK(mask(0, 1));
    CHECK_FALSE(mask(0, 0));
    CHECK(mask(0, kNullTarget));
    CHECK(mask(1, 0));
    CHECK_FALSE(mask(1, 1));
    const AllowedMask all = mask_from_probabilities(p, 0.0);
    for (int i = 0; i < 2; ++i)
        for (int j : {0, 1, kNullTarget})
            CHECK(all(i, j));
}

TEST_CASE("sub-optimal distances reach the optimum at the loosest settings")
{
    std::mt19937 rng(41);
    CostWeights w;
    for (int trial = 0; trial < 40; ++trial) {
        const Pair p = random_pair(rng, 2 + trial % 4, 2 + (trial / 4) % 4);
        const MatchResult best = bnb_distance(p.g, p.f, w);
        SuboptimalMethod noniter;
        noniter.tau = 1.0;
        CHECK(suboptimal_distance(p.g, p.f, w, noniter).distance == best.distance);
        SuboptimalMethod rv{SuboptimalMethod::relax_vertex, 1.0, 0.0, 20};
        CHECK(suboptimal_distance(p.g, p.f, w, rv).distance == best.distance);
        SuboptimalMethod re{SuboptimalMethod::relax_expanded, 1.0, 0.0, 20};
        CHECK(suboptimal_distance(p.g, p.f, w, re).distance == best.distance);
    }
}

TEST_CASE("tightening the thresholds never lowers the distance")
{
    std::mt19937 rng(43);
    CostWeights w;
    for (int trial = 0; trial < 30; ++trial) {
        const Pair p = random_pair(rng, 3 + trial % 3, 3 + (trial / 3) % 3);
        const double best = bnb_distance(p.g, p.f, w).distance;
        double previous = best;
        for (double tau : {1.0, 0.8, 0.6, 0.4, 0.2, 0.0}) {
            const double d = suboptimal_distance(p.g, p.f, w, {SuboptimalMethod::noniter, tau, 0.0, 20}).distance;
            CHECK(d >= previous);
            previous = d;
        }
        for (auto kind : {SuboptimalMethod::relax_vertex, SuboptimalMethod::relax_expanded}) {
            previous = best;
            for (double tp : {0.0, 0.05, 0.1, 0.2, 0.5, 1.0}) {
                const MatchResult r = suboptimal_distance(p.g, p.f, w, {kind, 1.0, tp, 20});
                CHECK(r.valid);
                CHECK(r.distance >= previous);
                previous = r.distance;
            }
        }
    }
}
