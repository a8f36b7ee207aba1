#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "fdg/harness.hpp"
#include "fdg/io.hpp"
#include "fdg/synthesis.hpp"
#include "test_support.hpp"

using namespace fdg;
using namespace testing_support;

namespace {

int arc_count(const AttributedGraph& g)
{
    int c = 0;
    for (const auto& [ij, b] : g.arcs)
        c += !b.is_null;
    return c;
}

// Four faces, two of them touching the other two: a disjoint planar view.
AttributedGraph two_pairs_view()
{
    AttributedGraph g({AttrTuple::of(11), AttrTuple::of(5), AttrTuple::of(11), AttrTuple::of(13)});
    g.add_arc(0, 1, AttrTuple::of(3));
    g.add_arc(1, 0, AttrTuple::of(3));
    g.add_arc(2, 3, AttrTuple::of(3));
    g.add_arc(3, 2, AttrTuple::of(3));
    return g;
}

} // namespace

TEST_CASE("generated models have the requested shape")
{
    GeneratorConfig cfg;
    cfg.n_fdg = 2;
    cfg.nv = 5;
    cfg.ne = 10;
    cfg.nd = cfg.nl = 0;
    cfg.nt = 0;
    const auto models = generate_models(cfg);
    REQUIRE(models.size() == 2);
    for (const auto& g : models) {
        CHECK(g.order() == 5);
        CHECK(arc_count(g) == 10);
        for (const auto& v : g.vertices)
            CHECK((v.values[0] >= 0 && v.values[0] <= 999 && v.values[0] == std::floor(v.values[0])));
        for (const auto& [ij, b] : g.arcs)
            CHECK((b.values[0] >= 0 && b.values[0] <= 999));
        g.validate();
    }
    CHECK(generate_models(cfg) == models);
    cfg.ne = 20;
    for (const auto& g : generate_models(cfg))
        CHECK(arc_count(g) == 20);
    cfg.ne = 21;
    CHECK_THROWS_AS(generate_models(cfg), Error);
    cfg.ne = 10;
    cfg.nd = 4;
    cfg.nl = 2;
    CHECK_THROWS_AS(generate_models(cfg), Error);
}

TEST_CASE("delete/distort perturbation")
{
    GeneratorConfig cfg;
    cfg.n_fdg = 1;
    cfg.nt = 0;
    const AttributedGraph model = generate_models(cfg)[0];
    CHECK(perturb(model, DeleteDistort{0, 0}, 4).graph == model);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Perturbed p = perturb(model, DeleteDistort{21, 2}, seed);
        CHECK(p.graph.non_null_vertex_count() == 6);
        int unchanged = 0;
        for (int v = 0; v < model.order(); ++v)
            unchanged += !p.graph.vertices[v].is_null && p.graph.vertices[v] == model.vertices[v];
        CHECK(unchanged == 4);
        for (const auto& [ij, b] : p.graph.arcs) {
            CHECK(!p.graph.vertices[ij.first].is_null);
            CHECK(!p.graph.vertices[ij.second].is_null);
            CHECK(model.arc(ij.first, ij.second) != nullptr);
        }
        CHECK(p.origin == identity_labels(p.graph));
        p.graph.validate();
    }

    const Perturbed all = perturb(model, DeleteDistort{0, model.order()}, 9);
    CHECK(all.graph.arcs == model.arcs);
    for (int v = 0; v < model.order(); ++v)
        CHECK(all.graph.vertices[v] != model.vertices[v]);
    CHECK_THROWS_AS(perturb(model, DeleteDistort{20, 8}, 0), Error);
    CHECK(perturb(model, DeleteDistort{3, 3}, 7).graph == perturb(model, DeleteDistort{3, 3}, 7).graph);
}

TEST_CASE("gaussian perturbation")
{
    std::mt19937 rng(31);
    const AttributedGraph g = random_ag(rng, 6, 0.4, 50, 50, true);
    CHECK(perturb(g, GaussianNoise{0.0, 0}, 1).graph == g);

    const Perturbed noisy = perturb(g, GaussianNoise{2.0, 0}, 1);
    CHECK(noisy.graph.order() == g.order());
    CHECK(noisy.graph.arc_order == g.arc_order);
    CHECK(noisy.graph.vertices != g.vertices);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Perturbed p = perturb(g, GaussianNoise{0.0, 1}, seed);
        CHECK(std::abs(p.graph.order() - g.order()) == 1);
        p.graph.validate();
        // Surviving vertices keep their attributes and arcs.
        for (int v = 0; v < p.graph.order(); ++v)
            if (p.origin[v] != kNullTarget)
                CHECK(p.graph.vertices[v] == g.vertices[p.origin[v]]);
        for (const auto& [ij, b] : p.graph.arcs) {
            const int a = p.origin[ij.first], c = p.origin[ij.second];
            if (a != kNullTarget && c != kNullTarget)
                CHECK(*g.arc(a, c) == b);
        }
    }
    CHECK_THROWS_AS(perturb(g, GaussianNoise{-1.0, 0}, 0), Error);
}

TEST_CASE("pdf smoothing")
{
    const Pdf spike = Pdf::from_probabilities(0.0, {{5, 1.0}});
    const Pdf s = smooth_pdf(spike);
    CHECK(s.prob({5}) == doctest::Approx(0.5));
    CHECK(s.prob({4}) == doctest::Approx(0.25));
    CHECK(s.prob({6}) == doctest::Approx(0.25));

    const Pdf uniform = Pdf::from_probabilities(0.0, {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}});
    const Pdf u = smooth_pdf(uniform, 4);
    for (long b = 0; b < 4; ++b)
        CHECK(u.prob({b}) == doctest::Approx(0.25));
    // Wrapping moves mass from the first bin to the last.
    CHECK(smooth_pdf(Pdf::from_probabilities(0.0, {{0, 1.0}}), 4).prob({3}) == doctest::Approx(0.25));

    std::mt19937 rng(32);
    std::uniform_real_distribution<double> mass(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Pdf p;
        p.add_null(mass(rng));
        for (int k = 0; k < 5; ++k)
            p.add({static_cast<long>(rng() % 20)}, mass(rng));
        const Pdf q = smooth_pdf(p, trial % 2 ? 20 : 0);
        CHECK(q.support() == p.support());
        CHECK(q.null_mass() == p.null_mass());
        CHECK(q.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("classifier basics")
{
    std::mt19937 rng(33);
    std::vector<Fdg> models;
    std::vector<AttributedGraph> graphs;
    for (int k = 0; k < 4; ++k) {
        graphs.push_back(random_ag(rng, 3, 0.5, 100, 100, false));
        models.push_back(ag_to_fdg(graphs.back()));
    }
    const CostWeights w;
    const Classification c = fdg_classify(graphs[2], models, w, {});
    CHECK(c.model == 2);
    CHECK(c.distance == 0.0);
    CHECK(fdg_classify(graphs[1], {models[3]}, w, {}).model == 0);
    CHECK_THROWS_AS(fdg_classify(graphs[0], {}, w, {}), Error);

    // Duplicate models tie; the lower index wins.
    CHECK(fdg_classify(graphs[1], {models[1], models[1]}, w, {}).model == 0);
}

TEST_CASE("classification is invariant under positive rescaling of the weights")
{
    std::mt19937 rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Fdg> models;
        for (int k = 0; k < 3; ++k)
            models.push_back(random_fdg(rng, 3, 3, false).fdg);
        const AttributedGraph g = random_ag(rng, 3, 0.5, 4, 3, false);
        CostWeights w;
        w.k3 = 0.5;
        w.k5 = 0.25;
        const Classification a = fdg_classify(g, models, w, {});
        for (double factor : {0.5, 3.0, 10.0}) {
            const Classification b = fdg_classify(g, models, w.scaled(factor), {});
            CHECK(a.model == b.model);
            CHECK(b.distance == doctest::Approx(a.distance * factor));
        }
    }
}

TEST_CASE("experiments")
{
    ExperimentConfig cfg;
    cfg.gen.n_fdg = 3;
    cfg.gen.nt = 6;
    cfg.gen.nv = 6;
    cfg.gen.ne = 12;
    cfg.gen.nd = 0;
    cfg.gen.nl = 0;
    cfg.gen.nr = 1;
    cfg.gen.seed = 5;
    const ExperimentReport clean = run_experiment(cfg);
    CHECK(clean.correctness == 1.0);
    CHECK(clean.mean_antagonisms == 0.0);
    for (std::size_t k = 0; k < clean.confusion.size(); ++k) {
        int row = 0;
        for (int x : clean.confusion[k])
            row += x;
        CHECK(row == 2);
    }

    cfg.gen.nd = 2;
    cfg.gen.nl = 1;
    cfg.gen.nr = 1;
    cfg.repetitions = 2;
    CHECK(run_experiment(cfg).mean_antagonisms == 0.0);

    cfg.gen.nr = 4;
    cfg.noise = {1.0, 1};
    const ExperimentReport a = run_experiment(cfg);
    cfg.threads = 3;
    const ExperimentReport b = run_experiment(cfg);
    CHECK(a.correctness == b.correctness);
    CHECK(a.confusion == b.confusion);
    CHECK(a.mean_nodes == b.mean_nodes);
    CHECK(a.mean_antagonisms == b.mean_antagonisms);
    CHECK(a.correctness >= 0.0);
    CHECK(a.correctness <= 1.0);

    // Noise-free copies of reference views are always recognised.
    ExperimentConfig views = cfg;
    views.noise = {};
    views.view_tests = true;
    views.gen.nr = 2;
    views.threads = 1;
    const ExperimentReport v = run_experiment(views);
    CHECK(v.correctness == 1.0);
    CHECK(v.comparisons == 2 * 6 * 3);

    const std::string row = csv_row(a), header = csv_header();
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
    CHECK(row.rfind("optimal,4,1,1,", 0) == 0);
}

TEST_CASE("attributed graph text round trip")
{
    const AttributedGraph view = two_pairs_view();
    const std::string text = format_ag(view);
    CHECK(text == "4\n11 5 11 13\n- 3 - -\n3 - - -\n- - - 3\n- - 3 -\n");
    CHECK(parse_ag(text) == view);

    std::mt19937 rng(35);
    for (int trial = 0; trial < 60; ++trial) {
        AttributedGraph g = random_ag(rng, trial % 7, 0.4, 30, 30, trial % 2 == 0);
        if (trial % 3 == 0 && g.order() > 0) {
            g = perturb(g, GaussianNoise{1.5, 0}, trial).graph;
            g = extend_ag(g, g.order() + 2);
        }
        CHECK(parse_ag(format_ag(g)) == g);
    }
    AttributedGraph multi({AttrTuple::of({1.5, -2.0}), AttrTuple::of({0.1, 3.0})});
    multi.add_arc(1, 0, AttrTuple::of({7.0}));
    CHECK(parse_ag(format_ag(multi)) == multi);
}

TEST_CASE("attributed graph parse errors carry a location")
{
    auto error_at = [](const std::string& text) -> std::pair<int, int> {
        try {
            parse_ag(text);
        } catch (const ParseError& e) {
            return {e.line(), e.column()};
        }
        return {0, 0};
    };
    CHECK(error_at("2\n1 2\n- 4\n") == std::pair{4, 1});
    CHECK(error_at("2\n1 x\n- 4\n- -\n") == std::pair{2, 3});
    CHECK(error_at("2\n1 2\n4 -\n- -\n") == std::pair{3, 1});
    CHECK(error_at("2\n1 2 3\n") == std::pair{2, 5});
    CHECK(error_at("") == std::pair{1, 1});
    CHECK(error_at("1\n-\n-\n") == std::pair{3, 2});
    CHECK(error_at("1\n5\n-\nbogus\n") == std::pair{4, 1});
    CHECK(error_at("2\n1 2\n- 3\n- -\nordered\norder 0: 0\norder 1:\n") != std::pair{0, 0});
}

TEST_CASE("fdg text round trip")
{
    std::mt19937 rng(36);
    for (int trial = 0; trial < 40; ++trial) {
        const SampledFdg s = random_fdg(rng, 1 + trial % 5, 1 + trial % 4, trial % 2 == 1);
        CHECK(parse_fdg(format_fdg(s.fdg)) == s.fdg);
    }
    // Fractional masses survive exactly.
    const SampledFdg s = random_fdg(rng, 3, 3, false);
    const Fdg f = update_fdg_with_ag(random_ag(rng, 2, 0.5, 4, 3, false), s.fdg, {0, kNullTarget});
    Fdg g = f;
    g.vertex_pdfs[0] = smooth_pdf(f.vertex_pdfs[0]);
    CHECK(parse_fdg(format_fdg(g)) == g);

    const std::string text = format_fdg(s.fdg);
    for (std::size_t cut : {std::size_t{0}, text.size() / 3, text.size() - 5})
        CHECK_THROWS_AS(parse_fdg(text.substr(0, cut)), ParseError);
    CHECK_THROWS_AS(parse_fdg(text + "extra\n"), ParseError);

    const auto dir = std::filesystem::temp_directory_path() / "fdg_io_test";
    std::filesystem::create_directories(dir);
    write_fdg((dir / "f.fdg").string(), s.fdg);
    CHECK(read_fdg((dir / "f.fdg").string()) == s.fdg);
    write_ag((dir / "g.ag").string(), two_pairs_view());
    CHECK(read_ag((dir / "g.ag").string()) == two_pairs_view());
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(read_ag((dir / "missing.ag").string()), Error);
}
