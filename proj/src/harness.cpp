#include "fdg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fdg/parallel.hpp"
#include "fdg/synthesis.hpp"

namespace fdg {

namespace {

// Independent stream per (seed, path); keeps results the same for any thread count.
std::mt19937_64 stream(std::initializer_list<std::uint64_t> parts)
{
    std::vector<std::uint32_t> words;
    for (std::uint64_t p : parts) {
        words.push_back(static_cast<std::uint32_t>(p));
        words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

double uniform_attribute(std::mt19937_64& rng)
{
    return static_cast<double>(std::uniform_int_distribution<int>(0, kMaxAttribute)(rng));
}

AttrTuple uniform_tuple(std::mt19937_64& rng, std::size_t arity)
{
    std::vector<double> v(arity);
    for (auto& x : v)
        x = uniform_attribute(rng);
    return AttrTuple::of(std::move(v));
}

std::size_t vertex_arity(const AttributedGraph& g)
{
    for (const auto& v : g.vertices)
        if (!v.is_null)
            return v.values.size();
    return 1;
}

std::size_t arc_arity(const AttributedGraph& g)
{
    for (const auto& [ij, b] : g.arcs)
        if (!b.is_null)
            return b.values.size();
    return 1;
}

// Keeps the vertices with keep[v], renumbering in order; arcs and the arc
// order follow. origin is carried along.
Perturbed select_vertices(const Perturbed& p, const std::vector<bool>& keep)
{
    const int n = p.graph.order();
    std::vector<int> to(n, -1);
    Perturbed out;
    out.graph.extended = p.graph.extended;
    for (int v = 0; v < n; ++v)
        if (keep[v]) {
            to[v] = out.graph.order();
            out.graph.vertices.push_back(p.graph.vertices[v]);
            out.origin.push_back(p.origin[v]);
        }
    for (const auto& [ij, b] : p.graph.arcs)
        if (to[ij.first] >= 0 && to[ij.second] >= 0)
            out.graph.add_arc(to[ij.first], to[ij.second], b);
    if (p.graph.arc_order) {
        ArcOrder order(out.graph.order());
        for (int v = 0; v < n; ++v)
            if (to[v] >= 0)
                for (int t : (*p.graph.arc_order)[v])
                    if (to[t] >= 0)
                        order[to[v]].push_back(to[t]);
        out.graph.arc_order = std::move(order);
    }
    return out;
}

// Drops null vertices and null arcs.
Perturbed compact(const Perturbed& p)
{
    std::vector<bool> keep(p.graph.order());
    for (int v = 0; v < p.graph.order(); ++v)
        keep[v] = !p.graph.vertices[v].is_null;
    Perturbed out = select_vertices(p, keep);
    for (auto it = out.graph.arcs.begin(); it != out.graph.arcs.end();)
        it = it->second.is_null ? out.graph.arcs.erase(it) : std::next(it);
    out.graph.extended = false;
    return out;
}

Perturbed delete_distort(const AttributedGraph& model, const DeleteDistort& dd, std::mt19937_64& rng)
{
    const int n = model.order();
    if (dd.nd < 0 || dd.nl < 0 || dd.nd + dd.nl > n)
        throw Error(ErrorKind::config, "nd + nl must lie in [0, nv]");
    Perturbed out{model, Labelling(n)};
    for (int v = 0; v < n; ++v)
        out.origin[v] = model.vertices[v].is_null ? kNullTarget : v;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    AttributedGraph& g = out.graph;
    for (int k = 0; k < dd.nd; ++k) {
        const int v = idx[k];
        g.vertices[v] = AttrTuple::null();
        out.origin[v] = kNullTarget;
        g.extended = true;
        for (auto it = g.arcs.begin(); it != g.arcs.end();)
            it = it->first.first == v || it->first.second == v ? g.arcs.erase(it) : std::next(it);
    }
    for (int k = dd.nd; k < dd.nd + dd.nl; ++k) {
        AttrTuple& t = g.vertices[idx[k]];
        if (t.is_null)
            continue;
        // A replacement always differs from the old value.
        for (double& x : t.values) {
            const double old = x;
            while (x == old)
                x = uniform_attribute(rng);
        }
    }
    if (g.arc_order)
        for (auto& targets : *g.arc_order)
            std::erase_if(targets, [&](int t) { return g.vertices[t].is_null; });
    if (g.arc_order)
        for (int v = 0; v < n; ++v)
            if (g.vertices[v].is_null)
                (*g.arc_order)[v].clear();
    return out;
}

Perturbed gaussian(const AttributedGraph& model, const GaussianNoise& gn, std::mt19937_64& rng)
{
    if (gn.sigma < 0 || gn.structural < 0)
        throw Error(ErrorKind::config, "noise parameters must be non-negative");
    const int n = model.order();
    Perturbed out{model, Labelling(n)};
    for (int v = 0; v < n; ++v)
        out.origin[v] = model.vertices[v].is_null ? kNullTarget : v;
    if (gn.sigma > 0) {
        std::normal_distribution<double> noise(0.0, gn.sigma);
        for (auto& v : out.graph.vertices)
            for (double& x : v.values)
                x += noise(rng);
        for (auto& [ij, b] : out.graph.arcs)
            for (double& x : b.values)
                x += noise(rng);
    }
    const std::size_t va = vertex_arity(model), ea = arc_arity(model);
    std::bernoulli_distribution insert(0.5);
    for (int s = 0; s < gn.structural; ++s) {
        std::vector<int> live;
        for (int v = 0; v < out.graph.order(); ++v)
            if (!out.graph.vertices[v].is_null)
                live.push_back(v);
        if (!insert(rng) && !live.empty()) {
            const int victim = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
            std::vector<bool> keep(out.graph.order(), true);
            keep[victim] = false;
            out = select_vertices(out, keep);
        } else {
            const int v = out.graph.order();
            out.graph.vertices.push_back(uniform_tuple(rng, va));
            out.origin.push_back(kNullTarget);
            if (out.graph.arc_order)
                out.graph.arc_order->emplace_back();
            if (!live.empty()) {
                const int t = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
                out.graph.add_arc(v, t, uniform_tuple(rng, ea));
                if (out.graph.arc_order)
                    (*out.graph.arc_order)[v].push_back(t);
            }
        }
    }
    return out;
}

bool is_noisy(const GaussianNoise& g) { return g.sigma > 0 || g.structural > 0; }

// One derived graph, compacted, with its labels for supervised synthesis.
// Inserted vertices get fresh labels from `next_label`.
Perturbed view(const AttributedGraph& model, const ExperimentConfig& cfg, std::uint64_t seed)
{
    return compact(perturb(model, DeleteDistort{cfg.gen.nd, cfg.gen.nl}, seed));
}

std::pair<AttributedGraph, Labelling> add_noise(Perturbed p, const ExperimentConfig& cfg, std::uint64_t seed,
                                                int& next_label)
{
    if (is_noisy(cfg.noise)) {
        Perturbed q = perturb(p.graph, cfg.noise, seed ^ 0x9e3779b97f4a7c15ULL);
        for (auto& o : q.origin)
            if (o != kNullTarget)
                o = p.origin[o];
        p = std::move(q);
    }
    Labelling labels = p.origin;
    for (auto& l : labels)
        if (l == kNullTarget)
            l = next_label++;
    return {std::move(p.graph), std::move(labels)};
}

std::pair<AttributedGraph, Labelling> derive(const AttributedGraph& model, const ExperimentConfig& cfg,
                                             std::uint64_t seed, int& next_label)
{
    return add_noise(view(model, cfg, seed), cfg, seed, next_label);
}

} // namespace

void GeneratorConfig::validate() const
{
    if (n_fdg < 1)
        throw Error(ErrorKind::config, "nFDG must be at least 1");
    if (nr < 1)
        throw Error(ErrorKind::config, "NR must be at least 1");
    if (nt < 0 || nt % n_fdg != 0)
        throw Error(ErrorKind::config, "NT must be a non-negative multiple of nFDG");
    if (nv < 1)
        throw Error(ErrorKind::config, "nv must be at least 1");
    if (ne < 0 || static_cast<long>(ne) > static_cast<long>(nv) * (nv - 1))
        throw Error(ErrorKind::config, "ne must lie in [0, nv(nv-1)]");
    if (nd < 0 || nl < 0 || nd + nl > nv)
        throw Error(ErrorKind::config, "nd + nl must lie in [0, nv]");
}

std::vector<AttributedGraph> generate_models(const GeneratorConfig& cfg)
{
    cfg.validate();
    std::vector<AttributedGraph> out;
    for (int k = 0; k < cfg.n_fdg; ++k) {
        auto rng = stream({cfg.seed, 0, static_cast<std::uint64_t>(k)});
        AttributedGraph g;
        for (int v = 0; v < cfg.nv; ++v)
            g.vertices.push_back(AttrTuple::of(uniform_attribute(rng)));
        std::vector<int> slots(cfg.nv * (cfg.nv - 1));
        std::iota(slots.begin(), slots.end(), 0);
        std::shuffle(slots.begin(), slots.end(), rng);
        slots.resize(cfg.ne);
        std::sort(slots.begin(), slots.end());
        for (int s : slots) {
            auto [i, j] = arc_endpoints(s, cfg.nv);
            g.add_arc(i, j, AttrTuple::of(uniform_attribute(rng)));
        }
        out.push_back(std::move(g));
    }
    return out;
}

Perturbed perturb(const AttributedGraph& model, const Perturbation& mode, std::uint64_t seed)
{
    auto rng = stream({seed, 1});
    if (const auto* dd = std::get_if<DeleteDistort>(&mode))
        return delete_distort(model, *dd, rng);
    return gaussian(model, std::get<GaussianNoise>(mode), rng);
}

Pdf smooth_pdf(const Pdf& p, long circular_bins)
{
    if (circular_bins < 0)
        throw Error(ErrorKind::config, "circular bin count must be non-negative");
    std::vector<std::map<long, double>> comps;
    for (const auto& comp : p.components()) {
        auto wrap = [&](long b) {
            if (circular_bins == 0)
                return b;
            const long r = b % circular_bins;
            return r < 0 ? r + circular_bins : r;
        };
        std::map<long, double> out;
        double before = 0.0, after = 0.0;
        for (auto [b, m] : comp) {
            before += m;
            out[wrap(b)] += 0.5 * m;
            out[wrap(b - 1)] += 0.25 * m;
            out[wrap(b + 1)] += 0.25 * m;
        }
        for (auto& [b, m] : out)
            after += m;
        if (after > 0.0 && after != before)
            for (auto& [b, m] : out)
                m *= before / after;
        comps.push_back(std::move(out));
    }
    return Pdf::from_masses(p.support(), p.null_mass(), std::move(comps));
}

MatchResult fdg_distance(const AttributedGraph& g, const Fdg& f, const CostWeights& w, const DistanceMethod& method)
{
    if (method.kind == DistanceMethod::optimal)
        return bnb_distance(g, f, w);
    return suboptimal_distance(g, f, w, method.sub);
}

Classification fdg_classify(const AttributedGraph& test, const std::vector<Fdg>& models, const CostWeights& w,
                            const DistanceMethod& method)
{
    if (models.empty())
        throw Error(ErrorKind::invalid_input, "classification needs at least one model");
    Classification best;
    for (std::size_t k = 0; k < models.size(); ++k) {
        const MatchResult r = fdg_distance(test, models[k], w, method);
        best.explored_nodes += r.explored_nodes;
        if (best.model < 0 || r.distance < best.distance) {
            best.model = static_cast<int>(k);
            best.distance = r.distance;
        }
    }
    return best;
}

StructureStats fdg_structure(const Fdg& f)
{
    StructureStats s;
    std::vector<bool> live(f.n);
    for (int i = 0; i < f.n; ++i) {
        live[i] = !f.vertex_pdfs[i].always_null();
        s.vertices += live[i];
    }
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            if (i == j || !live[i] || !live[j])
                continue;
            s.occurrences += f.rel.o_v(i, j);
            if (i < j) {
                s.antagonisms += f.rel.a_v(i, j);
                s.existences += f.rel.e_v(i, j);
            }
        }
    return s;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.gen.validate();
    cfg.weights.validate();
    if (cfg.repetitions < 1)
        throw Error(ErrorKind::config, "repetitions must be at least 1");
    const int models_n = cfg.gen.n_fdg;
    const int per_model = cfg.gen.nt / models_n;

    ExperimentReport rep;
    rep.config = cfg;
    rep.confusion.assign(models_n, std::vector<int>(models_n, 0));
    int correct = 0;
    double nodes = 0.0, ms = 0.0;
    StructureStats total;
    int fdg_count = 0;

    for (int r = 0; r < cfg.repetitions; ++r) {
        GeneratorConfig gen = cfg.gen;
        gen.seed = stream({cfg.gen.seed, 2, static_cast<std::uint64_t>(r)})();
        const auto models = generate_models(gen);

        std::vector<Fdg> fdgs;
        std::vector<AttributedGraph> tests;
        std::vector<int> truth;
        for (int k = 0; k < models_n; ++k) {
            const auto mk = static_cast<std::uint64_t>(k);
            int next_label = cfg.gen.nv;
            std::vector<AttributedGraph> refs;
            CommonLabelling labels;
            for (int i = 0; i < cfg.gen.nr; ++i) {
                auto [g, l] = derive(models[k], cfg, stream({gen.seed, 3, mk, static_cast<std::uint64_t>(i)})(),
                                     next_label);
                refs.push_back(std::move(g));
                labels.push_back(std::move(l));
            }
            fdgs.push_back(synth_from_labelled_ags(refs, labels, -1, cfg.synth));
            const StructureStats st = fdg_structure(fdgs.back());
            total.vertices += st.vertices;
            total.antagonisms += st.antagonisms;
            total.occurrences += st.occurrences;
            total.existences += st.existences;
            ++fdg_count;
            for (int t = 0; t < per_model; ++t) {
                int unused = 0;
                const std::uint64_t seed = stream({gen.seed, 4, mk, static_cast<std::uint64_t>(t)})();
                if (cfg.view_tests) {
                    const auto i = static_cast<std::uint64_t>(t % cfg.gen.nr);
                    tests.push_back(
                        add_noise(view(models[k], cfg, stream({gen.seed, 3, mk, i})()), cfg, seed, unused).first);
                } else {
                    tests.push_back(derive(models[k], cfg, seed, unused).first);
                }
                truth.push_back(k);
            }
        }
        if (!cfg.classify)
            continue;

        // Every (test, model) comparison is an independent task.
        const std::size_t tasks = tests.size() * fdgs.size();
        std::vector<MatchResult> results(tasks);
        std::vector<double> elapsed(tasks);
        parallel_for(tasks, cfg.threads, [&](std::size_t k) {
            const auto start = std::chrono::steady_clock::now();
            results[k] = fdg_distance(tests[k / fdgs.size()], fdgs[k % fdgs.size()], cfg.weights, cfg.method);
            elapsed[k] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        });
        for (std::size_t t = 0; t < tests.size(); ++t) {
            int best = 0;
            for (std::size_t k = 0; k < fdgs.size(); ++k) {
                const std::size_t idx = t * fdgs.size() + k;
                nodes += static_cast<double>(results[idx].explored_nodes);
                ms += elapsed[idx];
                if (results[idx].distance < results[t * fdgs.size() + best].distance)
                    best = static_cast<int>(k);
            }
            ++rep.confusion[truth[t]][best];
            correct += best == truth[t];
        }
        rep.comparisons += static_cast<int>(tasks);
    }
    const int tested = cfg.classify ? per_model * models_n * cfg.repetitions : 0;
    rep.correctness = tested ? static_cast<double>(correct) / tested : 0.0;
    rep.mean_nodes = rep.comparisons ? nodes / rep.comparisons : 0.0;
    rep.mean_ms = rep.comparisons ? ms / rep.comparisons : 0.0;
    rep.mean_vertices = static_cast<double>(total.vertices) / fdg_count;
    rep.mean_antagonisms = static_cast<double>(total.antagonisms) / fdg_count;
    rep.mean_occurrences = static_cast<double>(total.occurrences) / fdg_count;
    rep.mean_existences = static_cast<double>(total.existences) / fdg_count;
    return rep;
}

std::string method_name(const DistanceMethod& m)
{
    if (m.kind == DistanceMethod::optimal)
        return "optimal";
    switch (m.sub.kind) {
    case SuboptimalMethod::noniter:
        return "noniter";
    case SuboptimalMethod::relax_vertex:
        return "relax-v";
    case SuboptimalMethod::relax_expanded:
        return "relax-ev";
    }
    return "unknown";
}

std::string csv_header()
{
    return "method,NR,sigma,structural_noise,K1,K2,K3,K4,K5,K6,K7,K8,tau_or_tp,correctness,mean_nodes,mean_ms";
}

std::string csv_row(const ExperimentReport& r)
{
    const auto& c = r.config;
    std::ostringstream out;
    out.precision(10);
    out << method_name(c.method) << ',' << c.gen.nr << ',' << c.noise.sigma << ',' << c.noise.structural;
    for (int k = 1; k <= 8; ++k)
        out << ',' << c.weights.k(k);
    out << ',';
    if (c.method.kind == DistanceMethod::suboptimal)
        out << (c.method.sub.kind == SuboptimalMethod::noniter ? c.method.sub.tau : c.method.sub.tp);
    out << ',' << r.correctness << ',' << r.mean_nodes << ',' << r.mean_ms;
    return out.str();
}

std::string report_summary(const ExperimentReport& r)
{
    const auto& c = r.config;
    std::ostringstream out;
    out << "method: " << method_name(c.method) << '\n'
        << "models: " << c.gen.n_fdg << "  NT: " << c.gen.nt << "  NR: " << c.gen.nr << '\n'
        << "nv: " << c.gen.nv << "  ne: " << c.gen.ne << "  nd: " << c.gen.nd << "  nl: " << c.gen.nl << '\n'
        << "sigma: " << c.noise.sigma << "  structural: " << c.noise.structural << '\n'
        << "weights:";
    for (int k = 1; k <= 8; ++k)
        out << " K" << k << '=' << c.weights.k(k);
    out << (c.weights.mode == ConstraintMode::restricted ? "  restricted" : "  relaxed") << '\n'
        << "repetitions: " << c.repetitions << "  seed: " << c.gen.seed << '\n'
        << "correctness: " << r.correctness << '\n'
        << "mean explored nodes: " << r.mean_nodes << '\n'
        << "mean ms per comparison: " << r.mean_ms << '\n'
        << "mean FDG vertices: " << r.mean_vertices << "  antagonisms: " << r.mean_antagonisms
        << "  occurrences: " << r.mean_occurrences << "  existences: " << r.mean_existences << '\n'
        << "confusion (rows true, columns predicted):\n";
    for (const auto& row : r.confusion) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? " " : "  ") << row[k];
        out << '\n';
    }
    return out.str();
}

} // namespace fdg
