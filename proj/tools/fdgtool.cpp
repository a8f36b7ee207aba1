#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "fdg/baseline.hpp"
#include "fdg/clustering.hpp"
#include "fdg/harness.hpp"
#include "fdg/io.hpp"
#include "fdg/synthesis.hpp"

using namespace fdg;
using json = nlohmann::json;

namespace {

struct DistanceFlags {
    CostWeights w;
    bool restricted = false;
    std::string method = "optimal";
    double tau = 1.0;
    double tp = 0.0;
    int iters = 20;

    CostWeights weights() const
    {
        CostWeights out = w;
        out.mode = restricted ? ConstraintMode::restricted : ConstraintMode::relaxed;
        return out;
    }

    DistanceMethod distance_method() const
    {
        DistanceMethod m;
        if (method == "optimal")
            return m;
        m.kind = DistanceMethod::suboptimal;
        m.sub.tau = tau;
        m.sub.tp = tp;
        m.sub.iterations = iters;
        if (method == "noniter")
            m.sub.kind = SuboptimalMethod::noniter;
        else if (method == "relax-v")
            m.sub.kind = SuboptimalMethod::relax_vertex;
        else
            m.sub.kind = SuboptimalMethod::relax_expanded;
        return m;
    }
};

void add_distance_flags(CLI::App* app, DistanceFlags& f)
{
    for (int k = 1; k <= 8; ++k)
        app->add_option("--k" + std::to_string(k), f.w.k(k), "weight K" + std::to_string(k))->capture_default_str();
    app->add_option("--kpr", f.w.kpr, "probability floor K_pr")->capture_default_str();
    app->add_flag("--planar", f.w.planar, "enforce the cyclic arc order");
    app->add_flag("--restricted", f.restricted, "second-order relations as hard constraints");
    app->add_option("--method", f.method, "distance algorithm")
        ->check(CLI::IsMember({"optimal", "noniter", "relax-v", "relax-ev"}))
        ->capture_default_str();
    app->add_option("--tau", f.tau, "noniter forbid threshold")->capture_default_str();
    app->add_option("--tp", f.tp, "relaxation probability threshold")->capture_default_str();
    app->add_option("--iters", f.iters, "relaxation iterations")->capture_default_str();
}

json labelling_json(const Labelling& l)
{
    json out = json::array();
    for (int t : l)
        out.push_back(t == kNullTarget ? json(nullptr) : json(t));
    return out;
}

std::vector<AttributedGraph> read_ags(const std::vector<std::string>& paths)
{
    std::vector<AttributedGraph> out;
    for (const auto& p : paths)
        out.push_back(read_ag(p));
    return out;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what)
{
    std::vector<T> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::istringstream v(item);
        T x{};
        if (!(v >> x) || !(v >> std::ws).eof())
            throw Error(ErrorKind::config, std::string("bad ") + what + " list '" + s + "'");
        out.push_back(x);
    }
    if (out.empty())
        throw Error(ErrorKind::config, std::string("empty ") + what + " list");
    return out;
}

// Every long flag has a config twin of the same name; keys already given on
// the command line are left alone.
void apply_config(CLI::App* sub, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::invalid_input, "cannot open '" + path + "'");
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
        if (item.name == "++" || item.name == "--")
            continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
        if (!opt || item.name == "config")
            throw Error(ErrorKind::config, path + ": unknown key '" + item.fullname() + "'");
        if (opt->count() > 0)
            continue;
        std::vector<std::string> values = item.inputs;
        // The INI reader splits "1,3,6"; sweep options take it back as one string.
        if (opt->get_expected_max() == 1 && values.size() > 1)
            values = {CLI::detail::join(values, ",")};
        if (opt->get_expected_min() == 0 && values.size() == 1)
            values[0] = CLI::detail::to_flag_value(values[0]) > 0 ? "true" : "false";
        for (const auto& v : values)
            opt->add_result(v);
        opt->run_callback();
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Function-described graph synthesis, matching and clustering"};
    app.require_subcommand(1);
    std::map<CLI::App*, std::string> config_files;

    // synth
    std::vector<std::string> synth_inputs;
    std::string synth_out;
    bool synth_incremental = false;
    DistanceFlags synth_flags;
    auto* synth = app.add_subcommand("synth", "synthesize one FDG from attributed graphs");
    synth->add_option("--config", config_files[synth], "key=value file; command-line flags win")->check(CLI::ExistingFile);
    synth->add_option("graphs", synth_inputs, "AG files")->required()->check(CLI::ExistingFile);
    synth->add_option("-o,--out", synth_out, "output FDG file")->required();
    synth->add_flag("--incremental", synth_incremental,
                    "label each graph by its optimal match to the FDG so far instead of vertex identity");
    add_distance_flags(synth, synth_flags);

    // dist
    std::string dist_ag, dist_fdg;
    DistanceFlags dist_flags;
    auto* dist = app.add_subcommand("dist", "distance between an AG and an FDG");
    dist->add_option("--config", config_files[dist], "key=value file; command-line flags win")->check(CLI::ExistingFile);
    dist->add_option("graph", dist_ag, "AG file")->required()->check(CLI::ExistingFile);
    dist->add_option("fdg", dist_fdg, "FDG file")->required()->check(CLI::ExistingFile);
    add_distance_flags(dist, dist_flags);

    // cluster
    std::vector<std::string> cluster_inputs;
    std::string cluster_method = "incremental", cluster_costs = "exact", cluster_dir;
    double d_alpha = 0.0;
    unsigned cluster_threads = 1;
    DistanceFlags cluster_flags;
    auto* cluster = app.add_subcommand("cluster", "group attributed graphs into FDGs");
    cluster->add_option("--config", config_files[cluster], "key=value file; command-line flags win")->check(CLI::ExistingFile);
    cluster->add_option("graphs", cluster_inputs, "AG files")->required()->check(CLI::ExistingFile);
    cluster->add_option("--algorithm", cluster_method, "clustering algorithm")
        ->check(CLI::IsMember({"incremental", "single", "complete"}))
        ->capture_default_str();
    cluster->add_option("--d-alpha", d_alpha, "merge threshold")->capture_default_str();
    cluster->add_option("--costs", cluster_costs, "edit cost preset for hierarchical clustering")
        ->check(CLI::IsMember({"exact", "squared", "abs"}))
        ->capture_default_str();
    cluster->add_option("--threads", cluster_threads, "workers for the pairwise table (0 = all cores)")
        ->capture_default_str();
    cluster->add_option("--out-dir", cluster_dir, "write one FDG file per cluster here");
    for (int k = 1; k <= 8; ++k)
        cluster->add_option("--k" + std::to_string(k), cluster_flags.w.k(k), "weight K" + std::to_string(k))
            ->capture_default_str();

    // classify
    std::string classify_test, classify_method = "fdg", classify_costs = "exact";
    std::vector<std::string> classify_models, classify_refs;
    int knn_k = 1;
    DistanceFlags classify_flags;
    auto* classify = app.add_subcommand("classify", "classify an attributed graph");
    classify->add_option("--config", config_files[classify], "key=value file; command-line flags win")->check(CLI::ExistingFile);
    classify->add_option("graph", classify_test, "AG file")->required()->check(CLI::ExistingFile);
    classify->add_option("--classifier", classify_method, "fdg or knn")
        ->check(CLI::IsMember({"fdg", "knn"}))
        ->capture_default_str();
    classify->add_option("--model", classify_models, "FDG file, one per class (fdg classifier)")
        ->check(CLI::ExistingFile);
    classify->add_option("--ref", classify_refs, "reference as LABEL:AG_FILE (knn classifier)");
    classify->add_option("--k", knn_k, "neighbours for knn")->capture_default_str();
    classify->add_option("--costs", classify_costs, "edit cost preset for knn")
        ->check(CLI::IsMember({"exact", "squared", "abs"}))
        ->capture_default_str();
    add_distance_flags(classify, classify_flags);

    // bench
    ExperimentConfig bench_cfg;
    std::string bench_nr = "1", bench_sigma = "0", bench_out;
    double bench_bin = 1.0;
    DistanceFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "run synthetic recognition experiments");
    bench->add_option("--config", config_files[bench], "key=value file; command-line flags win")->check(CLI::ExistingFile);
    bench->add_option("--seed", bench_cfg.gen.seed, "generator seed")->capture_default_str();
    bench->add_option("--reps", bench_cfg.repetitions, "repetitions per point")->capture_default_str();
    bench->add_option("--out", bench_out, "CSV output file");
    bench->add_option("--nfdg", bench_cfg.gen.n_fdg, "models")->capture_default_str();
    bench->add_option("--nt", bench_cfg.gen.nt, "test graphs in total")->capture_default_str();
    bench->add_option("--nr", bench_nr, "reference graphs per model, comma-separated sweep")->capture_default_str();
    bench->add_option("--nv", bench_cfg.gen.nv, "vertices per model")->capture_default_str();
    bench->add_option("--ne", bench_cfg.gen.ne, "arcs per model")->capture_default_str();
    bench->add_option("--nd", bench_cfg.gen.nd, "deleted vertices per derived graph")->capture_default_str();
    bench->add_option("--nl", bench_cfg.gen.nl, "distorted vertices per derived graph")->capture_default_str();
    bench->add_option("--sigma", bench_sigma, "gaussian noise, comma-separated sweep")->capture_default_str();
    bench->add_option("--structural", bench_cfg.noise.structural, "vertex insertions or deletions")
        ->capture_default_str();
    bench->add_flag("--view-tests", bench_cfg.view_tests, "test graphs are noisy copies of the reference views");
    bench->add_option("--bin-width", bench_bin, "bin width of the synthesized pdfs")->capture_default_str();
    bench->add_option("--threads", bench_cfg.threads, "workers (0 = all cores)")->capture_default_str();
    add_distance_flags(bench, bench_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sub, path] : config_files)
            if (*sub && !path.empty())
                apply_config(sub, path);
        if (*synth) {
            const auto graphs = read_ags(synth_inputs);
            Fdg f;
            if (synth_incremental) {
                IncrementalConfig cfg;
                cfg.weights = synth_flags.weights();
                cfg.d_alpha = std::numeric_limits<double>::infinity();
                f = incremental_clustering(graphs, cfg).fdgs.at(0);
            } else {
                CommonLabelling labels;
                for (const auto& g : graphs) {
                    Labelling l(g.order());
                    for (int i = 0; i < g.order(); ++i)
                        l[i] = g.vertices[i].is_null ? kNullTarget : i;
                    labels.push_back(std::move(l));
                }
                f = synth_from_labelled_ags(graphs, labels);
            }
            write_fdg(synth_out, f);
            const StructureStats s = fdg_structure(f);
            print({{"order", f.n},
                   {"graphs", f.z},
                   {"vertices", s.vertices},
                   {"antagonisms", s.antagonisms},
                   {"occurrences", s.occurrences},
                   {"existences", s.existences}});
        } else if (*dist) {
            const AttributedGraph g = read_ag(dist_ag);
            const Fdg f = read_fdg(dist_fdg);
            const MatchResult r = fdg_distance(g, f, dist_flags.weights(), dist_flags.distance_method());
            print({{"method", method_name(dist_flags.distance_method())},
                   {"valid", r.valid},
                   {"distance", r.valid ? json(r.distance) : json(nullptr)},
                   {"labelling", labelling_json(r.labelling)},
                   {"explored_nodes", r.explored_nodes}});
        } else if (*cluster) {
            const auto graphs = read_ags(cluster_inputs);
            Clustering c;
            if (cluster_method == "incremental") {
                IncrementalConfig cfg;
                cfg.weights = cluster_flags.w;
                cfg.d_alpha = d_alpha;
                c = incremental_clustering(graphs, cfg);
            } else {
                HierarchicalConfig cfg;
                cfg.matcher = edit_distance_matcher(edit_costs_preset(cluster_costs));
                cfg.d_alpha = d_alpha;
                cfg.linkage = cluster_method == "single" ? Linkage::single : Linkage::complete;
                cfg.threads = cluster_threads;
                c = hierarchical_clustering(graphs, cfg);
            }
            json clusters = json::array();
            for (std::size_t k = 0; k < c.fdgs.size(); ++k) {
                json members = json::array();
                for (int m : c.members[k])
                    members.push_back(cluster_inputs[m]);
                json entry{{"members", members}, {"order", c.fdgs[k].n}};
                if (!cluster_dir.empty()) {
                    std::filesystem::create_directories(cluster_dir);
                    const auto path = std::filesystem::path(cluster_dir) / ("cluster" + std::to_string(k) + ".fdg");
                    write_fdg(path.string(), c.fdgs[k]);
                    entry["fdg"] = path.string();
                }
                clusters.push_back(entry);
            }
            print({{"clusters", clusters}, {"merge_distances", c.merge_distances}});
        } else if (*classify) {
            const AttributedGraph test = read_ag(classify_test);
            if (classify_method == "fdg") {
                std::vector<Fdg> models;
                for (const auto& p : classify_models)
                    models.push_back(read_fdg(p));
                const Classification c =
                    fdg_classify(test, models, classify_flags.weights(), classify_flags.distance_method());
                print({{"class", c.model},
                       {"model", classify_models.at(c.model)},
                       {"distance", c.distance},
                       {"explored_nodes", c.explored_nodes}});
            } else {
                std::vector<LabelledGraph> refs;
                for (const auto& r : classify_refs) {
                    const auto colon = r.find(':');
                    if (colon == std::string::npos)
                        throw Error(ErrorKind::config, "--ref expects LABEL:FILE, got '" + r + "'");
                    refs.push_back({read_ag(r.substr(colon + 1)), parse_list<int>(r.substr(0, colon), "label").at(0)});
                }
                const KnnResult k = knn_classify(test, refs, knn_k, edit_costs_preset(classify_costs));
                json neighbours = json::array();
                for (auto [d, idx] : k.neighbours)
                    neighbours.push_back({{"distance", d}, {"ref", classify_refs[idx]}});
                print({{"class", k.label}, {"neighbours", neighbours}});
            }
        } else if (*bench) {
            if (!(bench_bin > 0.0))
                throw Error(ErrorKind::config, "bin width must be positive");
            bench_cfg.synth.vertex_binning.widths = {bench_bin};
            bench_cfg.synth.arc_binning.widths = {bench_bin};
            bench_cfg.weights = bench_flags.weights();
            bench_cfg.method = bench_flags.distance_method();
            std::ofstream csv;
            if (!bench_out.empty()) {
                csv.open(bench_out);
                if (!csv)
                    throw Error(ErrorKind::invalid_input, "cannot write '" + bench_out + "'");
                csv << csv_header() << '\n';
            } else {
                std::cout << csv_header() << '\n';
            }
            for (int nr : parse_list<int>(bench_nr, "NR"))
                for (double sigma : parse_list<double>(bench_sigma, "sigma")) {
                    ExperimentConfig cfg = bench_cfg;
                    cfg.gen.nr = nr;
                    cfg.noise.sigma = sigma;
                    const ExperimentReport r = run_experiment(cfg);
                    (bench_out.empty() ? std::cout : csv) << csv_row(r) << std::endl;
                    std::cerr << report_summary(r) << '\n';
                }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
