#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fdg/core.hpp"
#include "fdg/efficient.hpp"
#include "fdg/matching.hpp"
#include "fdg/synthesis.hpp"

namespace fdg {

struct GeneratorConfig {
    int n_fdg = 10;  // models
    int nt = 100;    // test graphs in total
    int nr = 1;      // reference graphs per model
    int nv = 27;
    int ne = 108;
    int nd = 21;  // vertices nulled per derived graph
    int nl = 2;   // vertices redrawn per derived graph
    std::uint64_t seed = 1;

    void validate() const;
};

// Attribute values are uniform integers in [0, 999].
inline constexpr int kMaxAttribute = 999;

std::vector<AttributedGraph> generate_models(const GeneratorConfig& cfg);

struct DeleteDistort {
    int nd = 0;
    int nl = 0;
};

struct GaussianNoise {
    double sigma = 0.0;
    // Structural edits, each a coin flip between inserting and deleting a vertex.
    int structural = 0;
};

using Perturbation = std::variant<DeleteDistort, GaussianNoise>;

struct Perturbed {
    AttributedGraph graph;
    // Model vertex behind each output vertex; kNullTarget for nulled or inserted ones.
    Labelling origin;
};

// DeleteDistort keeps the model's numbering and nulls vertices in place.
// GaussianNoise removes deleted vertices and appends inserted ones.
Perturbed perturb(const AttributedGraph& model, const Perturbation& mode, std::uint64_t seed);

// Smooths every component with weights 1/2 (own bin), 1/4, 1/4 (neighbours).
// With circular_bins = k the bins wrap modulo k. The null mass is untouched.
Pdf smooth_pdf(const Pdf& p, long circular_bins = 0);

struct DistanceMethod {
    enum Kind { optimal, suboptimal };
    Kind kind = optimal;
    SuboptimalMethod sub;
};

struct Classification {
    int model = -1;
    double distance = kInvalidDistance;
    std::uint64_t explored_nodes = 0;
};

MatchResult fdg_distance(const AttributedGraph& g, const Fdg& f, const CostWeights& w, const DistanceMethod& method);

// Nearest model; ties go to the lowest index.
Classification fdg_classify(const AttributedGraph& test, const std::vector<Fdg>& models, const CostWeights& w,
                            const DistanceMethod& method);

struct StructureStats {
    int vertices = 0;
    int antagonisms = 0;
    int occurrences = 0;
    int existences = 0;
};

// Counts over vertices that are not always null; antagonism and existence
// over unordered pairs, occurrence over ordered pairs.
StructureStats fdg_structure(const Fdg& f);

struct ExperimentConfig {
    GeneratorConfig gen;
    // Extra noise on top of the delete/distort step, for both reference and test graphs.
    GaussianNoise noise;
    // Test graph t of a model is a noisy copy of reference view t mod NR
    // rather than a fresh delete/distort draw.
    bool view_tests = false;
    // Bin widths of the synthesized pdfs.
    SynthOptions synth;
    CostWeights weights;
    DistanceMethod method;
    int repetitions = 1;
    unsigned threads = 1;
    bool classify = true;
};

struct ExperimentReport {
    double correctness = 0.0;
    std::vector<std::vector<int>> confusion;  // [true model][predicted model], summed over repetitions
    double mean_nodes = 0.0;
    double mean_ms = 0.0;
    // Mean structure of the synthesized FDGs.
    double mean_vertices = 0.0;
    double mean_antagonisms = 0.0;
    double mean_occurrences = 0.0;
    double mean_existences = 0.0;
    int comparisons = 0;
    ExperimentConfig config;
};

// Builds reference and test sets from the generated models, synthesizes one
// FDG per model with the generator's vertex identity as common labelling,
// and classifies every test graph.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string method_name(const DistanceMethod& m);
std::string csv_header();
std::string csv_row(const ExperimentReport& r);
std::string report_summary(const ExperimentReport& r);

} // namespace fdg
