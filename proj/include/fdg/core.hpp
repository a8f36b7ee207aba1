#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdg/error.hpp"

namespace fdg {

// Attribute tuple. A null tuple carries no components.
struct AttrTuple {
    std::vector<double> values;
    bool is_null = true;

    static AttrTuple null() { return {}; }
    static AttrTuple of(std::vector<double> v) { return AttrTuple{std::move(v), false}; }
    static AttrTuple of(double v) { return AttrTuple{{v}, false}; }

    bool operator==(const AttrTuple& o) const = default;
};

using ArcOrder = std::vector<std::vector<int>>;

// Directed attributed graph. Absent arcs are simply missing from `arcs`.
class AttributedGraph {
public:
    std::vector<AttrTuple> vertices;
    std::map<std::pair<int, int>, AttrTuple> arcs;
    // Per vertex, the targets of its outgoing arcs in cyclic order.
    std::optional<ArcOrder> arc_order;
    bool extended = false;

    AttributedGraph() = default;
    explicit AttributedGraph(std::vector<AttrTuple> v) : vertices(std::move(v)) {}

    int order() const { return static_cast<int>(vertices.size()); }
    void add_arc(int i, int j, AttrTuple value) { arcs[{i, j}] = std::move(value); }
    // Non-null arc value or nullptr.
    const AttrTuple* arc(int i, int j) const;
    bool has_arc(int i, int j) const { return arc(i, j) != nullptr; }
    int non_null_vertex_count() const;
    // Outgoing non-null arc targets, in arc_order when present, else ascending.
    std::vector<int> out_targets(int i) const;

    // Throws Error(invalid_input) when an invariant is broken.
    void validate() const;

    bool operator==(const AttributedGraph& o) const = default;
};

// Per-component bin widths; a value v falls in bin floor(v / width).
struct Binning {
    std::vector<double> widths;

    double width(std::size_t component) const { return component < widths.size() ? widths[component] : 1.0; }
    long bin(double v, std::size_t component) const;
    std::vector<long> bins(const AttrTuple& t) const;
    // Lower edge of a bin; used when writing representative values.
    double lower(long b, std::size_t component) const { return static_cast<double>(b) * width(component); }

    bool operator==(const Binning& o) const = default;
};

// Discrete pdf over binned tuples plus the null value. Stored as sample
// masses so that mixtures weighted by sample counts are plain sums.
class Pdf {
public:
    Pdf() = default;

    static Pdf null_only(double support);
    // Single-component pdf from (bin, probability) entries and an explicit null probability.
    static Pdf from_probabilities(double null_prob, const std::map<long, double>& bins, double support = 1.0);
    // Raw sample masses, as written by the FDG serializer.
    static Pdf from_masses(double support, double null_mass, std::vector<std::map<long, double>> components);

    void add_null(double weight = 1.0);
    void add(const std::vector<long>& bins, double weight = 1.0);
    void merge(const Pdf& other);

    double support() const { return support_; }
    double null_mass() const { return null_mass_; }
    double non_null_mass() const { return support_ - null_mass_; }
    std::size_t arity() const { return components_.size(); }
    const std::vector<std::map<long, double>>& components() const { return components_; }
    std::vector<std::map<long, double>>& components() { return components_; }

    double prob_null() const;
    double prob(const std::vector<long>& bins) const;
    // Per-component conditional probability given non-null.
    double component_prob(std::size_t c, long b) const;

    bool always_null() const { return support_ <= 0.0 || null_mass_ >= support_; }
    bool never_null() const { return support_ > 0.0 && null_mass_ <= 0.0; }

    // Entropy in bits of the outcome distribution, components independent.
    double entropy_bits() const;
    // Sum of probabilities over the outcome distribution (null plus every bin tuple).
    double total_probability() const;

    bool operator==(const Pdf& o) const = default;

private:
    double support_ = 0.0;
    double null_mass_ = 0.0;
    std::vector<std::map<long, double>> components_;
};

class BoolMatrix {
public:
    BoolMatrix() = default;
    explicit BoolMatrix(int n, bool value = false) : n_(n), d_(static_cast<std::size_t>(n) * n, value ? 1 : 0) {}

    int size() const { return n_; }
    bool operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j] != 0; }
    void set(int i, int j, bool v) { d_[static_cast<std::size_t>(i) * n_ + j] = v ? 1 : 0; }
    std::size_t count() const;
    bool operator==(const BoolMatrix& o) const = default;

private:
    int n_ = 0;
    std::vector<std::uint8_t> d_;
};

// 0-based dense arc slot of (k, l) in a complete digraph of order n.
int arc_index(int k, int l, int n);
std::pair<int, int> arc_endpoints(int index, int n);
// 1-based arc label in row-major order, skipping loops: arc_number(1,2,3) == 1.
int arc_number(int k, int l, int n);

// Vertex and arc pdfs of a complete graph of order n. Arc pdfs are
// conditional on both endpoints being non-null; their support is u_j.
struct FirstOrderGraph {
    int n = 0;
    double z = 0.0;
    std::vector<Pdf> vertex_pdfs;
    std::vector<Pdf> arc_pdfs;
    Binning vertex_binning;
    Binning arc_binning;

    int order() const { return n; }
    int arc_count() const { return n * (n - 1); }
    const Pdf& vertex(int i) const { return vertex_pdfs[i]; }
    const Pdf& arc(int k, int l) const { return arc_pdfs[arc_index(k, l, n)]; }
    double u(int slot) const { return arc_pdfs[slot].support(); }

    double vertex_prob(int i, const AttrTuple& a) const;
    double arc_prob(int slot, const AttrTuple& b) const;
    // Unconditional: includes the chance that an endpoint is null.
    double arc_null_uncond(int slot) const;
    bool arc_always_null(int slot) const;
    bool arc_never_null(int slot) const;

    bool operator==(const FirstOrderGraph& o) const = default;
};

struct Forg : FirstOrderGraph {
    bool operator==(const Forg& o) const = default;
};

struct Relations {
    BoolMatrix a_v, o_v, e_v;
    BoolMatrix a_e, o_e, e_e;

    bool operator==(const Relations& o) const = default;
};

struct Fdg : FirstOrderGraph {
    Relations rel;
    std::optional<ArcOrder> arc_order;

    // Checks pdf sums, matrix sizes, symmetry/reflexivity and the
    // antagonism/occurrence/existence equivalences. Throws on failure.
    void validate() const;

    bool operator==(const Fdg& o) const = default;
};

// Source vertex -> target vertex, or kNullTarget for the null target.
using Labelling = std::vector<int>;
inline constexpr int kNullTarget = -1;

enum class ConstraintMode { restricted, relaxed };

struct CostWeights {
    double k1 = 1.0, k2 = 1.0, k3 = 1.0, k4 = 0.0, k5 = 0.0, k6 = 0.0, k7 = 0.0, k8 = 0.0;
    double kpr = 1e-4;
    bool planar = false;
    ConstraintMode mode = ConstraintMode::relaxed;

    double& k(int i);
    double k(int i) const;
    void validate() const;
    CostWeights scaled(double factor) const;
};

AttributedGraph extend_ag(const AttributedGraph& g, int k);
Fdg extend_fdg(const Fdg& f, int k);
FirstOrderGraph extend_first_order(const FirstOrderGraph& f, int k);

// Arc (i,j) of G -> (f(i), f(j)) or nullopt for the null arc.
std::map<std::pair<int, int>, std::optional<std::pair<int, int>>> induced_arc_map(const Labelling& f,
                                                                                 const AttributedGraph& g,
                                                                                 const Fdg& fdg);

double unconditional_arc_prob(const FirstOrderGraph& f, int slot, const AttrTuple& b);

struct CoOccurrence {
    BoolMatrix vertices;
    BoolMatrix arcs;
};
CoOccurrence co_occurrence(const Fdg& f);

struct RelationMismatch {
    std::string relation;
    int x = 0;
    int y = 0;
    bool stored = false;
    bool derived = false;
};

struct IdentityReport {
    std::vector<RelationMismatch> mismatches;
    std::vector<std::string> equivalence_failures;
    // Vertices j with E(i,j) and O(i,j) for every i.
    std::vector<int> existent_and_occurrent;
    bool ok() const { return mismatches.empty() && equivalence_failures.empty(); }
};

// `sample` holds the synthesis input already placed at F's vertex positions
// (order n each).
IdentityReport verify_identities(const Fdg& f, const std::vector<AttributedGraph>& sample);

std::string to_string(const AttrTuple& t);

} // namespace fdg
