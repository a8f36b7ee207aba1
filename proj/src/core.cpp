#include "fdg/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace fdg {

const AttrTuple* AttributedGraph::arc(int i, int j) const
{
    auto it = arcs.find({i, j});
    if (it == arcs.end() || it->second.is_null)
        return nullptr;
    return &it->second;
}

int AttributedGraph::non_null_vertex_count() const
{
    return static_cast<int>(std::count_if(vertices.begin(), vertices.end(), [](const AttrTuple& t) { return !t.is_null; }));
}

std::vector<int> AttributedGraph::out_targets(int i) const
{
    if (arc_order)
        return (*arc_order)[i];
    std::vector<int> out;
    for (auto it = arcs.lower_bound({i, 0}); it != arcs.end() && it->first.first == i; ++it)
        if (!it->second.is_null)
            out.push_back(it->first.second);
    return out;
}

void AttributedGraph::validate() const
{
    const int n = order();
    std::optional<std::size_t> varity, earity;
    for (const auto& v : vertices) {
        if (v.is_null) {
            if (!extended)
                throw Error(ErrorKind::invalid_input, "null vertex in a non-extended graph");
            continue;
        }
        if (v.values.empty())
            throw Error(ErrorKind::invalid_input, "non-null vertex tuple without components");
        if (varity && *varity != v.values.size())
            throw Error(ErrorKind::invalid_input, "vertex tuples differ in arity");
        varity = v.values.size();
    }
    for (const auto& [ij, b] : arcs) {
        auto [i, j] = ij;
        if (i == j)
            throw Error(ErrorKind::invalid_input, "self-loop");
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw Error(ErrorKind::invalid_input, "arc endpoint out of range");
        if (b.is_null) {
            if (!extended)
                throw Error(ErrorKind::invalid_input, "null arc in a non-extended graph");
            continue;
        }
        if (b.values.empty())
            throw Error(ErrorKind::invalid_input, "non-null arc tuple without components");
        if (earity && *earity != b.values.size())
            throw Error(ErrorKind::invalid_input, "arc tuples differ in arity");
        earity = b.values.size();
        if (vertices[i].is_null || vertices[j].is_null)
            throw Error(ErrorKind::invalid_input, "non-null arc with a null endpoint");
    }
    if (arc_order) {
        if (static_cast<int>(arc_order->size()) != n)
            throw Error(ErrorKind::invalid_input, "arc order size differs from graph order");
        for (int i = 0; i < n; ++i) {
            std::set<int> listed((*arc_order)[i].begin(), (*arc_order)[i].end());
            if (listed.size() != (*arc_order)[i].size())
                throw Error(ErrorKind::invalid_input, "arc order lists an arc twice");
            std::set<int> actual;
            for (int j = 0; j < n; ++j)
                if (has_arc(i, j))
                    actual.insert(j);
            if (listed != actual)
                throw Error(ErrorKind::invalid_input, "arc order does not match outgoing arcs of vertex " + std::to_string(i));
        }
    }
}

long Binning::bin(double v, std::size_t component) const
{
    return static_cast<long>(std::floor(v / width(component)));
}

std::vector<long> Binning::bins(const AttrTuple& t) const
{
    std::vector<long> out(t.values.size());
    for (std::size_t c = 0; c < t.values.size(); ++c)
        out[c] = bin(t.values[c], c);
    return out;
}

Pdf Pdf::null_only(double support)
{
    Pdf p;
    p.support_ = support;
    p.null_mass_ = support;
    return p;
}

Pdf Pdf::from_probabilities(double null_prob, const std::map<long, double>& bins, double support)
{
    Pdf p;
    p.support_ = support;
    p.null_mass_ = null_prob * support;
    if (!bins.empty()) {
        p.components_.resize(1);
        for (auto [b, pr] : bins)
            if (pr > 0.0)
                p.components_[0][b] = pr * support;
    }
    return p;
}

Pdf Pdf::from_masses(double support, double null_mass, std::vector<std::map<long, double>> components)
{
    if (!(support >= 0.0) || !(null_mass >= 0.0) || null_mass > support)
        throw Error(ErrorKind::invalid_input, "pdf masses out of range");
    Pdf p;
    p.support_ = support;
    p.null_mass_ = null_mass;
    p.components_ = std::move(components);
    return p;
}

void Pdf::add_null(double weight)
{
    support_ += weight;
    null_mass_ += weight;
}

void Pdf::add(const std::vector<long>& bins, double weight)
{
    if (components_.empty())
        components_.resize(bins.size());
    if (components_.size() != bins.size())
        throw Error(ErrorKind::invalid_input, "tuple arity differs from pdf arity");
    support_ += weight;
    for (std::size_t c = 0; c < bins.size(); ++c)
        components_[c][bins[c]] += weight;
}

void Pdf::merge(const Pdf& other)
{
    if (components_.empty())
        components_.resize(other.components_.size());
    if (!other.components_.empty() && components_.size() != other.components_.size())
        throw Error(ErrorKind::invalid_input, "merging pdfs of different arity");
    support_ += other.support_;
    null_mass_ += other.null_mass_;
    for (std::size_t c = 0; c < other.components_.size(); ++c)
        for (auto [b, m] : other.components_[c])
            components_[c][b] += m;
}

double Pdf::prob_null() const
{
    if (support_ <= 0.0)
        return 1.0;
    return null_mass_ / support_;
}

double Pdf::component_prob(std::size_t c, long b) const
{
    const double nn = non_null_mass();
    if (nn <= 0.0 || c >= components_.size())
        return 0.0;
    auto it = components_[c].find(b);
    return it == components_[c].end() ? 0.0 : it->second / nn;
}

double Pdf::prob(const std::vector<long>& bins) const
{
    const double nn = non_null_mass();
    if (support_ <= 0.0 || nn <= 0.0 || bins.size() != components_.size())
        return 0.0;
    // Single component: mass / support directly, keeps frequencies exact.
    if (bins.size() == 1) {
        auto it = components_[0].find(bins[0]);
        return it == components_[0].end() ? 0.0 : it->second / support_;
    }
    double p = nn / support_;
    for (std::size_t c = 0; c < bins.size(); ++c)
        p *= component_prob(c, bins[c]);
    return p;
}

static double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

double Pdf::entropy_bits() const
{
    if (support_ <= 0.0)
        return 0.0;
    const double p0 = prob_null();
    double h = plogp(p0) + plogp(1.0 - p0);
    const double nn = non_null_mass();
    if (nn <= 0.0)
        return h;
    for (const auto& comp : components_) {
        double hc = 0.0;
        for (auto [b, m] : comp)
            hc += plogp(m / nn);
        h += (1.0 - p0) * hc;
    }
    return h;
}

double Pdf::total_probability() const
{
    if (support_ <= 0.0)
        return 1.0;
    double total = prob_null();
    const double nn = non_null_mass();
    if (nn <= 0.0 || components_.empty())
        return total;
    double prod = nn / support_;
    for (const auto& comp : components_) {
        double s = 0.0;
        for (auto [b, m] : comp)
            s += m / nn;
        prod *= s;
    }
    return total + prod;
}

std::size_t BoolMatrix::count() const
{
    return static_cast<std::size_t>(std::count(d_.begin(), d_.end(), 1));
}

int arc_index(int k, int l, int n)
{
    if (k < 0 || l < 0 || k >= n || l >= n || k == l)
        throw Error(ErrorKind::invalid_index, "arc (" + std::to_string(k) + "," + std::to_string(l) + ") invalid for order " + std::to_string(n));
    return l < k ? k * (n - 1) + l : k * (n - 1) + l - 1;
}

std::pair<int, int> arc_endpoints(int index, int n)
{
    if (n < 2 || index < 0 || index >= n * (n - 1))
        throw Error(ErrorKind::invalid_index, "arc slot out of range");
    const int k = index / (n - 1);
    const int r = index % (n - 1);
    return {k, r < k ? r : r + 1};
}

int arc_number(int k, int l, int n)
{
    if (k < 1 || l < 1 || k > n || l > n || k == l)
        throw Error(ErrorKind::invalid_index, "arc_number arguments out of range");
    return l < k ? (k - 1) * (n - 1) + l : (k - 1) * (n - 1) + l - 1;
}

double FirstOrderGraph::vertex_prob(int i, const AttrTuple& a) const
{
    const Pdf& p = vertex_pdfs[i];
    return a.is_null ? p.prob_null() : p.prob(vertex_binning.bins(a));
}

double FirstOrderGraph::arc_prob(int slot, const AttrTuple& b) const
{
    const Pdf& q = arc_pdfs[slot];
    return b.is_null ? q.prob_null() : q.prob(arc_binning.bins(b));
}

double FirstOrderGraph::arc_null_uncond(int slot) const
{
    auto [a, b] = arc_endpoints(slot, n);
    return 1.0 - (1.0 - arc_pdfs[slot].prob_null()) * (1.0 - vertex_pdfs[a].prob_null()) * (1.0 - vertex_pdfs[b].prob_null());
}

bool FirstOrderGraph::arc_always_null(int slot) const
{
    auto [a, b] = arc_endpoints(slot, n);
    return arc_pdfs[slot].always_null() || vertex_pdfs[a].always_null() || vertex_pdfs[b].always_null();
}

bool FirstOrderGraph::arc_never_null(int slot) const
{
    auto [a, b] = arc_endpoints(slot, n);
    return arc_pdfs[slot].never_null() && vertex_pdfs[a].never_null() && vertex_pdfs[b].never_null();
}

void Fdg::validate() const
{
    if (static_cast<int>(vertex_pdfs.size()) != n || static_cast<int>(arc_pdfs.size()) != arc_count())
        throw Error(ErrorKind::invalid_input, "pdf count does not match order");
    auto check_sum = [](const Pdf& p, const char* what) {
        if (std::abs(p.total_probability() - 1.0) > 1e-9)
            throw Error(ErrorKind::invalid_input, std::string(what) + " pdf does not sum to 1");
    };
    for (const auto& p : vertex_pdfs)
        check_sum(p, "vertex");
    for (const auto& q : arc_pdfs)
        check_sum(q, "arc");
    const int m = arc_count();
    for (const BoolMatrix* b : {&rel.a_v, &rel.o_v, &rel.e_v})
        if (b->size() != n)
            throw Error(ErrorKind::invalid_input, "vertex relation size mismatch");
    for (const BoolMatrix* b : {&rel.a_e, &rel.o_e, &rel.e_e})
        if (b->size() != m)
            throw Error(ErrorKind::invalid_input, "arc relation size mismatch");
    auto check = [](const BoolMatrix& a, const BoolMatrix& o, const BoolMatrix& e, int size, auto always_null,
                    auto never_null, const char* role) {
        for (int x = 0; x < size; ++x) {
            if (!o(x, x))
                throw Error(ErrorKind::invalid_input, std::string(role) + " occurrence not reflexive");
            for (int y = 0; y < size; ++y) {
                if (a(x, y) != a(y, x) || e(x, y) != e(y, x))
                    throw Error(ErrorKind::invalid_input, std::string(role) + " antagonism/existence not symmetric");
                if ((a(x, y) && o(x, y)) != always_null(x))
                    throw Error(ErrorKind::invalid_input, std::string(role) + " antagonism+occurrence identity fails");
                if ((e(x, y) && o(x, y)) != never_null(y))
                    throw Error(ErrorKind::invalid_input, std::string(role) + " existence+occurrence identity fails");
            }
        }
    };
    check(rel.a_v, rel.o_v, rel.e_v, n, [&](int i) { return vertex_pdfs[i].always_null(); },
          [&](int i) { return vertex_pdfs[i].never_null(); }, "vertex");
    check(rel.a_e, rel.o_e, rel.e_e, m, [&](int s) { return arc_always_null(s); },
          [&](int s) { return arc_never_null(s); }, "arc");
}

double& CostWeights::k(int i)
{
    switch (i) {
    case 1: return k1;
    case 2: return k2;
    case 3: return k3;
    case 4: return k4;
    case 5: return k5;
    case 6: return k6;
    case 7: return k7;
    case 8: return k8;
    }
    throw Error(ErrorKind::invalid_index, "weight index must be 1..8");
}

double CostWeights::k(int i) const { return const_cast<CostWeights*>(this)->k(i); }

void CostWeights::validate() const
{
    if (!(kpr > 0.0 && kpr < 1.0))
        throw Error(ErrorKind::config, "K_pr must lie strictly between 0 and 1");
    for (int i = 1; i <= 8; ++i)
        if (!(k(i) >= 0.0))
            throw Error(ErrorKind::config, "weights must be non-negative");
}

CostWeights CostWeights::scaled(double factor) const
{
    CostWeights w = *this;
    for (int i = 1; i <= 8; ++i)
        w.k(i) *= factor;
    return w;
}

AttributedGraph extend_ag(const AttributedGraph& g, int k)
{
    if (k < g.order())
        throw Error(ErrorKind::invalid_extension, "cannot extend a graph of order " + std::to_string(g.order()) + " to " + std::to_string(k));
    AttributedGraph out = g;
    out.vertices.resize(k, AttrTuple::null());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j)
                out.arcs.try_emplace({i, j}, AttrTuple::null());
    if (out.arc_order)
        out.arc_order->resize(k);
    out.extended = true;
    return out;
}

FirstOrderGraph extend_first_order(const FirstOrderGraph& f, int k)
{
    if (k < f.n)
        throw Error(ErrorKind::invalid_extension, "cannot extend an FDG of order " + std::to_string(f.n) + " to " + std::to_string(k));
    FirstOrderGraph out;
    out.n = k;
    out.z = f.z;
    out.vertex_binning = f.vertex_binning;
    out.arc_binning = f.arc_binning;
    out.vertex_pdfs = f.vertex_pdfs;
    out.vertex_pdfs.resize(k, Pdf::null_only(f.z));
    out.arc_pdfs.assign(static_cast<std::size_t>(k) * (k - 1), Pdf());
    for (int a = 0; a < f.n; ++a)
        for (int b = 0; b < f.n; ++b)
            if (a != b)
                out.arc_pdfs[arc_index(a, b, k)] = f.arc_pdfs[arc_index(a, b, f.n)];
    return out;
}

namespace {

// Fills relation entries that involve at least one element flagged `fresh`,
// following the null-element tables.
void fill_null_relations(BoolMatrix& a, BoolMatrix& o, BoolMatrix& e, const std::vector<bool>& fresh,
                         const std::vector<bool>& always_null, const std::vector<bool>& never_null)
{
    const int size = a.size();
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) {
            if (!fresh[x] && !fresh[y])
                continue;
            a.set(x, y, always_null[x] || always_null[y]);
            o.set(x, y, always_null[x]);
            // Existence between a null element and y holds iff y is never null.
            bool ex = false;
            if (always_null[x] && !always_null[y])
                ex = never_null[y];
            else if (always_null[y] && !always_null[x])
                ex = never_null[x];
            e.set(x, y, ex);
        }
}

} // namespace

Fdg extend_fdg(const Fdg& f, int k)
{
    if (k < f.n)
        throw Error(ErrorKind::invalid_extension, "cannot extend an FDG of order " + std::to_string(f.n) + " to " + std::to_string(k));
    if (k == f.n)
        return f;
    Fdg out;
    static_cast<FirstOrderGraph&>(out) = extend_first_order(f, k);
    const int m = out.arc_count();

    out.rel.a_v = BoolMatrix(k);
    out.rel.o_v = BoolMatrix(k);
    out.rel.e_v = BoolMatrix(k);
    for (int x = 0; x < f.n; ++x)
        for (int y = 0; y < f.n; ++y) {
            out.rel.a_v.set(x, y, f.rel.a_v(x, y));
            out.rel.o_v.set(x, y, f.rel.o_v(x, y));
            out.rel.e_v.set(x, y, f.rel.e_v(x, y));
        }
    std::vector<bool> fresh(k), an(k), nn(k);
    for (int x = 0; x < k; ++x) {
        fresh[x] = x >= f.n;
        an[x] = out.vertex_pdfs[x].always_null();
        nn[x] = out.vertex_pdfs[x].never_null();
    }
    fill_null_relations(out.rel.a_v, out.rel.o_v, out.rel.e_v, fresh, an, nn);

    out.rel.a_e = BoolMatrix(m);
    out.rel.o_e = BoolMatrix(m);
    out.rel.e_e = BoolMatrix(m);
    std::vector<int> old_slot(m, -1);
    for (int s = 0; s < m; ++s) {
        auto [a, b] = arc_endpoints(s, k);
        if (a < f.n && b < f.n)
            old_slot[s] = arc_index(a, b, f.n);
    }
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t)
            if (old_slot[s] >= 0 && old_slot[t] >= 0) {
                out.rel.a_e.set(s, t, f.rel.a_e(old_slot[s], old_slot[t]));
                out.rel.o_e.set(s, t, f.rel.o_e(old_slot[s], old_slot[t]));
                out.rel.e_e.set(s, t, f.rel.e_e(old_slot[s], old_slot[t]));
            }
    std::vector<bool> afresh(m), aan(m), ann(m);
    for (int s = 0; s < m; ++s) {
        afresh[s] = old_slot[s] < 0;
        aan[s] = out.arc_always_null(s);
        ann[s] = out.arc_never_null(s);
    }
    fill_null_relations(out.rel.a_e, out.rel.o_e, out.rel.e_e, afresh, aan, ann);

    if (f.arc_order) {
        out.arc_order = *f.arc_order;
        out.arc_order->resize(k);
    }
    return out;
}

std::map<std::pair<int, int>, std::optional<std::pair<int, int>>> induced_arc_map(const Labelling& f,
                                                                                 const AttributedGraph& g,
                                                                                 const Fdg& fdg)
{
    if (static_cast<int>(f.size()) != g.order())
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every vertex");
    std::map<std::pair<int, int>, std::optional<std::pair<int, int>>> out;
    for (const auto& [ij, b] : g.arcs) {
        if (b.is_null)
            continue;
        auto [i, j] = ij;
        const int p = f[i], q = f[j];
        if (p >= fdg.n || q >= fdg.n)
            throw Error(ErrorKind::invalid_labelling, "labelling target out of range");
        if (p == kNullTarget || q == kNullTarget)
            out[ij] = std::nullopt;
        else
            out[ij] = std::make_pair(p, q);
    }
    return out;
}

double unconditional_arc_prob(const FirstOrderGraph& f, int slot, const AttrTuple& b)
{
    if (b.is_null)
        return f.arc_null_uncond(slot);
    auto [a, c] = arc_endpoints(slot, f.n);
    return f.arc_prob(slot, b) * (1.0 - f.vertex_pdfs[a].prob_null()) * (1.0 - f.vertex_pdfs[c].prob_null());
}

CoOccurrence co_occurrence(const Fdg& f)
{
    auto build = [](const BoolMatrix& o) {
        BoolMatrix c(o.size());
        for (int x = 0; x < o.size(); ++x)
            for (int y = 0; y < o.size(); ++y)
                c.set(x, y, o(x, y) && o(y, x));
        return c;
    };
    return {build(f.rel.o_v), build(f.rel.o_e)};
}

namespace {

void compare_relations(const char* role, const std::vector<std::vector<bool>>& present, const BoolMatrix& a,
                       const BoolMatrix& o, const BoolMatrix& e, IdentityReport& report)
{
    const int size = static_cast<int>(present.size());
    const int z = size ? static_cast<int>(present[0].size()) : 0;
    std::vector<int> nulls(size, 0);
    for (int x = 0; x < size; ++x)
        for (int g = 0; g < z; ++g)
            nulls[x] += present[x][g] ? 0 : 1;
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) {
            int both_null = 0;
            for (int g = 0; g < z; ++g)
                both_null += (!present[x][g] && !present[y][g]) ? 1 : 0;
            // Counts scaled by z: antagonism p_x + p_y - p_xy = 1, occurrence p_y - p_xy = 0,
            // existence p_xy = 0 (p = joint/marginal null probabilities).
            const bool da = nulls[x] + nulls[y] - both_null == z;
            const bool d_o = nulls[y] - both_null == 0;
            const bool de = both_null == 0;
            auto add = [&](const char* rel, bool stored, bool derived) {
                if (stored != derived)
                    report.mismatches.push_back({std::string(rel) + "_" + role, x, y, stored, derived});
            };
            add("A", a(x, y), da);
            add("O", o(x, y), d_o);
            add("E", e(x, y), de);
        }
}

void check_equivalences(const char* role, int size, const BoolMatrix& a, const BoolMatrix& o, const BoolMatrix& e,
                        const std::vector<bool>& always_null, const std::vector<bool>& never_null,
                        IdentityReport& report)
{
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) {
            if ((a(x, y) && o(x, y)) != always_null[x])
                report.equivalence_failures.push_back(std::string("A&O vs always-null, ") + role + " (" +
                                                      std::to_string(x) + "," + std::to_string(y) + ")");
            if ((e(x, y) && o(x, y)) != never_null[y])
                report.equivalence_failures.push_back(std::string("E&O vs never-null, ") + role + " (" +
                                                      std::to_string(x) + "," + std::to_string(y) + ")");
        }
}

} // namespace

IdentityReport verify_identities(const Fdg& f, const std::vector<AttributedGraph>& sample)
{
    const int n = f.n;
    const int m = f.arc_count();
    for (const auto& g : sample)
        if (g.order() != n)
            throw Error(ErrorKind::invalid_sample, "sample graph of order " + std::to_string(g.order()) + " does not match FDG order " + std::to_string(n));
    const int z = static_cast<int>(sample.size());
    std::vector<std::vector<bool>> vp(n, std::vector<bool>(z)), ap(m, std::vector<bool>(z));
    for (int g = 0; g < z; ++g) {
        for (int i = 0; i < n; ++i)
            vp[i][g] = !sample[g].vertices[i].is_null;
        for (int s = 0; s < m; ++s) {
            auto [a, b] = arc_endpoints(s, n);
            ap[s][g] = vp[a][g] && vp[b][g] && sample[g].has_arc(a, b);
        }
    }
    IdentityReport report;
    compare_relations("vertex", vp, f.rel.a_v, f.rel.o_v, f.rel.e_v, report);
    compare_relations("arc", ap, f.rel.a_e, f.rel.o_e, f.rel.e_e, report);

    std::vector<bool> van(n), vnn(n), aan(m), ann(m);
    for (int i = 0; i < n; ++i) {
        van[i] = f.vertex_pdfs[i].always_null();
        vnn[i] = f.vertex_pdfs[i].never_null();
    }
    for (int s = 0; s < m; ++s) {
        aan[s] = f.arc_always_null(s);
        ann[s] = f.arc_never_null(s);
    }
    check_equivalences("vertex", n, f.rel.a_v, f.rel.o_v, f.rel.e_v, van, vnn, report);
    check_equivalences("arc", m, f.rel.a_e, f.rel.o_e, f.rel.e_e, aan, ann, report);

    for (int j = 0; j < n; ++j) {
        bool all = true;
        for (int i = 0; i < n && all; ++i)
            all = f.rel.e_v(i, j) && f.rel.o_v(i, j);
        if (all)
            report.existent_and_occurrent.push_back(j);
        if (vnn[j] && !all)
            report.equivalence_failures.push_back("strict non-null vertex " + std::to_string(j) + " lacks existence/occurrence");
    }
    return report;
}

std::string to_string(const AttrTuple& t)
{
    if (t.is_null)
        return "#";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t c = 0; c < t.values.size(); ++c) {
        if (c)
            os << ',';
        os << t.values[c];
    }
    return os.str();
}

} // namespace fdg
