#include "fdg/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fdg/synthesis.hpp"

namespace fdg {

void EditCosts::validate() const
{
    if (vertex_insert < 0 || arc_insert < 0 || vertex_delete < 0 || arc_delete < 0)
        throw Error(ErrorKind::config, "edit costs must be non-negative");
    if (!vertex_subst || !arc_subst)
        throw Error(ErrorKind::config, "substitution cost functions are required");
}

double euclidean_difference(const AttrTuple& a, const AttrTuple& b)
{
    if (a.values.size() != b.values.size())
        throw Error(ErrorKind::invalid_input, "attribute tuples of different arity");
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        s += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
    return std::sqrt(s);
}

EditCosts edit_costs_preset(const std::string& name)
{
    EditCosts c;
    if (name == "exact") {
        c.vertex_subst = c.arc_subst = [](const AttrTuple& a, const AttrTuple& b) { return a == b ? 0.0 : 1.0; };
    } else if (name == "squared") {
        c.vertex_subst = c.arc_subst = [](const AttrTuple& a, const AttrTuple& b) {
            const double d = euclidean_difference(a, b);
            return d * d > 4.0 ? 1.0 : 0.0;
        };
    } else if (name == "abs") {
        // Read as: 5 <= |d| <= 10 costs one half.
        c.vertex_subst = c.arc_subst = [](const AttrTuple& a, const AttrTuple& b) {
            const double d = euclidean_difference(a, b);
            if (d > 10.0)
                return 1.0;
            return d >= 5.0 ? 0.5 : 0.0;
        };
    } else {
        throw Error(ErrorKind::config, "unknown edit cost preset '" + name + "'");
    }
    return c;
}

double edit_cost(const AttributedGraph& g1, const AttributedGraph& g2, const Labelling& f, const EditCosts& c)
{
    const int n = g1.order(), m = g2.order();
    if (static_cast<int>(f.size()) != n)
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every vertex");
    check_injective(f, m);
    std::vector<bool> hit(m, false);
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
        if (f[i] == kNullTarget) {
            cost += c.vertex_delete;
        } else {
            cost += c.vertex_subst(g1.vertices[i], g2.vertices[f[i]]);
            hit[f[i]] = true;
        }
    }
    for (int j = 0; j < m; ++j)
        if (!hit[j])
            cost += c.vertex_insert;
    std::map<std::pair<int, int>, bool> covered;
    for (const auto& [ij, b] : g1.arcs) {
        if (b.is_null)
            continue;
        const int p = f[ij.first], q = f[ij.second];
        const AttrTuple* image = p != kNullTarget && q != kNullTarget ? g2.arc(p, q) : nullptr;
        if (image) {
            cost += c.arc_subst(b, *image);
            covered[{p, q}] = true;
        } else {
            cost += c.arc_delete;
        }
    }
    for (const auto& [pq, b] : g2.arcs)
        if (!b.is_null && !covered.count(pq))
            cost += c.arc_insert;
    return cost;
}

namespace {

class EditSearch {
public:
    EditSearch(const AttributedGraph& g1, const AttributedGraph& g2, const EditCosts& c)
        : g1_(g1), g2_(g2), c_(c), n_(g1.order()), m_(g2.order())
    {
        vs_.assign(static_cast<std::size_t>(n_) * (m_ + 1), c.vertex_delete);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j)
                vs_[i * (m_ + 1) + j] = c.vertex_subst(g1.vertices[i], g2.vertices[j]);
        t_.assign(n_, -1);
        inv_.assign(m_, -1);
    }

    EditResult run()
    {
        rec(0, 0.0);
        EditResult r;
        r.cost = best_;
        r.explored_nodes = nodes_;
        r.labelling.resize(n_);
        for (int i = 0; i < n_; ++i)
            r.labelling[i] = best_t_[i] == m_ ? kNullTarget : best_t_[i];
        return r;
    }

private:
    double vs(int i, int t) const { return vs_[i * (m_ + 1) + t]; }

    double arc_pair(int p, int tp, int s, int ts) const
    {
        double cost = 0.0;
        for (int dir = 0; dir < 2; ++dir) {
            const int a = dir ? s : p, b = dir ? p : s;
            const int ta = dir ? ts : tp, tb = dir ? tp : ts;
            const AttrTuple* e1 = g1_.arc(a, b);
            const AttrTuple* e2 = ta < m_ && tb < m_ ? g2_.arc(ta, tb) : nullptr;
            if (e1 && e2)
                cost += c_.arc_subst(*e1, *e2);
            else if (e1)
                cost += c_.arc_delete;
            else if (e2)
                cost += c_.arc_insert;
        }
        return cost;
    }

    double leaf_cost() const
    {
        double cost = 0.0;
        for (int j = 0; j < m_; ++j)
            if (inv_[j] < 0)
                cost += c_.vertex_insert;
        for (const auto& [xy, b] : g2_.arcs)
            if (!b.is_null && (inv_[xy.first] < 0 || inv_[xy.second] < 0))
                cost += c_.arc_insert;
        return cost;
    }

    // Admissible: vertex terms of the unassigned rows plus forced insertions.
    double bound(int from) const
    {
        int free = 0;
        for (int j = 0; j < m_; ++j)
            free += inv_[j] < 0;
        double h = 0.0;
        for (int i = from; i < n_; ++i) {
            double best = vs(i, m_);
            for (int j = 0; j < m_; ++j)
                if (inv_[j] < 0)
                    best = std::min(best, vs(i, j));
            h += best;
        }
        const int rest = n_ - from;
        if (free > rest)
            h += (free - rest) * c_.vertex_insert;
        return h;
    }

    void rec(int p, double g)
    {
        ++nodes_;
        if (p == n_) {
            const double cost = g + leaf_cost();
            if (cost < best_ || (cost == best_ && t_ < best_t_)) {
                best_ = cost;
                best_t_ = t_;
            }
            return;
        }
        struct Cand {
            int t;
            double branch, l;
        };
        std::vector<Cand> cands;
        for (int t = 0; t <= m_; ++t) {
            if (t < m_ && inv_[t] >= 0)
                continue;
            double branch = vs(p, t);
            for (int s = 0; s < p; ++s)
                branch += arc_pair(p, t, s, t_[s]);
            if (t < m_)
                inv_[t] = p;
            const double l = g + branch + bound(p + 1);
            if (t < m_)
                inv_[t] = -1;
            cands.push_back({t, branch, l});
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.l < b.l; });
        for (const Cand& cand : cands) {
            if (cand.l > best_ + 1e-9 * std::max(1.0, std::abs(best_)))
                break;
            t_[p] = cand.t;
            if (cand.t < m_)
                inv_[cand.t] = p;
            rec(p + 1, g + cand.branch);
            if (cand.t < m_)
                inv_[cand.t] = -1;
            t_[p] = -1;
        }
    }

    const AttributedGraph& g1_;
    const AttributedGraph& g2_;
    const EditCosts& c_;
    int n_, m_;
    std::vector<double> vs_;
    std::vector<int> t_, inv_, best_t_;
    double best_ = std::numeric_limits<double>::infinity();
    std::uint64_t nodes_ = 0;
};

} // namespace

EditResult edit_distance(const AttributedGraph& g1, const AttributedGraph& g2, const EditCosts& c)
{
    c.validate();
    return EditSearch(g1, g2, c).run();
}

KnnResult knn_classify(const AttributedGraph& test, const std::vector<LabelledGraph>& refs, int k,
                       const EditCosts& c)
{
    if (refs.empty())
        throw Error(ErrorKind::invalid_input, "kNN needs at least one reference graph");
    if (k < 1)
        throw Error(ErrorKind::config, "k must be at least 1");
    std::vector<std::pair<double, int>> d;
    d.reserve(refs.size());
    for (std::size_t r = 0; r < refs.size(); ++r)
        d.emplace_back(edit_distance(test, refs[r].graph, c).cost, static_cast<int>(r));
    std::stable_sort(d.begin(), d.end());
    d.resize(std::min<std::size_t>(d.size(), k));

    std::map<int, std::pair<int, double>> votes;  // label -> (count, distance sum)
    for (auto [dist, r] : d) {
        auto& v = votes[refs[r].label];
        ++v.first;
        v.second += dist;
    }
    int best_label = 0;
    int best_count = -1;
    double best_mean = 0.0;
    // Map iteration is by ascending label, so strict comparisons keep the lowest.
    for (const auto& [label, v] : votes) {
        const double mean = v.second / v.first;
        if (v.first > best_count || (v.first == best_count && mean < best_mean)) {
            best_label = label;
            best_count = v.first;
            best_mean = mean;
        }
    }
    return {best_label, d};
}

} // namespace fdg
