#include "fdg/matching.hpp"

#include <algorithm>
#include <cmath>

#include "fdg/synthesis.hpp"

namespace fdg {

bool AllowedMask::subset_of(const AllowedMask& other) const
{
    if (other.n_ != n_ || other.m_ != m_)
        return false;
    for (std::size_t k = 0; k < d_.size(); ++k)
        if (d_[k] && !other.d_[k])
            return false;
    return true;
}

double probability_cost(double p, double kpr)
{
    if (p >= kpr)
        return std::log(p) / std::log(kpr);
    return 1.0;
}

double vertex_cost(const AttrTuple& a, const Pdf& p, const Binning& binning, double kpr)
{
    const double pr = a.is_null ? p.prob_null() : p.prob(binning.bins(a));
    return probability_cost(pr, kpr);
}

double arc_cost(const AttrTuple& b, const Pdf& q, const Binning& binning, bool endpoint_null, double kpr)
{
    if (endpoint_null)
        return b.is_null ? 0.0 : 1.0;
    const double pr = b.is_null ? q.prob_null() : q.prob(binning.bins(b));
    return probability_cost(pr, kpr);
}

static bool vertex_live(int p, const Fdg& f) { return p != kNullTarget && !f.vertex_pdfs[p].always_null(); }
static bool arc_live(int s, const Fdg& f) { return s >= 0 && !f.arc_always_null(s); }

int second_order_vertex_cost(Relation kind, bool ai_null, bool aj_null, int p, int q, const Fdg& f)
{
    switch (kind) {
    case Relation::antagonism:
        return !ai_null && !aj_null && vertex_live(p, f) && vertex_live(q, f) && f.rel.a_v(p, q) ? 1 : 0;
    case Relation::occurrence:
        // Occurrence towards an extension null vertex is 0 by the null-element table.
        return !ai_null && aj_null && vertex_live(p, f) && q != kNullTarget && f.rel.o_v(p, q) ? 1 : 0;
    case Relation::existence:
        return ai_null && aj_null && vertex_live(p, f) && vertex_live(q, f) && f.rel.e_v(p, q) ? 1 : 0;
    }
    return 0;
}

int second_order_arc_cost(Relation kind, bool bm_null, bool bn_null, int s, int t, const Fdg& f)
{
    switch (kind) {
    case Relation::antagonism:
        return !bm_null && !bn_null && arc_live(s, f) && arc_live(t, f) && f.rel.a_e(s, t) ? 1 : 0;
    case Relation::occurrence:
        return !bm_null && bn_null && arc_live(s, f) && t >= 0 && f.rel.o_e(s, t) ? 1 : 0;
    case Relation::existence:
        return bm_null && bn_null && arc_live(s, f) && arc_live(t, f) && f.rel.e_e(s, t) ? 1 : 0;
    }
    return 0;
}

bool cyclically_increasing(const std::vector<int>& seq)
{
    const std::size_t len = seq.size();
    if (len <= 2)
        return true;
    int descents = 0;
    for (std::size_t i = 0; i < len; ++i)
        if (seq[i] > seq[(i + 1) % len])
            ++descents;
    return descents <= 1;
}

namespace {

enum Term { kAv = 0, kAe = 1, kOv = 2, kOe = 3, kEv = 4, kEe = 5 };

// Cost tables for one (AG, FDG, weights) triple. Target index m stands for
// the shared null FDG vertex.
class Context {
public:
    Context(const AttributedGraph& g, const Fdg& f, const CostWeights& w, bool all_terms)
        : g_(g), f_(f), w_(w), n(g.order()), m(f.n), relaxed(w.mode == ConstraintMode::relaxed)
    {
        w.validate();
        vcost.assign(static_cast<std::size_t>(n) * (m + 1), 1.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j)
                vcost[i * (m + 1) + j] = vertex_cost(g.vertices[i], f.vertex_pdfs[j], f.vertex_binning, w.kpr);
            vcost[i * (m + 1) + m] = g.vertices[i].is_null ? 0.0 : 1.0;
        }
        del.resize(m);
        for (int j = 0; j < m; ++j)
            del[j] = probability_cost(f.vertex_pdfs[j].prob_null(), w.kpr);

        agarc.assign(static_cast<std::size_t>(n) * n, -1);
        std::vector<const AttrTuple*> arcs;
        for (const auto& [ij, b] : g.arcs) {
            if (b.is_null)
                continue;
            agarc[ij.first * n + ij.second] = static_cast<int>(arcs.size());
            arcs.push_back(&b);
        }
        const std::size_t mm = static_cast<std::size_t>(m) * m;
        ecost.assign(arcs.size() * mm, 1.0);
        eabs.assign(mm, 0.0);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) {
                if (p == q)
                    continue;
                const int s = arc_index(p, q, m);
                const Pdf& pdf = f.arc_pdfs[s];
                eabs[p * m + q] = probability_cost(pdf.prob_null(), w.kpr);
                for (std::size_t a = 0; a < arcs.size(); ++a)
                    ecost[a * mm + p * m + q] = arc_cost(*arcs[a], pdf, f.arc_binning, false, w.kpr);
            }

        slot.assign(mm, -1);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                if (p != q)
                    slot[p * m + q] = arc_index(p, q, m);

        gav = BoolMatrix(m);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                gav.set(p, q, p != q && second_order_vertex_cost(Relation::antagonism, false, false, p, q, f));

        const bool restricted = !relaxed;
        for (int k = 0; k < 6; ++k)
            need[k] = all_terms || restricted || w.k(k + 3) > 0.0;
        // Self-pairs are excluded from every second-order sum.
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) {
                if (p == q)
                    continue;
                if (need[kAv] && p < q && second_order_vertex_cost(Relation::antagonism, false, false, p, q, f))
                    va.emplace_back(p, q);
                if (need[kOv] && second_order_vertex_cost(Relation::occurrence, false, true, p, q, f))
                    vo.emplace_back(p, q);
                if (need[kEv] && p < q && second_order_vertex_cost(Relation::existence, true, true, p, q, f))
                    ve.emplace_back(p, q);
            }
        const int ma = f.arc_count();
        live.resize(ma);
        for (int s = 0; s < ma; ++s)
            live[s] = arc_live(s, f);
        if (need[kAe] || need[kOe] || need[kEe])
            for (int s = 0; s < ma; ++s) {
                if (!live[s])
                    continue;
                for (int t = 0; t < ma; ++t) {
                    if (s == t)
                        continue;
                    if (need[kAe] && s < t && live[t] && f.rel.a_e(s, t))
                        aa.emplace_back(s, t);
                    if (need[kOe] && f.rel.o_e(s, t))
                        ao.emplace_back(s, t);
                    if (need[kEe] && s < t && live[t] && f.rel.e_e(s, t))
                        ae.emplace_back(s, t);
                }
            }

        planar = w.planar;
        if (planar) {
            if (!g.arc_order || !f.arc_order)
                throw Error(ErrorKind::missing_order, "planar matching needs arc orders on both graphs");
            fpos.assign(mm, -1);
            for (int d = 0; d < m; ++d) {
                const auto& ord = (*f.arc_order)[d];
                for (std::size_t k = 0; k < ord.size(); ++k)
                    fpos[d * m + ord[k]] = static_cast<int>(k);
            }
            gout.resize(n);
            gin.resize(n);
            for (int t = 0; t < n; ++t) {
                gout[t] = (*g.arc_order)[t];
                for (int x : gout[t])
                    gin[x].push_back(t);
            }
        }
    }

    double vc(int i, int t) const { return vcost[i * (m + 1) + t]; }

    // Ordered AG pair (i,k) mapped onto targets (p,q), with m for the null target.
    double pair_cost(int i, int k, int p, int q) const
    {
        const int id = agarc[i * n + k];
        if (p == m || q == m)
            return id >= 0 ? 1.0 : 0.0;
        if (id >= 0)
            return ecost[static_cast<std::size_t>(id) * m * m + p * m + q];
        return eabs[p * m + q];
    }

    bool ag_arc(int i, int k) const { return agarc[i * n + k] >= 0; }
    int fslot(int p, int q) const { return slot[p * m + q]; }
    bool guarded_ae(int s, int t) const { return s != t && live[s] && live[t] && f_.rel.a_e(s, t); }

    // t: per AG vertex, target in [0, m].
    bool vertex_cyclic(const std::vector<int>& t, int v) const
    {
        const int d = t[v];
        if (d == m)
            return true;
        std::vector<int> seq;
        for (int x : gout[v]) {
            const int w = t[x];
            if (w < 0 || w == m)
                continue;
            const int pos = fpos[d * m + w];
            if (pos >= 0)
                seq.push_back(pos);
        }
        return cyclically_increasing(seq);
    }

    LabellingEvaluation eval(const std::vector<int>& t) const
    {
        LabellingEvaluation e;
        std::vector<int> inv(m, -1);
        for (int i = 0; i < n; ++i) {
            e.vertex_cost += vc(i, t[i]);
            if (t[i] < m)
                inv[t[i]] = i;
        }
        for (int j = 0; j < m; ++j)
            if (inv[j] < 0)
                e.vertex_cost += del[j];
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (i != k)
                    e.arc_cost += pair_cost(i, k, t[i], t[k]);

        auto matched = [&](int p) { return inv[p] >= 0; };
        for (auto [p, q] : va)
            e.second_order[kAv] += matched(p) && matched(q);
        for (auto [p, q] : vo)
            e.second_order[kOv] += matched(p) && !matched(q);
        for (auto [p, q] : ve)
            e.second_order[kEv] += !matched(p) && !matched(q);
        if (!aa.empty() || !ao.empty() || !ae.empty()) {
            std::vector<std::uint8_t> present(f_.arc_count(), 0);
            for (int s = 0; s < f_.arc_count(); ++s) {
                auto [a, b] = arc_endpoints(s, m);
                present[s] = inv[a] >= 0 && inv[b] >= 0 && ag_arc(inv[a], inv[b]);
            }
            for (auto [s, u] : aa)
                e.second_order[kAe] += present[s] && present[u];
            for (auto [s, u] : ao)
                e.second_order[kOe] += present[s] && !present[u];
            for (auto [s, u] : ae)
                e.second_order[kEe] += !present[s] && !present[u];
        }
        e.flags.r3 = e.second_order[kAv] + e.second_order[kOv] + e.second_order[kEv] == 0;
        e.flags.r4 = e.second_order[kAe] + e.second_order[kOe] + e.second_order[kEe] == 0;
        if (planar)
            for (int v = 0; v < n && e.flags.r5; ++v)
                e.flags.r5 = vertex_cyclic(t, v);
        e.cost = w_.k1 * e.vertex_cost + w_.k2 * e.arc_cost;
        if (relaxed) {
            e.cost += w_.k3 * e.second_order[kAv] + w_.k4 * e.second_order[kAe] + w_.k5 * e.second_order[kOv] +
                      w_.k6 * e.second_order[kOe] + w_.k7 * e.second_order[kEv] + w_.k8 * e.second_order[kEe];
            e.valid = e.flags.r5;
        } else {
            e.valid = e.flags.all();
        }
        return e;
    }

    const AttributedGraph& g_;
    const Fdg& f_;
    const CostWeights& w_;
    int n, m;
    bool relaxed;
    bool planar = false;
    bool need[6] = {};
    std::vector<double> vcost, del, ecost, eabs;
    std::vector<int> agarc, slot, fpos;
    std::vector<std::uint8_t> live;
    BoolMatrix gav;
    std::vector<std::pair<int, int>> va, vo, ve, aa, ao, ae;
    std::vector<std::vector<int>> gout, gin;
};

std::vector<int> to_targets(const Labelling& f, int n, int m)
{
    if (static_cast<int>(f.size()) != n)
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every AG vertex");
    check_injective(f, m);
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i)
        t[i] = f[i] == kNullTarget ? m : f[i];
    return t;
}

Labelling from_targets(const std::vector<int>& t, int m)
{
    Labelling f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        f[i] = t[i] == m ? kNullTarget : t[i];
    return f;
}

// Lexicographic order with the null target after every real vertex.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b) { return a < b; }

bool allowed(const AllowedMask* mask, int i, int t, int m)
{
    return !mask || (*mask)(i, t == m ? kNullTarget : t);
}

void check_mask(const AllowedMask* mask, int n, int m)
{
    if (mask && (mask->rows() != n || mask->fdg_order() != m))
        throw Error(ErrorKind::invalid_input, "allowed-mask shape does not match the graphs");
}

class Searcher {
public:
    Searcher(const Context& c, const SearchOptions& opt) : c_(c), opt_(opt), n_(c.n), m_(c.m)
    {
        t_.assign(n_, -1);
        inv_.assign(m_, -1);
        part_.assign(n_ + 1, std::vector<double>(static_cast<std::size_t>(n_) * (m_ + 1), 0.0));
        k3_ = c.relaxed ? c.w_.k3 : 0.0;
        k4_ = c.relaxed ? c.w_.k4 : 0.0;
    }

    MatchResult run()
    {
        double h0 = 0.0;
        if (opt_.use_bound)
            for (int i = 0; i < n_; ++i)
                h0 += row_min(i, 0, -1, -1);
        if (std::isfinite(h0))
            rec(0, 0.0, h0);
        MatchResult r;
        r.explored_nodes = nodes_;
        r.visited_leaves = leaves_;
        r.bound_violations = violations_;
        if (found_) {
            r.valid = true;
            r.distance = best_;
            r.labelling = from_targets(best_t_, m_);
        }
        return r;
    }

private:
    struct Candidate {
        int t;
        double branch;
        double l;
    };

    double delta(int i, int ti, int p, int tp) const
    {
        double d = c_.w_.k2 * (c_.pair_cost(i, p, ti, tp) + c_.pair_cost(p, i, tp, ti));
        if (k3_ > 0.0 && ti < m_ && tp < m_ && c_.gav(ti, tp))
            d += k3_;
        return d;
    }

    // Cheapest completion of AG vertex i given the current partial matrix at
    // `depth`, optionally after tentatively matching p -> tp.
    double row_min(int i, int depth, int p, int tp) const
    {
        const auto& part = part_[depth];
        double best = kInvalidDistance;
        for (int t = 0; t <= m_; ++t) {
            if (t < m_ && (inv_[t] >= 0 || t == tp))
                continue;
            if (!allowed(opt_.mask, i, t, m_))
                continue;
            double v = c_.w_.k1 * c_.vc(i, t) + part[i * (m_ + 1) + t];
            if (p >= 0)
                v += delta(i, t, p, tp);
            best = std::min(best, v);
        }
        return best;
    }

    void new_present(int p, int tp, std::vector<int>& out) const
    {
        out.clear();
        if (tp == m_)
            return;
        for (int s = 0; s < p; ++s) {
            if (t_[s] == m_)
                continue;
            if (c_.ag_arc(p, s))
                out.push_back(c_.fslot(tp, t_[s]));
            if (c_.ag_arc(s, p))
                out.push_back(c_.fslot(t_[s], tp));
        }
    }

    int arc_antagonisms(const std::vector<int>& fresh) const
    {
        int count = 0;
        for (std::size_t a = 0; a < fresh.size(); ++a) {
            for (int s : present_)
                count += c_.guarded_ae(fresh[a], s);
            for (std::size_t b = a + 1; b < fresh.size(); ++b)
                count += c_.guarded_ae(fresh[a], fresh[b]);
        }
        return count;
    }

    bool planar_ok(int p)
    {
        if (!c_.planar || t_[p] == m_)
            return true;
        if (!c_.vertex_cyclic(t_, p))
            return false;
        for (int s : c_.gin[p])
            if (t_[s] >= 0 && s != p && !c_.vertex_cyclic(t_, s))
                return false;
        return true;
    }

    double prune_limit() const { return best_ + 1e-9 * std::max(1.0, std::abs(best_)); }

    double rec(int p, double g, double l)
    {
        ++nodes_;
        if (p == n_) {
            ++leaves_;
            const LabellingEvaluation e = c_.eval(t_);
            if (!e.valid)
                return kInvalidDistance;
            if (!found_ || e.cost < best_ || (e.cost == best_ && lex_less(t_, best_t_))) {
                found_ = true;
                best_ = e.cost;
                best_t_ = t_;
            }
            return e.cost;
        }

        const bool restricted = !c_.relaxed;
        std::vector<Candidate> cands;
        std::vector<int> fresh;
        for (int t = 0; t <= m_; ++t) {
            if (t < m_ && inv_[t] >= 0)
                continue;
            if (!allowed(opt_.mask, p, t, m_))
                continue;
            new_present(p, t, fresh);
            int arc_ant = 0;
            if (t < m_ && ((restricted && opt_.antagonism_pruning) || k4_ > 0.0))
                arc_ant = arc_antagonisms(fresh);
            if (restricted && opt_.antagonism_pruning && t < m_) {
                bool clash = arc_ant > 0;
                for (int s = 0; s < p && !clash; ++s)
                    clash = t_[s] < m_ && c_.gav(t, t_[s]);
                if (clash)
                    continue;
            }
            if (c_.planar && t < m_) {
                t_[p] = t;
                const bool ok = planar_ok(p);
                t_[p] = -1;
                if (!ok)
                    continue;
            }
            double branch = c_.w_.k1 * c_.vc(p, t) + part_[p][p * (m_ + 1) + t] + k4_ * arc_ant;
            double h = 0.0;
            if (opt_.use_bound) {
                for (int i = p + 1; i < n_ && std::isfinite(h); ++i)
                    h += row_min(i, p, p, t);
                if (!std::isfinite(h))
                    continue;
            }
            cands.push_back({t, branch, g + branch + h});
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.l < b.l; });

        double subtree_min = kInvalidDistance;
        for (const Candidate& cand : cands) {
            if (opt_.cost_pruning && found_ && cand.l > prune_limit())
                break;
            const int t = cand.t;
            t_[p] = t;
            if (t < m_)
                inv_[t] = p;
            new_present(p, t, fresh);
            const std::size_t present_size = present_.size();
            present_.insert(present_.end(), fresh.begin(), fresh.end());
            auto& next = part_[p + 1];
            next = part_[p];
            for (int i = p + 1; i < n_; ++i)
                for (int ti = 0; ti <= m_; ++ti)
                    next[i * (m_ + 1) + ti] += delta(i, ti, p, t);

            const double sub = rec(p + 1, g + cand.branch, cand.l);
            if (opt_.audit_bound && std::isfinite(sub) && cand.l > sub + 1e-9 * std::max(1.0, std::abs(sub)))
                ++violations_;
            subtree_min = std::min(subtree_min, sub);

            present_.resize(present_size);
            if (t < m_)
                inv_[t] = -1;
            t_[p] = -1;
        }
        (void)l;
        return subtree_min;
    }

    const Context& c_;
    SearchOptions opt_;
    int n_, m_;
    double k3_ = 0.0, k4_ = 0.0;
    std::vector<int> t_, inv_, present_;
    std::vector<std::vector<double>> part_;
    bool found_ = false;
    double best_ = kInvalidDistance;
    std::vector<int> best_t_;
    std::uint64_t nodes_ = 0, leaves_ = 0, violations_ = 0;
};

} // namespace

ConstraintFlags check_constraints(const Labelling& f, const AttributedGraph& g, const Fdg& fdg, ConstraintSet which)
{
    CostWeights w;
    w.mode = ConstraintMode::restricted;
    w.planar = which.r5;
    const Context c(g, fdg, w, true);
    const LabellingEvaluation e = c.eval(to_targets(f, c.n, c.m));
    ConstraintFlags out;
    out.r3 = !which.r3 || e.flags.r3;
    out.r4 = !which.r4 || e.flags.r4;
    out.r5 = !which.r5 || e.flags.r5;
    return out;
}

LabellingEvaluation evaluate_labelling(const Labelling& f, const AttributedGraph& g, const Fdg& fdg,
                                       const CostWeights& w)
{
    const Context c(g, fdg, w, true);
    return c.eval(to_targets(f, c.n, c.m));
}

double labelling_cost(const Labelling& f, const AttributedGraph& g, const Fdg& fdg, const CostWeights& w)
{
    return evaluate_labelling(f, g, fdg, w).cost;
}

MatchResult bnb_distance(const AttributedGraph& g, const Fdg& fdg, const CostWeights& w, const SearchOptions& opt)
{
    const Context c(g, fdg, w, false);
    check_mask(opt.mask, c.n, c.m);
    SearchOptions o = opt;
    if (o.audit_bound)
        o.cost_pruning = false;
    return Searcher(c, o).run();
}

MatchResult exhaustive_oracle(const AttributedGraph& g, const Fdg& fdg, const CostWeights& w, const AllowedMask* mask)
{
    if (g.order() + fdg.n > 10)
        throw Error(ErrorKind::too_large, "exhaustive oracle is limited to order(G) + order(F) <= 10");
    const Context c(g, fdg, w, false);
    const int n = c.n, m = c.m;
    check_mask(mask, n, m);
    MatchResult r;
    std::vector<int> t(n, -1);
    std::vector<bool> used(m, false);
    std::vector<int> best_t;
    auto rec = [&](auto&& self, int i) -> void {
        if (i == n) {
            ++r.visited_leaves;
            const LabellingEvaluation e = c.eval(t);
            if (e.valid && (!r.valid || e.cost < r.distance)) {
                r.valid = true;
                r.distance = e.cost;
                best_t = t;
            }
            return;
        }
        for (int j = 0; j <= m; ++j) {
            if (j < m && used[j])
                continue;
            if (!allowed(mask, i, j, m))
                continue;
            t[i] = j;
            if (j < m)
                used[j] = true;
            self(self, i + 1);
            if (j < m)
                used[j] = false;
        }
        t[i] = -1;
    };
    rec(rec, 0);
    r.explored_nodes = r.visited_leaves;
    if (r.valid)
        r.labelling = from_targets(best_t, m);
    return r;
}

namespace {

using u128 = unsigned __int128;

u128 factorial(int k)
{
    u128 f = 1;
    for (int i = 2; i <= k; ++i)
        f *= static_cast<u128>(i);
    return f;
}

} // namespace

std::uint64_t count_labellings(int n, int m)
{
    if (n < 0 || m < 0)
        throw Error(ErrorKind::invalid_input, "counts need non-negative orders");
    if (n > 20 || m > 20)
        throw Error(ErrorKind::too_large, "closed form evaluated exactly only up to order 20");
    const u128 nm = factorial(n) * factorial(m);
    u128 q = 0;
    if (n >= m) {
        for (int k = 0; k <= m; ++k)
            q += nm / factorial(k + n - m) / factorial(m - k) / factorial(k);
    } else {
        for (int k = 0; k <= n; ++k)
            q += nm / factorial(k) / factorial(n - k) / factorial(m - n + k);
    }
    if (q > static_cast<u128>(std::numeric_limits<std::uint64_t>::max()))
        throw Error(ErrorKind::too_large, "labelling count overflows 64 bits");
    return static_cast<std::uint64_t>(q);
}

std::uint64_t count_search_nodes(int n, int m)
{
    std::uint64_t a = 0;
    for (int i = 0; i <= n; ++i)
        a += count_labellings(i, m);
    return a;
}

} // namespace fdg
