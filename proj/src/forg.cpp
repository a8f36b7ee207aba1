#include "fdg/forg.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "fdg/matching.hpp"

namespace fdg {

Forg forg_from_ag(const AttributedGraph& g, const SynthOptions& opt)
{
    Labelling identity(g.order());
    for (int i = 0; i < g.order(); ++i)
        identity[i] = i;
    Forg r;
    static_cast<FirstOrderGraph&>(r) = first_order_from_placed(place_sample({g}, {identity}, g.order()), opt);
    return r;
}

Forg forg_from_fdg(const Fdg& f)
{
    Forg r;
    static_cast<FirstOrderGraph&>(r) = f;
    return r;
}

double forg_entropy(const FirstOrderGraph& r)
{
    double h = 0.0;
    for (const auto& p : r.vertex_pdfs)
        h += p.entropy_bits();
    for (const auto& q : r.arc_pdfs)
        h += q.entropy_bits();
    return h;
}

Forg forg_synthesize(const FirstOrderGraph& r1, const FirstOrderGraph& r2, const Labelling& mu)
{
    if (static_cast<int>(mu.size()) != r1.n)
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every vertex");
    check_injective(mu, r2.n);
    Labelling lab(r1.n);
    int next = r2.n;
    for (int i = 0; i < r1.n; ++i)
        lab[i] = mu[i] != kNullTarget ? mu[i] : next++;
    const int n = next;
    const FirstOrderGraph placed = permute_first_order(extend_first_order(r1, n), complete_labels(lab, r1.n, n));
    Forg out;
    static_cast<FirstOrderGraph&>(out) = extend_first_order(r2, n);
    out.z += placed.z;
    for (int i = 0; i < n; ++i)
        out.vertex_pdfs[i].merge(placed.vertex_pdfs[i]);
    for (int s = 0; s < out.arc_count(); ++s)
        out.arc_pdfs[s].merge(placed.arc_pdfs[s]);
    return out;
}

double forg_entropy_increment(const FirstOrderGraph& r1, const FirstOrderGraph& r2, const Labelling& mu)
{
    const double total = r1.z + r2.z;
    const double w1 = total > 0 ? r1.z / total : 0.5;
    const double w2 = total > 0 ? r2.z / total : 0.5;
    return forg_entropy(forg_synthesize(r1, r2, mu)) - (w1 * forg_entropy(r1) + w2 * forg_entropy(r2));
}

ForgDistance forg_distance(const FirstOrderGraph& r1, const FirstOrderGraph& r2)
{
    if (count_labellings(r1.n, r2.n) > 2000000)
        throw Error(ErrorKind::too_large, "FORG labelling space too large for exhaustive search");
    ForgDistance best;
    best.distance = std::numeric_limits<double>::infinity();
    Labelling mu(r1.n, kNullTarget);
    std::vector<bool> used(r2.n, false);
    // Candidates in ascending index with the null target last, so the first
    // minimum found is the lexicographically smallest.
    std::function<void(int)> rec = [&](int i) {
        if (i == r1.n) {
            const double d = forg_entropy_increment(r1, r2, mu);
            if (d < best.distance - 1e-12) {
                best.distance = d;
                best.labelling = mu;
            }
            return;
        }
        for (int j = 0; j <= r2.n; ++j) {
            const int t = j == r2.n ? kNullTarget : j;
            if (t != kNullTarget && used[t])
                continue;
            mu[i] = t;
            if (t != kNullTarget)
                used[t] = true;
            rec(i + 1);
            if (t != kNullTarget)
                used[t] = false;
        }
        mu[i] = kNullTarget;
    };
    rec(0);
    if (best.distance < 0.0 && best.distance > -1e-12)
        best.distance = 0.0;
    return best;
}

double outcome_probability(const FirstOrderGraph& r, const AttributedGraph& g, const Labelling& mu)
{
    const int n = r.n;
    if (g.order() != n || static_cast<int>(mu.size()) != n)
        throw Error(ErrorKind::invalid_labelling, "outcome graph must be extended to the FORG order");
    check_injective(mu, n);
    for (int t : mu)
        if (t == kNullTarget)
            throw Error(ErrorKind::invalid_labelling, "outcome labelling must be a permutation");
    double p = 1.0;
    for (int i = 0; i < n; ++i)
        p *= r.vertex_prob(mu[i], g.vertices[i]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const AttrTuple* b = g.arc(i, j);
            const int slot = arc_index(mu[i], mu[j], n);
            if (g.vertices[i].is_null || g.vertices[j].is_null) {
                if (b)
                    return 0.0;
                continue;
            }
            p *= b ? r.arc_prob(slot, *b) : r.arc_pdfs[slot].prob_null();
        }
    return p;
}

} // namespace fdg
