#include "fdg/clustering.hpp"

#include <limits>
#include <numeric>

#include "fdg/parallel.hpp"
#include "fdg/synthesis.hpp"

namespace fdg {

namespace {

bool is_bijection(const Labelling& mu, int target_order)
{
    if (static_cast<int>(mu.size()) != target_order)
        return false;
    for (int t : mu)
        if (t == kNullTarget)
            return false;
    return true;
}

// mu' over order n + (m - matched): unlabelled sources take m, m+1, ...; the
// new source nulls take the unlabelled targets.
Labelling extend_map(const Labelling& mu, int m, int& order)
{
    const int n = static_cast<int>(mu.size());
    std::vector<bool> used(m, false);
    int matched = 0;
    for (int t : mu)
        if (t != kNullTarget) {
            used[t] = true;
            ++matched;
        }
    order = n + (m - matched);
    Labelling out(order);
    int next_null = m;
    for (int i = 0; i < n; ++i)
        out[i] = mu[i] != kNullTarget ? mu[i] : next_null++;
    int k = n;
    for (int j = 0; j < m; ++j)
        if (!used[j])
            out[k++] = j;
    return out;
}

Labelling identity(int n)
{
    Labelling l(n);
    std::iota(l.begin(), l.end(), 0);
    return l;
}

} // namespace

ExtendedPair extend_labelling(const AttributedGraph& g, const Fdg& f, const Labelling& mu)
{
    if (static_cast<int>(mu.size()) != g.order())
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every graph vertex");
    check_injective(mu, f.n);
    if (is_bijection(mu, f.n))
        return {g, f, mu};
    int order = 0;
    Labelling ext = extend_map(mu, f.n, order);
    return {extend_ag(g, order), extend_fdg(f, order), std::move(ext)};
}

ExtendedFdgPair extend_labelling(const Fdg& source, const Fdg& target, const Labelling& mu)
{
    if (static_cast<int>(mu.size()) != source.n)
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every FDG vertex");
    check_injective(mu, target.n);
    if (is_bijection(mu, target.n))
        return {source, target, mu};
    int order = 0;
    Labelling ext = extend_map(mu, target.n, order);
    return {extend_fdg(source, order), extend_fdg(target, order), std::move(ext)};
}

Fdg merge_into(const Fdg& source, const Fdg& target, const Labelling& mu, Labelling* placed)
{
    const ExtendedFdgPair ext = extend_labelling(source, target, mu);
    if (placed)
        placed->assign(ext.mu.begin(), ext.mu.begin() + source.n);
    return synth_from_labelled_fdgs({ext.target, ext.source}, {identity(ext.target.n), ext.mu}, ext.target.n);
}

Clustering incremental_clustering(const std::vector<AttributedGraph>& seq, const IncrementalConfig& cfg)
{
    if (seq.empty())
        throw Error(ErrorKind::invalid_input, "clustering needs at least one graph");
    CostWeights w = cfg.weights;
    for (int k = 3; k <= 8; ++k)
        w.k(k) = 0.0;
    w.mode = ConstraintMode::relaxed;

    Clustering out;
    out.fdgs.push_back(ag_to_fdg(seq[0]));
    out.members.push_back({0});
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const AttributedGraph& g = seq[i];
        int best = -1;
        MatchResult best_match;
        for (std::size_t j = 0; j < out.fdgs.size(); ++j) {
            MatchResult r = bnb_distance(g, out.fdgs[j], w);
            if (r.valid && (best < 0 || r.distance < best_match.distance)) {
                best = static_cast<int>(j);
                best_match = std::move(r);
            }
        }
        if (best >= 0 && best_match.distance <= cfg.d_alpha) {
            const ExtendedPair ext = extend_labelling(g, out.fdgs[best], best_match.labelling);
            out.fdgs[best] = update_fdg_with_ag(ext.g, ext.f, ext.mu);
            out.members[best].push_back(static_cast<int>(i));
            out.merge_distances.push_back(best_match.distance);
        } else {
            out.fdgs.push_back(ag_to_fdg(g));
            out.members.push_back({static_cast<int>(i)});
        }
    }
    return out;
}

AgMatcher edit_distance_matcher(EditCosts costs)
{
    return [costs = std::move(costs)](const AttributedGraph& a, const AttributedGraph& b) {
        EditResult r = edit_distance(a, b, costs);
        return AgMatch{r.cost, std::move(r.labelling)};
    };
}

Clustering hierarchical_clustering(const std::vector<AttributedGraph>& set, const HierarchicalConfig& cfg)
{
    if (set.empty())
        throw Error(ErrorKind::invalid_input, "clustering needs at least one graph");
    const AgMatcher matcher = cfg.matcher ? cfg.matcher : edit_distance_matcher(edit_costs_preset("exact"));
    const int m = static_cast<int>(set.size());
    constexpr double inf = std::numeric_limits<double>::infinity();

    // All pairwise distances and labellings, i < j.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            pairs.emplace_back(i, j);
    std::vector<AgMatch> matches(pairs.size());
    parallel_for(pairs.size(), cfg.threads,
                 [&](std::size_t k) { matches[k] = matcher(set[pairs[k].first], set[pairs[k].second]); });

    std::vector<std::vector<double>> d(m, std::vector<double>(m, inf));
    std::vector<std::vector<Labelling>> phi(m, std::vector<Labelling>(m));
    Clustering state;
    for (int i = 0; i < m; ++i) {
        state.fdgs.push_back(ag_to_fdg(set[i]));
        state.members.push_back({i});
    }
    // Single-graph FDGs keep the graph's numbering, so the AG labellings carry over.
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto [i, j] = pairs[k];
        const Labelling& f = matches[k].labelling;
        d[i][j] = d[j][i] = matches[k].distance;
        phi[i][j] = f;
        phi[j][i].assign(set[j].order(), kNullTarget);
        for (int v = 0; v < static_cast<int>(f.size()); ++v)
            if (f[v] != kNullTarget)
                phi[j][i][f[v]] = v;
    }

    std::vector<bool> alive(m, true);
    for (;;) {
        int x = -1, y = -1;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (alive[i] && alive[j] && (x < 0 || d[i][j] < d[x][y])) {
                    x = i;
                    y = j;
                }
        if (x < 0 || !(d[x][y] <= cfg.d_alpha))
            break;
        const double dxy = d[x][y];

        Labelling placed;
        Fdg merged = merge_into(state.fdgs[x], state.fdgs[y], phi[x][y], &placed);
        // New F_y vertex -> F_x vertex.
        Labelling back(merged.n, kNullTarget);
        for (int v = 0; v < static_cast<int>(placed.size()); ++v)
            back[placed[v]] = v;

        for (int i = 0; i < m; ++i) {
            if (!alive[i] || i == x || i == y)
                continue;
            const bool take = cfg.linkage == Linkage::complete ? d[i][x] > d[i][y] : d[i][x] < d[i][y];
            if (take) {
                d[i][y] = d[y][i] = d[i][x];
                Labelling to_y(phi[i][x].size(), kNullTarget);
                for (std::size_t v = 0; v < to_y.size(); ++v)
                    if (phi[i][x][v] != kNullTarget)
                        to_y[v] = placed[phi[i][x][v]];
                phi[i][y] = std::move(to_y);
                Labelling from_y(merged.n, kNullTarget);
                for (int v = 0; v < merged.n; ++v)
                    if (back[v] != kNullTarget)
                        from_y[v] = phi[x][i][back[v]];
                phi[y][i] = std::move(from_y);
            } else {
                phi[y][i].resize(merged.n, kNullTarget);
            }
        }
        // Removed rows are always retired, whichever branch ran above.
        for (int i = 0; i < m; ++i)
            d[i][x] = d[x][i] = inf;
        alive[x] = false;
        state.fdgs[y] = std::move(merged);
        state.members[y].insert(state.members[y].end(), state.members[x].begin(), state.members[x].end());
        state.merge_distances.push_back(dxy);
    }

    Clustering out;
    out.merge_distances = state.merge_distances;
    for (int i = 0; i < m; ++i)
        if (alive[i]) {
            out.fdgs.push_back(std::move(state.fdgs[i]));
            out.members.push_back(std::move(state.members[i]));
        }
    return out;
}

} // namespace fdg
