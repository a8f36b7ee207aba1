#pragma once

// Hand-rolled generators and reference implementations shared by the tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "fdg/core.hpp"
#include "fdg/efficient.hpp"
#include "fdg/matching.hpp"
#include "fdg/synthesis.hpp"

namespace testing_support {

using namespace fdg;

inline AttributedGraph random_ag(std::mt19937& rng, int n, double arc_p, int vrange, int arange, bool with_order)
{
    std::uniform_int_distribution<int> va(0, vrange - 1), aa(0, arange - 1);
    std::bernoulli_distribution has(arc_p);
    AttributedGraph g;
    for (int i = 0; i < n; ++i)
        g.vertices.push_back(AttrTuple::of(va(rng)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && has(rng))
                g.add_arc(i, j, AttrTuple::of(aa(rng)));
    if (with_order) {
        ArcOrder order(n);
        for (int i = 0; i < n; ++i) {
            order[i] = g.out_targets(i);
            std::shuffle(order[i].begin(), order[i].end(), rng);
        }
        g.arc_order = order;
    }
    return g;
}

// Copy of `base` at the same positions with some vertices nulled and some
// attributes redrawn; arc order entries of removed arcs are dropped.
inline AttributedGraph random_sample(std::mt19937& rng, const AttributedGraph& base, double drop_p, double change_p,
                                     int vrange, int arange)
{
    std::bernoulli_distribution drop(drop_p), change(change_p);
    std::uniform_int_distribution<int> va(0, vrange - 1), aa(0, arange - 1);
    AttributedGraph s;
    s.extended = true;
    const int n = base.order();
    for (int i = 0; i < n; ++i) {
        if (drop(rng))
            s.vertices.push_back(AttrTuple::null());
        else
            s.vertices.push_back(change(rng) ? AttrTuple::of(va(rng)) : base.vertices[i]);
    }
    for (const auto& [ij, b] : base.arcs) {
        if (s.vertices[ij.first].is_null || s.vertices[ij.second].is_null)
            continue;
        if (drop(rng))
            continue;
        s.add_arc(ij.first, ij.second, change(rng) ? AttrTuple::of(aa(rng)) : b);
    }
    if (base.arc_order) {
        ArcOrder order(n);
        for (int i = 0; i < n; ++i)
            for (int j : (*base.arc_order)[i])
                if (s.has_arc(i, j))
                    order[i].push_back(j);
        s.arc_order = order;
    }
    return s;
}

inline Labelling identity_labels(const AttributedGraph& g)
{
    Labelling l(g.order());
    for (int i = 0; i < g.order(); ++i)
        l[i] = g.vertices[i].is_null ? kNullTarget : i;
    return l;
}

struct SampledFdg {
    Fdg fdg;
    std::vector<AttributedGraph> sample;
};

inline SampledFdg random_fdg(std::mt19937& rng, int m, int z, bool with_order, int vrange = 4, int arange = 3,
                             double arc_p = 0.5)
{
    const AttributedGraph base = random_ag(rng, m, arc_p, vrange, arange, with_order);
    SampledFdg out;
    CommonLabelling labels;
    for (int k = 0; k < z; ++k) {
        out.sample.push_back(random_sample(rng, base, 0.25, 0.3, vrange, arange));
        labels.push_back(identity_labels(out.sample.back()));
    }
    out.fdg = synth_from_labelled_ags(out.sample, labels, m);
    return out;
}

// Reference labelling cost through the explicitly extended pair of graphs:
// G' and F' of order n + m, the labelling completed to a bijection.
inline LabellingEvaluation reference_evaluation(const Labelling& f, const AttributedGraph& g, const Fdg& fdg,
                                                const CostWeights& w)
{
    const int n = g.order(), m = fdg.n, big = n + m;
    const AttributedGraph ge = extend_ag(g, big);
    const Fdg fe = extend_fdg(fdg, big);
    std::vector<int> pi(big, -1);
    std::vector<bool> used(big, false);
    int next_null = m;
    for (int i = 0; i < n; ++i) {
        pi[i] = f[i] == kNullTarget ? next_null++ : f[i];
        used[pi[i]] = true;
    }
    int k = n;
    for (int j = 0; j < big; ++j)
        if (!used[j])
            pi[k++] = j;

    LabellingEvaluation e;
    for (int i = 0; i < big; ++i)
        e.vertex_cost += vertex_cost(ge.vertices[i], fe.vertex_pdfs[pi[i]], fe.vertex_binning, w.kpr);
    auto arc_value = [&](int i, int j) {
        const AttrTuple* b = ge.arc(i, j);
        return b ? *b : AttrTuple::null();
    };
    for (int i = 0; i < big; ++i)
        for (int j = 0; j < big; ++j) {
            if (i == j)
                continue;
            const bool endpoint_null = ge.vertices[i].is_null || ge.vertices[j].is_null;
            e.arc_cost += arc_cost(arc_value(i, j), fe.arc_pdfs[arc_index(pi[i], pi[j], big)], fe.arc_binning,
                                   endpoint_null, w.kpr);
        }
    for (int i = 0; i < big; ++i)
        for (int j = 0; j < big; ++j) {
            if (i == j)
                continue;
            const bool ni = ge.vertices[i].is_null, nj = ge.vertices[j].is_null;
            if (i < j) {
                e.second_order[0] += second_order_vertex_cost(Relation::antagonism, ni, nj, pi[i], pi[j], fe);
                e.second_order[4] += second_order_vertex_cost(Relation::existence, ni, nj, pi[i], pi[j], fe);
            }
            e.second_order[2] += second_order_vertex_cost(Relation::occurrence, ni, nj, pi[i], pi[j], fe);
        }
    const int arcs = big * (big - 1);
    for (int x = 0; x < arcs; ++x)
        for (int y = 0; y < arcs; ++y) {
            if (x == y)
                continue;
            auto [a, b] = arc_endpoints(x, big);
            auto [c, d] = arc_endpoints(y, big);
            const bool nx = !ge.has_arc(a, b), ny = !ge.has_arc(c, d);
            const int sx = arc_index(pi[a], pi[b], big), sy = arc_index(pi[c], pi[d], big);
            if (x < y) {
                e.second_order[1] += second_order_arc_cost(Relation::antagonism, nx, ny, sx, sy, fe);
                e.second_order[5] += second_order_arc_cost(Relation::existence, nx, ny, sx, sy, fe);
            }
            e.second_order[3] += second_order_arc_cost(Relation::occurrence, nx, ny, sx, sy, fe);
        }
    e.cost = w.k1 * e.vertex_cost + w.k2 * e.arc_cost;
    if (w.mode == ConstraintMode::relaxed)
        e.cost += w.k3 * e.second_order[0] + w.k4 * e.second_order[1] + w.k5 * e.second_order[2] +
                  w.k6 * e.second_order[3] + w.k7 * e.second_order[4] + w.k8 * e.second_order[5];
    return e;
}

// Every injective partial map of n sources into m targets, null last.
inline std::vector<Labelling> all_labellings(int n, int m)
{
    std::vector<Labelling> out;
    Labelling f(n, kNullTarget);
    std::vector<bool> used(m, false);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == n) {
            out.push_back(f);
            return;
        }
        for (int j = 0; j <= m; ++j) {
            if (j < m && used[j])
                continue;
            f[i] = j < m ? j : kNullTarget;
            if (j < m)
                used[j] = true;
            self(self, i + 1);
            if (j < m)
                used[j] = false;
        }
    };
    rec(rec, 0);
    return out;
}

inline CostWeights random_weights(std::mt19937& rng, ConstraintMode mode, bool planar)
{
    static const double choices[] = {0.0, 0.5, 1.0, 2.0};
    std::uniform_int_distribution<int> pick(0, 3);
    CostWeights w;
    w.k1 = 1.0 + pick(rng) * 0.25;
    w.k2 = choices[pick(rng)];
    for (int k = 3; k <= 8; ++k)
        w.k(k) = choices[pick(rng)];
    w.mode = mode;
    w.planar = planar;
    return w;
}

// Minimum over rotations and over every edit path, summed along the path.
inline double brute_force_cyclic(const CyclicCosts& c)
{
    const int rows = c.rows(), cols = c.cols();
    double best = kInvalidDistance;
    for (int s = 0; s < std::max(rows, 1); ++s) {
        auto row = [&](int l) { return (l + s) % rows; };
        auto walk = [&](auto&& self, int l, int k, double acc) -> void {
            if (l == rows && k == cols) {
                best = std::min(best, acc);
                return;
            }
            if (l < rows && k < cols)
                self(self, l + 1, k + 1, acc + c.subst[row(l) * cols + k]);
            if (l < rows)
                self(self, l + 1, k, acc + c.insert[row(l)]);
            if (k < cols)
                self(self, l, k + 1, acc + c.remove[k]);
        };
        walk(walk, 0, 0, c.central);
    }
    return best;
}

} // namespace testing_support

namespace testing_support::example {

using namespace fdg;

// Categorical codes for the worked FORG example.
enum VertexCode { a = 0, b = 1, c = 2, d = 3, e = 4 };
enum ArcCode { X = 0, Y = 1, Z = 2, L = 3, K = 4 };

// Five-position graph with the shared triangle b, a, c and optional d (v4)
// and e (v5). Indices are 0-based: v1 -> 0.
inline AttributedGraph example_graph(bool with_d, bool with_e)
{
    AttributedGraph g;
    g.extended = true;
    g.vertices = {AttrTuple::of(b), AttrTuple::of(a), AttrTuple::of(c), with_d ? AttrTuple::of(d) : AttrTuple::null(),
                  with_e ? AttrTuple::of(e) : AttrTuple::null()};
    g.add_arc(1, 0, AttrTuple::of(X));
    g.add_arc(1, 2, AttrTuple::of(Y));
    g.add_arc(0, 2, AttrTuple::of(Z));
    if (with_e)
        g.add_arc(0, 4, AttrTuple::of(L));
    if (with_d)
        g.add_arc(1, 3, AttrTuple::of(K));
    return g;
}

} // namespace testing_support::example
