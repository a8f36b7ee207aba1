#include "fdg/efficient.hpp"

#include <algorithm>
#include <cmath>

namespace fdg {

std::vector<ExpandedVertex> split_into_expanded_vertices(const AttributedGraph& g)
{
    std::vector<ExpandedVertex> out(g.order());
    for (int i = 0; i < g.order(); ++i)
        out[i] = {i, g.out_targets(i)};
    return out;
}

std::vector<ExpandedVertex> split_into_expanded_vertices(const Fdg& f)
{
    std::vector<ExpandedVertex> out(f.n);
    for (int i = 0; i < f.n; ++i) {
        out[i].center = i;
        std::vector<bool> seen(f.n, false);
        auto take = [&](int j) {
            if (j != i && !seen[j] && !f.arc_always_null(arc_index(i, j, f.n))) {
                seen[j] = true;
                out[i].externals.push_back(j);
            }
        };
        if (f.arc_order)
            for (int j : (*f.arc_order)[i])
                take(j);
        for (int j = 0; j < f.n; ++j)
            take(j);
    }
    return out;
}

double expanded_max_distance(int n, int m)
{
    if (n < 1 || m < 1)
        throw Error(ErrorKind::invalid_input, "expanded vertices have at least one vertex");
    return n >= m ? 2.0 * n - 1 : static_cast<double>(n + m - 1);
}

double cyclic_string_distance(const CyclicCosts& c)
{
    const int rows = c.rows(), cols = c.cols();
    if (static_cast<int>(c.subst.size()) != rows * cols)
        throw Error(ErrorKind::invalid_input, "substitution table has the wrong size");
    std::vector<double> d(static_cast<std::size_t>(rows + 1) * (cols + 1));
    auto at = [&](int l, int k) -> double& { return d[static_cast<std::size_t>(l) * (cols + 1) + k]; };
    double best = kInvalidDistance;
    // With no AG externals there is one (empty) orientation.
    const int orientations = std::max(rows, 1);
    for (int s = 0; s < orientations; ++s) {
        at(0, 0) = c.central;
        for (int l = 1; l <= rows; ++l)
            at(l, 0) = at(l - 1, 0) + c.insert[(l - 1 + s) % rows];
        for (int k = 1; k <= cols; ++k)
            at(0, k) = at(0, k - 1) + c.remove[k - 1];
        for (int l = 1; l <= rows; ++l) {
            const int x = (l - 1 + s) % rows;
            for (int k = 1; k <= cols; ++k) {
                const double m1 = at(l - 1, k - 1) + c.subst[x * cols + k - 1];
                const double m2 = at(l - 1, k) + c.insert[x];
                const double m3 = at(l, k - 1) + c.remove[k - 1];
                at(l, k) = std::min({m1, m2, m3});
            }
        }
        best = std::min(best, at(rows, cols));
    }
    return best;
}

CyclicCosts expanded_vertex_costs(const AttributedGraph& g, const ExpandedVertex& ev, const Fdg& f,
                                  const ExpandedVertex& ew, const CostWeights& w)
{
    const int i = ev.center, j = ew.center;
    if (g.vertices[i].is_null || f.vertex_pdfs[j].always_null())
        throw Error(ErrorKind::invalid_input, "expanded vertex distance needs non-null central vertices");
    const Pdf null_pdf;
    CyclicCosts c;
    c.central = w.k1 * vertex_cost(g.vertices[i], f.vertex_pdfs[j], f.vertex_binning, w.kpr);
    for (int x : ev.externals) {
        const AttrTuple& b = *g.arc(i, x);
        c.insert.push_back(w.k1 * vertex_cost(g.vertices[x], null_pdf, f.vertex_binning, w.kpr) +
                           w.k2 * arc_cost(b, null_pdf, f.arc_binning, false, w.kpr));
    }
    for (int y : ew.externals) {
        const Pdf& q = f.arc_pdfs[arc_index(j, y, f.n)];
        c.remove.push_back(w.k1 * vertex_cost(AttrTuple::null(), f.vertex_pdfs[y], f.vertex_binning, w.kpr) +
                           w.k2 * arc_cost(AttrTuple::null(), q, f.arc_binning, true, w.kpr));
    }
    for (int x : ev.externals) {
        const AttrTuple& b = *g.arc(i, x);
        for (int y : ew.externals)
            c.subst.push_back(w.k1 * vertex_cost(g.vertices[x], f.vertex_pdfs[y], f.vertex_binning, w.kpr) +
                              w.k2 * arc_cost(b, f.arc_pdfs[arc_index(j, y, f.n)], f.arc_binning, false, w.kpr));
    }
    return c;
}

double expanded_vertex_distance(const AttributedGraph& g, const ExpandedVertex& ev, const Fdg& f,
                                const ExpandedVertex& ew, const CostWeights& w)
{
    return cyclic_string_distance(expanded_vertex_costs(g, ev, f, ew, w));
}

std::vector<std::vector<bool>> forbid_matrix(const AttributedGraph& g, const Fdg& f, double tau,
                                             const CostWeights& w)
{
    if (!(tau >= 0.0 && tau <= 1.0))
        throw Error(ErrorKind::invalid_input, "tau must lie in [0, 1]");
    const int n = g.order(), m = f.n;
    std::vector<std::vector<bool>> forbid(n, std::vector<bool>(m, false));
    if (tau >= 1.0)
        return forbid;
    // The normalisation assumes unit element costs, so the local distance
    // drops K1 and K2.
    CostWeights unit;
    unit.kpr = w.kpr;
    const auto evs = split_into_expanded_vertices(g);
    const auto ews = split_into_expanded_vertices(f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            if (g.vertices[i].is_null || f.vertex_pdfs[j].always_null()) {
                forbid[i][j] = true;
                continue;
            }
            const double d = expanded_vertex_distance(g, evs[i], f, ews[j], unit);
            forbid[i][j] = d / expanded_max_distance(evs[i].size(), ews[j].size()) > tau;
        }
    return forbid;
}

AllowedMask mask_from_forbid(const std::vector<std::vector<bool>>& forbid, int m)
{
    const int n = static_cast<int>(forbid.size());
    AllowedMask mask(n, m, false);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j)
            mask.set(i, j, !forbid[i][j]);
        mask.set(i, kNullTarget, true);
    }
    return mask;
}

namespace {

void normalise_row(ProbMatrix& p, int i)
{
    double sum = 0.0;
    for (int a = 0; a <= p.m; ++a)
        sum += p(i, a);
    if (sum <= 0.0) {
        for (int a = 0; a <= p.m; ++a)
            p.at(i, a) = 1.0 / (p.m + 1);
        return;
    }
    for (int a = 0; a <= p.m; ++a)
        p.at(i, a) /= sum;
}

// Local cost of AG vertex i against column a; the null column costs 1.
double vertex_local(const AttributedGraph& g, const Fdg& f, int i, int a, const CostWeights& w)
{
    if (a == f.n)
        return 1.0;
    return vertex_cost(g.vertices[i], f.vertex_pdfs[a], f.vertex_binning, w.kpr);
}

} // namespace

ProbMatrix initial_probabilities(const AttributedGraph& g, const Fdg& f, RelaxInit init, const CostWeights& w)
{
    ProbMatrix p;
    p.n = g.order();
    p.m = f.n;
    p.p.assign(static_cast<std::size_t>(p.n) * (p.m + 1), 0.0);
    std::vector<ExpandedVertex> evs, ews;
    if (init == RelaxInit::expanded) {
        evs = split_into_expanded_vertices(g);
        ews = split_into_expanded_vertices(f);
    }
    for (int i = 0; i < p.n; ++i) {
        for (int a = 0; a <= p.m; ++a) {
            double cost;
            if (init == RelaxInit::vertex || a == p.m)
                cost = vertex_local(g, f, i, a, w);
            else if (g.vertices[i].is_null || f.vertex_pdfs[a].always_null())
                cost = kInvalidDistance;
            else
                cost = expanded_vertex_distance(g, evs[i], f, ews[a], w);
            p.at(i, a) = std::exp(-cost);
        }
        normalise_row(p, i);
    }
    return p;
}

ProbMatrix relaxation_step(const AttributedGraph& g, const Fdg& f, const ProbMatrix& p, const CostWeights& w)
{
    const int n = p.n, m = p.m;
    std::vector<std::vector<int>> fdg_out(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b && !f.arc_always_null(arc_index(a, b, m)))
                fdg_out[a].push_back(b);

    ProbMatrix next = p;
    next.iterations = p.iterations + 1;
    for (int i = 0; i < n; ++i) {
        const std::vector<int> neigh = g.out_targets(i);
        const double dij = neigh.empty() ? 0.0 : 1.0 / static_cast<double>(neigh.size());
        for (int a = 0; a <= m; ++a) {
            double q = 0.0;
            if (a < m)
                for (int j : neigh) {
                    const AttrTuple& e = *g.arc(i, j);
                    double inner = 0.0;
                    for (int b : fdg_out[a]) {
                        const double ce = arc_cost(e, f.arc_pdfs[arc_index(a, b, m)], f.arc_binning, false, w.kpr);
                        const double r = std::exp(-(vertex_local(g, f, i, a, w) + vertex_local(g, f, j, b, w) + ce));
                        inner += r * p(j, b);
                    }
                    q += dij * inner;
                }
            next.at(i, a) = p(i, a) * (1.0 + q);
        }
        normalise_row(next, i);
    }
    return next;
}

ProbMatrix relax_probabilities(const AttributedGraph& g, const Fdg& f, const RelaxOptions& opt,
                               const CostWeights& w)
{
    if (opt.max_iterations < 0)
        throw Error(ErrorKind::invalid_input, "iteration budget must be non-negative");
    ProbMatrix p = initial_probabilities(g, f, opt.init, w);
    for (int t = 0; t < opt.max_iterations; ++t) {
        ProbMatrix next = relaxation_step(g, f, p, w);
        double change = 0.0;
        for (std::size_t k = 0; k < p.p.size(); ++k)
            change = std::max(change, std::abs(next.p[k] - p.p[k]));
        p = std::move(next);
        if (change < opt.tolerance)
            break;
    }
    return p;
}

AllowedMask mask_from_probabilities(const ProbMatrix& p, double tp)
{
    AllowedMask mask(p.n, p.m, false);
    for (int i = 0; i < p.n; ++i) {
        int best = 0;
        for (int a = 0; a <= p.m; ++a) {
            if (p(i, a) > p(i, best))
                best = a;
            if (p(i, a) >= tp)
                mask.set(i, a == p.m ? kNullTarget : a, true);
        }
        mask.set(i, best == p.m ? kNullTarget : best, true);
        mask.set(i, kNullTarget, true);
    }
    return mask;
}

MatchResult suboptimal_distance(const AttributedGraph& g, const Fdg& f, const CostWeights& w,
                                const SuboptimalMethod& method)
{
    AllowedMask mask;
    switch (method.kind) {
    case SuboptimalMethod::noniter:
        mask = mask_from_forbid(forbid_matrix(g, f, method.tau, w), f.n);
        break;
    case SuboptimalMethod::relax_vertex:
    case SuboptimalMethod::relax_expanded: {
        if (!(method.tp >= 0.0 && method.tp <= 1.0))
            throw Error(ErrorKind::invalid_input, "T_p must lie in [0, 1]");
        RelaxOptions opt;
        opt.init = method.kind == SuboptimalMethod::relax_vertex ? RelaxInit::vertex : RelaxInit::expanded;
        opt.max_iterations = method.iterations;
        mask = mask_from_probabilities(relax_probabilities(g, f, opt, w), method.tp);
        break;
    }
    }
    SearchOptions opt;
    opt.mask = &mask;
    return bnb_distance(g, f, w, opt);
}

} // namespace fdg
