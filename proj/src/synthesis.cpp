#include "fdg/synthesis.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

namespace fdg {

void check_injective(const Labelling& labels, int target_order)
{
    std::vector<bool> seen(std::max(target_order, 0), false);
    for (int t : labels) {
        if (t == kNullTarget)
            continue;
        if (t < 0 || t >= target_order)
            throw Error(ErrorKind::invalid_labelling, "label " + std::to_string(t) + " outside [0, " + std::to_string(target_order) + ")");
        if (seen[t])
            throw Error(ErrorKind::invalid_labelling, "label " + std::to_string(t) + " used twice");
        seen[t] = true;
    }
}

std::vector<int> complete_labels(const Labelling& labels, int source_order, int n)
{
    if (static_cast<int>(labels.size()) > source_order || source_order > n)
        throw Error(ErrorKind::invalid_labelling, "labelling cannot be completed");
    check_injective(labels, n);
    std::vector<bool> used(n, false);
    for (int t : labels)
        if (t != kNullTarget)
            used[t] = true;
    std::vector<int> perm(n, kNullTarget);
    for (std::size_t i = 0; i < labels.size(); ++i)
        perm[i] = labels[i];
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (perm[i] != kNullTarget)
            continue;
        while (used[next])
            ++next;
        perm[i] = next;
        used[next] = true;
    }
    return perm;
}

static int default_order(const CommonLabelling& l)
{
    int n = 0;
    for (const auto& lab : l)
        for (int t : lab)
            n = std::max(n, t + 1);
    return n;
}

std::vector<AttributedGraph> place_sample(const std::vector<AttributedGraph>& d, const CommonLabelling& l, int n)
{
    if (d.size() != l.size())
        throw Error(ErrorKind::invalid_labelling, "one label map per graph is required");
    std::vector<AttributedGraph> out;
    out.reserve(d.size());
    for (std::size_t g = 0; g < d.size(); ++g) {
        const AttributedGraph& src = d[g];
        const Labelling& lab = l[g];
        if (static_cast<int>(lab.size()) != src.order())
            throw Error(ErrorKind::invalid_labelling, "label map size differs from graph order");
        check_injective(lab, n);
        AttributedGraph placed;
        placed.vertices.assign(n, AttrTuple::null());
        placed.extended = true;
        for (int i = 0; i < src.order(); ++i) {
            if (lab[i] == kNullTarget) {
                if (!src.vertices[i].is_null)
                    throw Error(ErrorKind::invalid_labelling, "non-null vertex without a label");
                continue;
            }
            placed.vertices[lab[i]] = src.vertices[i];
        }
        for (const auto& [ij, b] : src.arcs) {
            if (b.is_null)
                continue;
            placed.arcs[{lab[ij.first], lab[ij.second]}] = b;
        }
        if (src.arc_order) {
            ArcOrder order(n);
            for (int i = 0; i < src.order(); ++i)
                if (lab[i] != kNullTarget)
                    for (int j : (*src.arc_order)[i])
                        order[lab[i]].push_back(lab[j]);
            placed.arc_order = std::move(order);
        }
        out.push_back(std::move(placed));
    }
    return out;
}

FirstOrderGraph first_order_from_placed(const std::vector<AttributedGraph>& placed, const SynthOptions& opt)
{
    if (placed.empty())
        throw Error(ErrorKind::invalid_input, "synthesis needs at least one graph");
    const int n = placed.front().order();
    FirstOrderGraph f;
    f.n = n;
    f.z = static_cast<double>(placed.size());
    f.vertex_binning = opt.vertex_binning;
    f.arc_binning = opt.arc_binning;
    f.vertex_pdfs.assign(n, Pdf());
    f.arc_pdfs.assign(static_cast<std::size_t>(n) * (n - 1), Pdf());
    for (const auto& g : placed) {
        if (g.order() != n)
            throw Error(ErrorKind::invalid_input, "placed graphs differ in order");
        for (int i = 0; i < n; ++i) {
            const AttrTuple& a = g.vertices[i];
            if (a.is_null)
                f.vertex_pdfs[i].add_null();
            else
                f.vertex_pdfs[i].add(f.vertex_binning.bins(a));
        }
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                if (k == l || g.vertices[k].is_null || g.vertices[l].is_null)
                    continue;
                Pdf& q = f.arc_pdfs[arc_index(k, l, n)];
                if (const AttrTuple* b = g.arc(k, l))
                    q.add(f.arc_binning.bins(*b));
                else
                    q.add_null();
            }
    }
    return f;
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct Presence {
    int words = 0;
    std::uint64_t last_mask = ~0ULL;
    std::vector<Bits> rows;
};

Presence make_presence(int elements, int z)
{
    Presence p;
    p.words = (z + 63) / 64;
    const int rem = z % 64;
    p.last_mask = rem == 0 ? ~0ULL : ((1ULL << rem) - 1);
    p.rows.assign(elements, Bits(p.words, 0));
    return p;
}

void set_bit(Bits& b, int g) { b[g / 64] |= 1ULL << (g % 64); }

void relations_from_presence(const Presence& p, BoolMatrix& a, BoolMatrix& o, BoolMatrix& e)
{
    const int size = static_cast<int>(p.rows.size());
    a = BoolMatrix(size);
    o = BoolMatrix(size);
    e = BoolMatrix(size);
    for (int x = 0; x < size; ++x)
        for (int y = 0; y < size; ++y) {
            bool both = false, x_only = false, neither = false;
            for (int w = 0; w < p.words; ++w) {
                const std::uint64_t mask = w + 1 == p.words ? p.last_mask : ~0ULL;
                const std::uint64_t px = p.rows[x][w], py = p.rows[y][w];
                both |= (px & py) != 0;
                x_only |= (px & ~py & mask) != 0;
                neither |= (~px & ~py & mask) != 0;
            }
            a.set(x, y, !both);
            o.set(x, y, !x_only);
            e.set(x, y, !neither);
        }
}

// First listed order wins; later inputs append arcs not yet listed.
std::optional<ArcOrder> merge_orders(const std::vector<const std::optional<ArcOrder>*>& orders, int n)
{
    bool any = false;
    ArcOrder out(n);
    std::vector<std::set<int>> listed(n);
    for (const auto* o : orders) {
        if (!*o)
            continue;
        any = true;
        for (int d = 0; d < n; ++d)
            for (int t : (**o)[d])
                if (listed[d].insert(t).second)
                    out[d].push_back(t);
    }
    if (!any)
        return std::nullopt;
    return out;
}

} // namespace

Fdg synth_from_labelled_ags(const std::vector<AttributedGraph>& d, const CommonLabelling& l, int n,
                            const SynthOptions& opt)
{
    if (d.empty())
        throw Error(ErrorKind::invalid_input, "synthesis needs at least one graph");
    if (n < 0)
        n = default_order(l);
    const auto placed = place_sample(d, l, n);
    Fdg f;
    static_cast<FirstOrderGraph&>(f) = first_order_from_placed(placed, opt);
    const int z = static_cast<int>(placed.size());
    const int m = f.arc_count();
    Presence pv = make_presence(n, z), pa = make_presence(m, z);
    for (int g = 0; g < z; ++g) {
        for (int i = 0; i < n; ++i)
            if (!placed[g].vertices[i].is_null)
                set_bit(pv.rows[i], g);
        for (int s = 0; s < m; ++s) {
            auto [a, b] = arc_endpoints(s, n);
            if (placed[g].has_arc(a, b))
                set_bit(pa.rows[s], g);
        }
    }
    relations_from_presence(pv, f.rel.a_v, f.rel.o_v, f.rel.e_v);
    relations_from_presence(pa, f.rel.a_e, f.rel.o_e, f.rel.e_e);
    std::vector<const std::optional<ArcOrder>*> orders;
    for (const auto& g : placed)
        orders.push_back(&g.arc_order);
    f.arc_order = merge_orders(orders, n);
    return f;
}

FirstOrderGraph permute_first_order(const FirstOrderGraph& f, const std::vector<int>& perm)
{
    const int n = f.n;
    FirstOrderGraph out = f;
    for (int i = 0; i < n; ++i)
        out.vertex_pdfs[perm[i]] = f.vertex_pdfs[i];
    for (int s = 0; s < f.arc_count(); ++s) {
        auto [a, b] = arc_endpoints(s, n);
        out.arc_pdfs[arc_index(perm[a], perm[b], n)] = f.arc_pdfs[s];
    }
    return out;
}

Fdg permute_fdg(const Fdg& f, const std::vector<int>& perm)
{
    const int n = f.n;
    if (static_cast<int>(perm.size()) != n)
        throw Error(ErrorKind::invalid_labelling, "permutation size differs from order");
    check_injective(perm, n);
    Fdg out;
    static_cast<FirstOrderGraph&>(out) = permute_first_order(f, perm);
    out.rel.a_v = BoolMatrix(n);
    out.rel.o_v = BoolMatrix(n);
    out.rel.e_v = BoolMatrix(n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            out.rel.a_v.set(perm[x], perm[y], f.rel.a_v(x, y));
            out.rel.o_v.set(perm[x], perm[y], f.rel.o_v(x, y));
            out.rel.e_v.set(perm[x], perm[y], f.rel.e_v(x, y));
        }
    const int m = f.arc_count();
    std::vector<int> slot(m);
    for (int s = 0; s < m; ++s) {
        auto [a, b] = arc_endpoints(s, n);
        slot[s] = arc_index(perm[a], perm[b], n);
    }
    out.rel.a_e = BoolMatrix(m);
    out.rel.o_e = BoolMatrix(m);
    out.rel.e_e = BoolMatrix(m);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) {
            out.rel.a_e.set(slot[s], slot[t], f.rel.a_e(s, t));
            out.rel.o_e.set(slot[s], slot[t], f.rel.o_e(s, t));
            out.rel.e_e.set(slot[s], slot[t], f.rel.e_e(s, t));
        }
    if (f.arc_order) {
        ArcOrder order(n);
        for (int d = 0; d < n; ++d)
            for (int t : (*f.arc_order)[d])
                order[perm[d]].push_back(perm[t]);
        out.arc_order = std::move(order);
    }
    return out;
}

static void and_into(BoolMatrix& acc, const BoolMatrix& b)
{
    for (int x = 0; x < acc.size(); ++x)
        for (int y = 0; y < acc.size(); ++y)
            if (acc(x, y) && !b(x, y))
                acc.set(x, y, false);
}

Fdg synth_from_labelled_fdgs(const std::vector<Fdg>& d, const CommonLabelling& l, int n)
{
    if (d.empty())
        throw Error(ErrorKind::invalid_input, "synthesis needs at least one FDG");
    if (d.size() != l.size())
        throw Error(ErrorKind::invalid_labelling, "one label map per FDG is required");
    if (n < 0)
        n = default_order(l);
    std::vector<Fdg> placed;
    placed.reserve(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        const Fdg& f = d[k];
        const Labelling& lab = l[k];
        if (static_cast<int>(lab.size()) != f.n)
            throw Error(ErrorKind::invalid_labelling, "label map size differs from FDG order");
        for (int i = 0; i < f.n; ++i)
            if (lab[i] == kNullTarget && !f.vertex_pdfs[i].always_null())
                throw Error(ErrorKind::invalid_labelling, "non-null FDG vertex without a label");
        placed.push_back(permute_fdg(extend_fdg(f, n), complete_labels(lab, f.n, n)));
    }
    Fdg out = placed.front();
    for (std::size_t k = 1; k < placed.size(); ++k) {
        const Fdg& f = placed[k];
        out.z += f.z;
        for (int i = 0; i < n; ++i)
            out.vertex_pdfs[i].merge(f.vertex_pdfs[i]);
        for (int s = 0; s < out.arc_count(); ++s)
            out.arc_pdfs[s].merge(f.arc_pdfs[s]);
        and_into(out.rel.a_v, f.rel.a_v);
        and_into(out.rel.o_v, f.rel.o_v);
        and_into(out.rel.e_v, f.rel.e_v);
        and_into(out.rel.a_e, f.rel.a_e);
        and_into(out.rel.o_e, f.rel.o_e);
        and_into(out.rel.e_e, f.rel.e_e);
    }
    std::vector<const std::optional<ArcOrder>*> orders;
    for (const auto& f : placed)
        orders.push_back(&f.arc_order);
    out.arc_order = merge_orders(orders, n);
    return out;
}

Fdg ag_to_fdg(const AttributedGraph& g, const SynthOptions& opt)
{
    Labelling identity(g.order());
    for (int i = 0; i < g.order(); ++i)
        identity[i] = g.vertices[i].is_null ? kNullTarget : i;
    return synth_from_labelled_ags({g}, {identity}, g.order(), opt);
}

Fdg update_fdg_with_ag(const AttributedGraph& g, const Fdg& f, const Labelling& mu)
{
    if (static_cast<int>(mu.size()) != g.order())
        throw Error(ErrorKind::invalid_labelling, "labelling does not cover every graph vertex");
    check_injective(mu, f.n);
    Labelling lab_g(g.order());
    int next = f.n;
    // Unmatched non-null vertices become new FDG vertices; null ones just
    // fill whatever positions are left.
    for (int i = 0; i < g.order(); ++i)
        lab_g[i] = mu[i] != kNullTarget ? mu[i] : g.vertices[i].is_null ? kNullTarget : next++;
    const int n = std::max(next, g.order());
    Labelling lab_f(f.n);
    for (int i = 0; i < f.n; ++i)
        lab_f[i] = i;
    const Fdg fg = ag_to_fdg(g, {f.vertex_binning, f.arc_binning});
    return synth_from_labelled_fdgs({f, fg}, {lab_f, lab_g}, n);
}

} // namespace fdg
