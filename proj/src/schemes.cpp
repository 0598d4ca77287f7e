#include "crs/schemes.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace crs {

namespace {

struct NamedKind {
    SchemeKind kind;
    const char* name;
};

constexpr std::array<NamedKind, 11> kNames{{
    {SchemeKind::RefIsolated, "ex1.4"},
    {SchemeKind::BipSimple, "ex2.2"},
    {SchemeKind::BipPoisson, "alg1"},
    {SchemeKind::BipPoissonMerged, "alg2"},
    {SchemeKind::GenRandomOrder, "ex4.1"},
    {SchemeKind::GenPoisson, "alg3"},
    {SchemeKind::GenPoissonMerged, "alg4"},
    {SchemeKind::Mixed, "alg5"},
    {SchemeKind::MixedMerged, "alg6"},
    {SchemeKind::RefBipartition, "ref-bipartition"},
    {SchemeKind::RefScaledTwoThirds, "ref-2of3"},
}};

template <class T>
std::vector<T> formula_values(Formula f, const Multigraph& g, const IntensityVector& q) {
    if (static_cast<int>(q.size()) != g.edge_count()) throw InputError("intensity vector has wrong length");
    std::vector<long long> at(g.vertex_count(), 0);
    std::vector<long long> pair(g.pair_class_count(), 0);
    std::vector<char> active(g.edge_count(), 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (q[e] < 0) throw InputError("negative intensity");
        if (q[e] == 0) continue;
        active[e] = 1;
        at[g.edge(e).u] += q[e];
        at[g.edge(e).v] += q[e];
        pair[g.pair_class(e)] += q[e];
    }
    std::vector<char> bip;
    if (f == Formula::Mixed) bip = bipartite_component_flags(g, active);
    std::vector<T> y(g.edge_count(), T(0));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (q[e] == 0) continue;
        auto [u, v] = g.edge(e);
        const bool use_max = f == Formula::Max || (f == Formula::Mixed && bip[e]);
        long long den = use_max ? std::max(at[u], at[v]) : at[u] + at[v] - pair[g.pair_class(e)];
        y[e] = T(q[e]) / T(den);
    }
    return y;
}

void require_bipartite(const Multigraph& g, const char* what) {
    if (!g.is_bipartite()) throw CapabilityError(std::string(what) + " requires a bipartite graph");
}

// Edge counts of a at each vertex and each parallel class.
struct SetDegrees {
    std::vector<int> at;
    std::vector<int> pair;
};

SetDegrees set_degrees(const Multigraph& g, const EdgeSet& a) {
    SetDegrees d{std::vector<int>(g.vertex_count(), 0), std::vector<int>(g.pair_class_count(), 0)};
    for (EdgeId e : a) {
        ++d.at[g.edge(e).u];
        ++d.at[g.edge(e).v];
        ++d.pair[g.pair_class(e)];
    }
    return d;
}

void check_support(const MarginalVector& y, const EdgeSet& a) {
    std::vector<char> in(y.size(), 0);
    for (EdgeId e : a) in[e] = 1;
    for (std::size_t e = 0; e < y.size(); ++e) {
        if (y[e] != 0.0 && !in[e]) throw std::logic_error("scheme output escapes its input set");
    }
}

}  // namespace

SchemeKind parse_scheme(std::string_view name) {
    for (const auto& n : kNames) {
        if (name == n.name) return n.kind;
    }
    throw InputError("unknown scheme '" + std::string(name) + "'");
}

std::string scheme_name(SchemeKind kind) {
    for (const auto& n : kNames) {
        if (n.kind == kind) return n.name;
    }
    return "?";
}

const std::vector<SchemeKind>& all_schemes() {
    static const std::vector<SchemeKind> kinds = [] {
        std::vector<SchemeKind> out;
        for (const auto& n : kNames) out.push_back(n.kind);
        return out;
    }();
    return kinds;
}

bool requires_bipartite(SchemeKind kind) {
    return kind == SchemeKind::BipSimple || kind == SchemeKind::BipPoisson || kind == SchemeKind::BipPoissonMerged;
}

bool is_merged(SchemeKind kind) {
    return kind == SchemeKind::BipPoissonMerged || kind == SchemeKind::GenPoissonMerged ||
           kind == SchemeKind::MixedMerged;
}

SchemeKind base_kind(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::BipPoissonMerged: return SchemeKind::BipPoisson;
        case SchemeKind::GenPoissonMerged: return SchemeKind::GenPoisson;
        case SchemeKind::MixedMerged: return SchemeKind::Mixed;
        default: return kind;
    }
}

bool is_deterministic(SchemeKind kind) {
    return kind == SchemeKind::BipSimple || kind == SchemeKind::GenRandomOrder;
}

std::optional<Formula> intensity_formula(SchemeKind kind) {
    switch (base_kind(kind)) {
        case SchemeKind::BipPoisson:
        case SchemeKind::RefBipartition:
        case SchemeKind::RefScaledTwoThirds: return Formula::Max;
        case SchemeKind::GenPoisson: return Formula::Sum;
        case SchemeKind::Mixed: return Formula::Mixed;
        default: return std::nullopt;
    }
}

void check_scheme_input(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a) {
    validate_point(g, x);
    for (EdgeId e : a) {
        g.check_edge(e);
        if (x[e] == 0.0) throw InputError("edge " + std::to_string(e) + " is in the input set but not in supp(x)");
    }
    if (requires_bipartite(kind)) require_bipartite(g, scheme_name(kind).c_str());
}

MarginalVector intensity_marginals(Formula f, const Multigraph& g, const IntensityVector& q) {
    return formula_values<double>(f, g, q);
}

RationalVector intensity_marginals_exact(Formula f, const Multigraph& g, const IntensityVector& q) {
    return formula_values<Rational>(f, g, q);
}

IntensityVector draw_intensity(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r) {
    IntensityVector q(g.edge_count(), 0);
    for (EdgeId e : subsample(a, x, r)) q[e] = draw_poisson_geq1(x[e], r);
    return q;
}

IntensityVector draw_merged_intensity(const Multigraph& g, const FractionalPoint& x, RngStream& r) {
    IntensityVector q(g.edge_count(), 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) q[e] = draw_poisson(x[e], r);
    return q;
}

MarginalVector bip_simple_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a) {
    check_scheme_input(SchemeKind::BipSimple, g, x, a);
    SetDegrees d = set_degrees(g, a);
    MarginalVector y(g.edge_count(), 0.0);
    for (EdgeId e : a) y[e] = 1.0 / std::max(d.at[g.edge(e).u], d.at[g.edge(e).v]);
    return y;
}

RationalVector bip_simple_marginals_exact(const Multigraph& g, const EdgeSet& a) {
    require_bipartite(g, "ex2.2");
    check_edge_set(g, a);
    SetDegrees d = set_degrees(g, a);
    RationalVector y(g.edge_count(), Rational(0));
    for (EdgeId e : a) y[e] = Rational(1, std::max(d.at[g.edge(e).u], d.at[g.edge(e).v]));
    return y;
}

MarginalVector bip_poisson_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r) {
    check_scheme_input(SchemeKind::BipPoisson, g, x, a);
    return intensity_marginals(Formula::Max, g, draw_intensity(g, x, a, r));
}

MarginalVector gen_random_order_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a) {
    check_scheme_input(SchemeKind::GenRandomOrder, g, x, a);
    SetDegrees d = set_degrees(g, a);
    MarginalVector y(g.edge_count(), 0.0);
    for (EdgeId e : a) {
        auto [u, v] = g.edge(e);
        y[e] = 1.0 / (d.at[u] + d.at[v] - d.pair[g.pair_class(e)]);
    }
    return y;
}

RationalVector gen_random_order_marginals_exact(const Multigraph& g, const EdgeSet& a) {
    check_edge_set(g, a);
    SetDegrees d = set_degrees(g, a);
    RationalVector y(g.edge_count(), Rational(0));
    for (EdgeId e : a) {
        auto [u, v] = g.edge(e);
        y[e] = Rational(1, d.at[u] + d.at[v] - d.pair[g.pair_class(e)]);
    }
    return y;
}

MarginalVector gen_poisson_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r) {
    check_scheme_input(SchemeKind::GenPoisson, g, x, a);
    return intensity_marginals(Formula::Sum, g, draw_intensity(g, x, a, r));
}

MarginalVector mixed_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r) {
    check_scheme_input(SchemeKind::Mixed, g, x, a);
    return intensity_marginals(Formula::Mixed, g, draw_intensity(g, x, a, r));
}

MarginalVector merged_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, RngStream& r) {
    if (!is_merged(kind) && kind != SchemeKind::BipPoisson && kind != SchemeKind::GenPoisson &&
        kind != SchemeKind::Mixed) {
        throw InputError("merged form exists only for alg1/alg3/alg5 and their merged names");
    }
    check_scheme_input(kind, g, x, {});
    return intensity_marginals(*intensity_formula(kind), g, draw_merged_intensity(g, x, r));
}

EdgeSet crossing_subset(const Multigraph& g, const EdgeSet& a, RngStream& r) {
    std::vector<char> side(g.vertex_count());
    for (auto& s : side) s = static_cast<char>(r.next_u64() >> 63);
    EdgeSet out;
    for (EdgeId e : a) {
        if (side[g.edge(e).u] != side[g.edge(e).v]) out.push_back(e);
    }
    return out;
}

EdgeSet isolated_survivors(const Multigraph& g, const EdgeSet& a, RngStream& r) {
    EdgeSet kept;
    std::vector<int> at(g.vertex_count(), 0);
    for (EdgeId e : a) {
        if (r.next_u64() >> 63) {
            kept.push_back(e);
            ++at[g.edge(e).u];
            ++at[g.edge(e).v];
        }
    }
    EdgeSet out;
    for (EdgeId e : kept) {
        if (at[g.edge(e).u] == 1 && at[g.edge(e).v] == 1) out.push_back(e);
    }
    return out;
}

MarginalVector reference_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a,
                                   RngStream& r) {
    check_scheme_input(kind, g, x, a);
    MarginalVector y(g.edge_count(), 0.0);
    switch (kind) {
        case SchemeKind::RefIsolated:
            for (EdgeId e : isolated_survivors(g, a, r)) y[e] = 1.0;
            return y;
        case SchemeKind::RefBipartition:
            return intensity_marginals(Formula::Max, g, draw_intensity(g, x, crossing_subset(g, a, r), r));
        case SchemeKind::RefScaledTwoThirds:
            y = intensity_marginals(Formula::Max, g, draw_intensity(g, x, a, r));
            for (double& v : y) v *= 2.0 / 3.0;
            return y;
        default:
            throw InputError("not a reference scheme: " + scheme_name(kind));
    }
}

MarginalVector scheme_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a,
                                RngStream& r) {
    MarginalVector y;
    switch (base_kind(kind)) {
        case SchemeKind::BipSimple: y = bip_simple_marginals(g, x, a); break;
        case SchemeKind::BipPoisson: y = bip_poisson_marginals(g, x, a, r); break;
        case SchemeKind::GenRandomOrder: y = gen_random_order_marginals(g, x, a); break;
        case SchemeKind::GenPoisson: y = gen_poisson_marginals(g, x, a, r); break;
        case SchemeKind::Mixed: y = mixed_marginals(g, x, a, r); break;
        default: y = reference_marginals(kind, g, x, a, r); break;
    }
    check_support(y, a);
    return y;
}

MarginalVector rounded_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, RngStream& r) {
    if (is_merged(kind)) return merged_marginals(kind, g, x, r);
    EdgeSet a = independent_round(x, r);
    return scheme_marginals(kind, g, x, a, r);
}

}  // namespace crs
