#include "crs/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace crs {

namespace {

constexpr int kGeneralVertexCap = 16;
constexpr int kGeneralEdgeCap = 40;

void check_marginal_vector(const Multigraph& g, const RationalVector& y) {
    if (static_cast<int>(y.size()) != g.edge_count()) throw InputError("marginal vector has wrong length");
    for (const Rational& v : y) {
        if (v < 0) throw InputError("marginal vector has a negative entry");
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (degree_load(g, y, v) > 1) {
            throw InputError("marginal vector violates the degree constraint at vertex " + std::to_string(v));
        }
    }
}

std::vector<int> support_sides(const Multigraph& g, const RationalVector& y) {
    std::vector<int> side(g.vertex_count(), -1);
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < g.vertex_count(); ++s) {
        if (side[s] != -1) continue;
        side[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId w = stack.back();
            stack.pop_back();
            for (EdgeId e : g.incident(w)) {
                if (y[e] == 0) continue;
                VertexId t = g.other_end(e, w);
                if (side[t] == -1) {
                    side[t] = 1 - side[w];
                    stack.push_back(t);
                } else if (side[t] == side[w]) {
                    throw InputError("support of the marginal vector is not bipartite");
                }
            }
        }
    }
    return side;
}

std::vector<Rational> loads_of(const Multigraph& g, const RationalVector& r) {
    std::vector<Rational> load(g.vertex_count(), Rational(0));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (r[e] == 0) continue;
        load[g.edge(e).u] += r[e];
        load[g.edge(e).v] += r[e];
    }
    return load;
}

// Left node i is vertex i on side 0 and the copy of vertex i on side 1; right
// node j the other way round. Support edges appear once between the real
// vertices and once between the copies; non-tight vertices also get the slack
// edge i-i. The point padded this way is a fractional perfect matching, so a
// perfect matching exists, and its real part covers every tight vertex.
Matching tight_cover(const Multigraph& g, const std::vector<int>& side, const RationalVector& r,
                     const std::vector<Rational>& load, const Rational& mu) {
    const int n = g.vertex_count();
    std::vector<std::vector<std::pair<int, EdgeId>>> adj(n);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (r[e] == 0) continue;
        auto [u, v] = g.edge(e);
        VertexId l = side[u] == 0 ? u : v;
        VertexId rr = g.other_end(e, l);
        adj[l].push_back({rr, e});
        adj[rr].push_back({l, e});
    }
    for (VertexId v = 0; v < n; ++v) {
        if (load[v] < mu) adj[v].push_back({v, -1});
    }
    std::vector<int> match_right(n, -1);
    std::vector<EdgeId> via(n, -1);
    std::vector<char> seen(n, 0);
    std::function<bool(int)> augment = [&](int i) {
        for (auto [j, tag] : adj[i]) {
            if (seen[j]) continue;
            seen[j] = 1;
            if (match_right[j] == -1 || augment(match_right[j])) {
                match_right[j] = i;
                via[j] = tag;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < n; ++i) {
        std::fill(seen.begin(), seen.end(), 0);
        if (!augment(i)) throw std::logic_error("padded support graph has no perfect matching");
    }
    Matching m;
    for (VertexId j = 0; j < n; ++j) {
        if (side[j] == 1 && via[j] >= 0) m.push_back(via[j]);
    }
    std::sort(m.begin(), m.end());
    return m;
}

// Largest weight w such that (r - w * chi^M) / (mu - w) keeps the degree
// constraints; odd-set bounds are applied by the caller when needed.
Rational degree_step(const Multigraph& g, const Matching& m, const RationalVector& r,
                     const std::vector<Rational>& load, const Rational& mu) {
    Rational w = mu;
    std::vector<char> covered(g.vertex_count(), 0);
    for (EdgeId e : m) {
        w = std::min(w, r[e]);
        covered[g.edge(e).u] = covered[g.edge(e).v] = 1;
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (!covered[v]) w = std::min(w, Rational(mu - load[v]));
    }
    return w;
}

}  // namespace

Rational ConvexCombination::total_weight() const {
    Rational s = 0;
    for (const auto& t : terms) s += t.weight;
    return s;
}

RationalVector ConvexCombination::reconstruct(int edge_count) const {
    RationalVector y(edge_count, Rational(0));
    for (const auto& t : terms) {
        for (EdgeId e : t.matching) y[e] += t.weight;
    }
    return y;
}

ConvexCombination birkhoff_decompose(const Multigraph& g, const RationalVector& y) {
    check_marginal_vector(g, y);
    std::vector<int> side = support_sides(g, y);
    RationalVector r = y;
    Rational mu = 1;
    ConvexCombination out;
    while (mu > 0) {
        std::vector<Rational> load = loads_of(g, r);
        Matching m = tight_cover(g, side, r, load, mu);
        Rational w = degree_step(g, m, r, load, mu);
        if (w <= 0) throw std::logic_error("decomposition made no progress");
        for (EdgeId e : m) r[e] -= w;
        mu -= w;
        out.terms.push_back({w, std::move(m)});
    }
    return out;
}

ConvexCombination birkhoff_decompose(const Multigraph& g, const MarginalVector& y) {
    if (static_cast<int>(y.size()) != g.edge_count()) throw InputError("marginal vector has wrong length");
    RationalVector exact;
    exact.reserve(y.size());
    for (double v : y) {
        if (!(v >= -kPolytopeTolerance)) throw InputError("marginal vector has a negative entry");
        exact.push_back(v <= 0 ? Rational(0) : decimal_rational(v));
    }
    Rational worst = 1;
    for (VertexId v = 0; v < g.vertex_count(); ++v) worst = std::max(worst, degree_load(g, exact, v));
    if (worst > 1) {
        if (worst > 1 + decimal_rational(kPolytopeTolerance)) {
            throw InputError("marginal vector lies outside the matching polytope");
        }
        for (Rational& v : exact) v /= worst;
    }
    return birkhoff_decompose(g, exact);
}

ConvexCombination matching_polytope_decompose(const Multigraph& g, const RationalVector& y) {
    check_marginal_vector(g, y);
    std::vector<VertexId> verts;
    std::vector<int> index(g.vertex_count(), -1);
    EdgeSet supp;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (y[e] == 0) continue;
        supp.push_back(e);
        for (VertexId v : {g.edge(e).u, g.edge(e).v}) {
            if (index[v] == -1) {
                index[v] = static_cast<int>(verts.size());
                verts.push_back(v);
            }
        }
    }
    if (static_cast<int>(verts.size()) > kGeneralVertexCap || static_cast<int>(supp.size()) > kGeneralEdgeCap) {
        throw CapabilityError("general matching-polytope decomposition is limited to 16 support vertices");
    }
    struct OddSet {
        EdgeSet inner;
        int half;
    };
    std::vector<OddSet> odd;
    const std::uint32_t total = std::uint32_t{1} << verts.size();
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        int size = std::popcount(mask);
        if (size < 3 || !(size & 1)) continue;
        OddSet s{{}, (size - 1) / 2};
        for (EdgeId e : supp) {
            if ((mask >> index[g.edge(e).u] & 1) && (mask >> index[g.edge(e).v] & 1)) s.inner.push_back(e);
        }
        if (static_cast<int>(s.inner.size()) > s.half) odd.push_back(std::move(s));
    }
    for (const auto& s : odd) {
        Rational sum = 0;
        for (EdgeId e : s.inner) sum += y[e];
        if (sum > s.half) throw InputError("marginal vector violates an odd-set constraint");
    }

    RationalVector r = y;
    Rational mu = 1;
    ConvexCombination out;
    while (mu > 0) {
        std::vector<Rational> load = loads_of(g, r);
        std::vector<Rational> inside(odd.size(), Rational(0));
        std::vector<char> tight_set(odd.size(), 0);
        for (std::size_t i = 0; i < odd.size(); ++i) {
            for (EdgeId e : odd[i].inner) inside[i] += r[e];
            tight_set[i] = inside[i] == mu * odd[i].half;
        }
        EdgeSet live;
        for (EdgeId e : supp) {
            if (r[e] > 0) live.push_back(e);
        }
        // Depth-first search for a matching inside the live support meeting
        // every tight constraint with equality.
        std::vector<char> used(g.vertex_count(), 0);
        Matching chosen;
        std::function<bool(std::size_t)> search = [&](std::size_t k) -> bool {
            if (k == live.size()) {
                for (VertexId v : verts) {
                    if (load[v] == mu && !used[v]) return false;
                }
                std::vector<char> in(g.edge_count(), 0);
                for (EdgeId e : chosen) in[e] = 1;
                for (std::size_t i = 0; i < odd.size(); ++i) {
                    if (!tight_set[i]) continue;
                    int c = 0;
                    for (EdgeId e : odd[i].inner) c += in[e];
                    if (c != odd[i].half) return false;
                }
                return true;
            }
            EdgeId e = live[k];
            auto [u, v] = g.edge(e);
            if (!used[u] && !used[v]) {
                used[u] = used[v] = 1;
                chosen.push_back(e);
                if (search(k + 1)) return true;
                chosen.pop_back();
                used[u] = used[v] = 0;
            }
            return search(k + 1);
        };
        if (!search(0)) throw std::logic_error("no matching meets the tight constraints");
        Matching m = chosen;
        std::sort(m.begin(), m.end());
        Rational w = degree_step(g, m, r, load, mu);
        std::vector<char> in(g.edge_count(), 0);
        for (EdgeId e : m) in[e] = 1;
        for (std::size_t i = 0; i < odd.size(); ++i) {
            int c = 0;
            for (EdgeId e : odd[i].inner) c += in[e];
            if (c < odd[i].half) w = std::min(w, Rational((mu * odd[i].half - inside[i]) / (odd[i].half - c)));
        }
        if (w <= 0) throw std::logic_error("decomposition made no progress");
        for (EdgeId e : m) r[e] -= w;
        mu -= w;
        out.terms.push_back({w, std::move(m)});
    }
    return out;
}

const Matching& pick(const ConvexCombination& c, double u) {
    if (c.terms.empty()) throw InputError("empty convex combination");
    double acc = 0;
    for (const auto& t : c.terms) {
        acc += to_double(t.weight);
        if (u < acc) return t.matching;
    }
    return c.terms.back().matching;
}

Matching clock_matching(const Multigraph& g, const std::vector<double>& times) {
    if (static_cast<int>(times.size()) != g.edge_count()) throw InputError("clock vector has wrong length");
    Matching out;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (std::isinf(times[e])) continue;
        bool first = true;
        for (VertexId end : {g.edge(e).u, g.edge(e).v}) {
            for (EdgeId h : g.incident(end)) {
                if (h != e && (times[h] < times[e] || (times[h] == times[e] && h < e))) {
                    first = false;
                    break;
                }
            }
            if (!first) break;
        }
        if (first) out.push_back(e);
    }
    return out;
}

Matching exp_clock_matching(const Multigraph& g, const std::vector<double>& w, RngStream& r) {
    if (static_cast<int>(w.size()) != g.edge_count()) throw InputError("weight vector has wrong length");
    std::vector<double> times(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!(w[e] >= 0)) throw InputError("clock weights must be nonnegative");
        times[e] = draw_exponential(w[e], r);
    }
    return clock_matching(g, times);
}

Matching random_order_matching(const Multigraph& g, const EdgeSet& a, RngStream& r) {
    check_edge_set(g, a);
    EdgeSet order = a;
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[r.below(i)]);
    }
    std::vector<double> times(g.edge_count(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < order.size(); ++i) times[order[i]] = static_cast<double>(i);
    return clock_matching(g, times);
}

namespace {

Matching pick_bipartite(const Multigraph& g, const RationalVector& y, RngStream& r) {
    return pick(birkhoff_decompose(g, y), r.uniform());
}

Matching merge(Matching a, const Matching& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

}  // namespace

Matching resolve(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r) {
    check_scheme_input(kind, g, x, a);
    switch (base_kind(kind)) {
        case SchemeKind::RefIsolated:
            return isolated_survivors(g, a, r);
        case SchemeKind::GenRandomOrder:
            return random_order_matching(g, a, r);
        case SchemeKind::BipSimple:
            return pick_bipartite(g, bip_simple_marginals_exact(g, a), r);
        case SchemeKind::BipPoisson:
            return pick_bipartite(g, intensity_marginals_exact(Formula::Max, g, draw_intensity(g, x, a, r)), r);
        case SchemeKind::RefBipartition: {
            EdgeSet cross = crossing_subset(g, a, r);
            return pick_bipartite(g, intensity_marginals_exact(Formula::Max, g, draw_intensity(g, x, cross, r)), r);
        }
        case SchemeKind::GenPoisson: {
            IntensityVector q = draw_intensity(g, x, a, r);
            return exp_clock_matching(g, std::vector<double>(q.begin(), q.end()), r);
        }
        case SchemeKind::Mixed: {
            IntensityVector q = draw_intensity(g, x, a, r);
            std::vector<char> active(g.edge_count());
            for (EdgeId e = 0; e < g.edge_count(); ++e) active[e] = q[e] > 0;
            std::vector<char> bip = bipartite_component_flags(g, active);
            IntensityVector q_bip(g.edge_count(), 0);
            std::vector<double> w_odd(g.edge_count(), 0.0);
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                if (bip[e]) {
                    q_bip[e] = q[e];
                } else {
                    w_odd[e] = q[e];
                }
            }
            Matching odd_part = exp_clock_matching(g, w_odd, r);
            return merge(pick_bipartite(g, intensity_marginals_exact(Formula::Max, g, q_bip), r), odd_part);
        }
        case SchemeKind::RefScaledTwoThirds: {
            IntensityVector q = draw_intensity(g, x, a, r);
            RationalVector y = intensity_marginals_exact(Formula::Max, g, q);
            for (Rational& v : y) v *= Rational(2, 3);
            Matching out;
            EdgeSet active;
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                if (q[e] > 0) active.push_back(e);
            }
            for (const Component& c : bipartite_components(g, active)) {
                if (c.edges.empty()) continue;
                RationalVector part(g.edge_count(), Rational(0));
                for (EdgeId e : c.edges) part[e] = y[e];
                ConvexCombination comb =
                    c.bipartite ? birkhoff_decompose(g, part) : matching_polytope_decompose(g, part);
                out = merge(std::move(out), pick(comb, r.uniform()));
            }
            return out;
        }
        default:
            throw std::logic_error("unhandled scheme kind");
    }
}

Matching intersect_schemes(const std::vector<SchemeContext>& schemes, const FractionalPoint& x, const EdgeSet& a,
                           RngStream& r, bool coupled) {
    if (schemes.empty()) throw InputError("intersection needs at least one scheme");
    const std::uint64_t base = r.next_u64();
    std::vector<char> keep;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const Multigraph& g = *schemes[i].graph;
        if (static_cast<int>(x.size()) != g.edge_count()) throw InputError("scheme graphs must share the edge ids");
        RngStream own(r.seed(), stream_key(base, coupled ? 0 : i + 1));
        Matching m = resolve(schemes[i].kind, g, x, a, own);
        std::vector<char> in(g.edge_count(), 0);
        for (EdgeId e : m) in[e] = 1;
        if (keep.empty()) {
            keep = std::move(in);
        } else {
            for (std::size_t e = 0; e < keep.size(); ++e) keep[e] = keep[e] && in[e];
        }
    }
    return mask_to_set(keep);
}

}  // namespace crs
