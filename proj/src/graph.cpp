#include "crs/graph.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <string>

namespace crs {

Multigraph::Multigraph(int vertex_count, std::vector<Edge> edges)
    : edges_(std::move(edges)) {
    if (vertex_count < 0) throw InputError("negative vertex count");
    incident_.assign(vertex_count, {});
    pair_class_.assign(edges_.size(), -1);
    std::map<std::pair<int, int>, int> classes;
    for (EdgeId e = 0; e < edge_count(); ++e) {
        auto [u, v] = edges_[e];
        if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count) {
            throw InputError("edge " + std::to_string(e) + " has an endpoint out of range");
        }
        if (u == v) throw InputError("edge " + std::to_string(e) + " is a self-loop");
        incident_[u].push_back(e);
        incident_[v].push_back(e);
        auto key = std::minmax(u, v);
        auto [it, inserted] = classes.try_emplace(key, static_cast<int>(pair_members_.size()));
        if (inserted) pair_members_.emplace_back();
        pair_class_[e] = it->second;
        pair_members_[it->second].push_back(e);
    }
}

void Multigraph::check_vertex(VertexId v) const {
    if (v < 0 || v >= vertex_count()) throw InputError("unknown vertex " + std::to_string(v));
}

void Multigraph::check_edge(EdgeId e) const {
    if (e < 0 || e >= edge_count()) throw InputError("unknown edge-id " + std::to_string(e));
}

EdgeSet Multigraph::edges_between(VertexId u, VertexId v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw InputError("edges_between needs two distinct vertices");
    EdgeSet out;
    for (EdgeId e : incident_[u]) {
        if (other_end(e, u) == v) out.push_back(e);
    }
    return out;
}

bool Multigraph::share_endpoint(EdgeId a, EdgeId b) const {
    const Edge& x = edges_[a];
    const Edge& y = edges_[b];
    return x.u == y.u || x.u == y.v || x.v == y.u || x.v == y.v;
}

std::optional<std::vector<int>> Multigraph::two_coloring() const {
    std::vector<int> side(vertex_count(), -1);
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < vertex_count(); ++s) {
        if (side[s] != -1) continue;
        side[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId w = stack.back();
            stack.pop_back();
            for (EdgeId e : incident_[w]) {
                VertexId t = other_end(e, w);
                if (side[t] == -1) {
                    side[t] = 1 - side[w];
                    stack.push_back(t);
                } else if (side[t] == side[w]) {
                    return std::nullopt;
                }
            }
        }
    }
    return side;
}

EdgeSet normalize_edge_set(EdgeSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

void check_edge_set(const Multigraph& g, const EdgeSet& s) {
    for (EdgeId e : s) g.check_edge(e);
}

std::vector<char> edge_mask(const Multigraph& g, const EdgeSet& s) {
    std::vector<char> mask(g.edge_count(), 0);
    for (EdgeId e : s) {
        g.check_edge(e);
        mask[e] = 1;
    }
    return mask;
}

EdgeSet mask_to_set(const std::vector<char>& mask) {
    EdgeSet s;
    for (EdgeId e = 0; e < static_cast<EdgeId>(mask.size()); ++e) {
        if (mask[e]) s.push_back(e);
    }
    return s;
}

EdgeSet support(const FractionalPoint& x) {
    EdgeSet s;
    for (EdgeId e = 0; e < static_cast<EdgeId>(x.size()); ++e) {
        if (x[e] > 0) s.push_back(e);
    }
    return s;
}

void validate_point(const Multigraph& g, const FractionalPoint& x) {
    if (static_cast<int>(x.size()) != g.edge_count()) {
        throw InputError("point has " + std::to_string(x.size()) + " entries for " +
                         std::to_string(g.edge_count()) + " edges");
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!(x[e] >= 0.0 && x[e] <= 1.0)) {
            throw InputError("x[" + std::to_string(e) + "] outside [0,1]");
        }
    }
}

bool is_matching(const Multigraph& g, const EdgeSet& s) {
    std::vector<char> used(g.vertex_count(), 0);
    for (EdgeId e : s) {
        g.check_edge(e);
        auto [u, v] = g.edge(e);
        if (used[u] || used[v]) return false;
        used[u] = used[v] = 1;
    }
    return true;
}

double degree_load(const Multigraph& g, const FractionalPoint& x, VertexId v) {
    g.check_vertex(v);
    double s = 0;
    for (EdgeId e : g.incident(v)) s += x[e];
    return s;
}

Rational degree_load(const Multigraph& g, const RationalVector& x, VertexId v) {
    g.check_vertex(v);
    Rational s = 0;
    for (EdgeId e : g.incident(v)) s += x[e];
    return s;
}

bool in_degree_polytope(const Multigraph& g, const FractionalPoint& x, double b) {
    if (static_cast<int>(x.size()) != g.edge_count()) return false;
    for (double xe : x) {
        if (xe < -kPolytopeTolerance) return false;
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (degree_load(g, x, v) > b + kPolytopeTolerance) return false;
    }
    return true;
}

bool in_degree_polytope(const Multigraph& g, const RationalVector& x, const Rational& b) {
    if (static_cast<int>(x.size()) != g.edge_count()) return false;
    for (const Rational& xe : x) {
        if (xe < 0) return false;
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (degree_load(g, x, v) > b) return false;
    }
    return true;
}

namespace {

void check_odd_set_cap(const Multigraph& g) {
    if (g.vertex_count() > kOddSetVertexCap) {
        throw CapabilityError(
            "odd-set enumeration is limited to 20 vertices; use in_degree_polytope and "
            "scale by 2/3, since (2/3) times the degree polytope lies in the matching polytope");
    }
}

// Subset sums of x over E[S] for every vertex subset S, built by adding one
// vertex at a time. within(S) = within(S - v) + weight(v, S - v).
template <class Num, class Fits>
bool odd_sets_hold(const Multigraph& g, const std::vector<Num>& x, const Fits& fits) {
    const int n = g.vertex_count();
    std::vector<std::vector<Num>> w(n, std::vector<Num>(n, Num(0)));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        auto [u, v] = g.edge(e);
        w[u][v] += x[e];
        w[v][u] += x[e];
    }
    const std::uint32_t total = std::uint32_t{1} << n;
    std::vector<Num> within(total, Num(0));
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        int v = std::countr_zero(mask);
        std::uint32_t rest = mask & (mask - 1);
        Num s = within[rest];
        for (std::uint32_t r = rest; r; r &= r - 1) s += w[v][std::countr_zero(r)];
        within[mask] = s;
        int size = std::popcount(mask);
        if (size >= 3 && (size & 1) && !fits(s, size)) return false;
    }
    return true;
}

}  // namespace

bool in_matching_polytope_exact(const Multigraph& g, const FractionalPoint& x, double b) {
    check_odd_set_cap(g);
    if (!in_degree_polytope(g, x, b)) return false;
    return odd_sets_hold(g, x, [b](double s, int size) {
        return s <= b * (size - 1) / 2.0 + kPolytopeTolerance;
    });
}

bool in_matching_polytope_exact(const Multigraph& g, const RationalVector& x, const Rational& b) {
    check_odd_set_cap(g);
    if (!in_degree_polytope(g, x, b)) return false;
    // Scale to integers with a common denominator.
    BigInt den = boost::multiprecision::denominator(b);
    for (const Rational& xe : x) {
        den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(xe));
    }
    std::vector<BigInt> scaled;
    scaled.reserve(x.size());
    BigInt total = 0;
    for (const Rational& xe : x) {
        BigInt s = boost::multiprecision::numerator(xe) * (den / boost::multiprecision::denominator(xe));
        total += s;
        scaled.push_back(s);
    }
    BigInt bound = boost::multiprecision::numerator(b) * (den / boost::multiprecision::denominator(b));
    const BigInt limit = BigInt(1) << 58;
    if (total < limit && bound * kOddSetVertexCap < limit) {
        std::vector<std::int64_t> small;
        small.reserve(scaled.size());
        for (const BigInt& s : scaled) small.push_back(s.convert_to<std::int64_t>());
        const std::int64_t bb = bound.convert_to<std::int64_t>();
        return odd_sets_hold(g, small, [bb](std::int64_t s, int size) {
            return 2 * s <= bb * (size - 1);
        });
    }
    return odd_sets_hold(g, scaled, [&bound](const BigInt& s, int size) {
        return 2 * s <= bound * (size - 1);
    });
}

std::vector<Component> bipartite_components(const Multigraph& g, const EdgeSet& active) {
    std::vector<char> on = edge_mask(g, active);
    std::vector<int> comp(g.vertex_count(), -1);
    std::vector<int> side(g.vertex_count(), 0);
    std::vector<Component> out;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < g.vertex_count(); ++s) {
        if (comp[s] != -1) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        Component& c = out.back();
        comp[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId w = stack.back();
            stack.pop_back();
            c.vertices.push_back(w);
            for (EdgeId e : g.incident(w)) {
                if (!on[e]) continue;
                VertexId t = g.other_end(e, w);
                if (comp[t] == -1) {
                    comp[t] = id;
                    side[t] = 1 - side[w];
                    stack.push_back(t);
                } else if (side[t] == side[w]) {
                    c.bipartite = false;
                }
            }
        }
        std::sort(c.vertices.begin(), c.vertices.end());
    }
    for (EdgeId e : active) out[comp[g.edge(e).u]].edges.push_back(e);
    return out;
}

std::vector<char> bipartite_component_flags(const Multigraph& g, const std::vector<char>& active) {
    std::vector<int> comp(g.vertex_count(), -1);
    std::vector<int> side(g.vertex_count(), 0);
    std::vector<char> comp_bip;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < g.vertex_count(); ++s) {
        if (comp[s] != -1) continue;
        const int id = static_cast<int>(comp_bip.size());
        comp_bip.push_back(1);
        comp[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId w = stack.back();
            stack.pop_back();
            for (EdgeId e : g.incident(w)) {
                if (!active[e]) continue;
                VertexId t = g.other_end(e, w);
                if (comp[t] == -1) {
                    comp[t] = id;
                    side[t] = 1 - side[w];
                    stack.push_back(t);
                } else if (side[t] == side[w]) {
                    comp_bip[id] = 0;
                }
            }
        }
    }
    std::vector<char> flags(g.edge_count(), 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (active[e]) flags[e] = comp_bip[comp[g.edge(e).u]];
    }
    return flags;
}

}  // namespace crs
