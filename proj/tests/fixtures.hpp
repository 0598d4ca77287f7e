#pragma once

#include <cmath>
#include <vector>

#include "crs/graph.hpp"

namespace fixtures {

using crs::Edge;
using crs::Multigraph;

inline Multigraph path(int edges) {
    std::vector<Edge> e;
    for (int i = 0; i < edges; ++i) e.push_back({i, i + 1});
    return Multigraph(edges + 1, e);
}

inline Multigraph cycle(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return Multigraph(n, e);
}

inline Multigraph triangle() { return cycle(3); }

inline Multigraph complete(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) e.push_back({i, j});
    }
    return Multigraph(n, e);
}

inline Multigraph complete_bipartite(int a, int b) {
    std::vector<Edge> e;
    for (int i = 0; i < a; ++i) {
        for (int j = 0; j < b; ++j) e.push_back({i, a + j});
    }
    return Multigraph(a + b, e);
}

inline Multigraph star(int leaves) {
    std::vector<Edge> e;
    for (int i = 0; i < leaves; ++i) e.push_back({0, i + 1});
    return Multigraph(leaves + 1, e);
}

// Vertices 1..7 of the introductory rounding illustration as ids 0..6.
inline Multigraph intro_graph() {
    return Multigraph(7, {{5, 0}, {5, 3}, {0, 4}, {1, 0}, {4, 5}, {1, 5}, {2, 1}, {2, 3}, {4, 6}, {3, 6}, {2, 6}});
}
inline std::vector<double> intro_x() { return {0.2, 0.1, 0.3, 0.5, 0.2, 0.3, 0.0, 0.6, 0.4, 0.3, 0.3}; }

// Bipartite marginal illustration: u1..u4 = 0..3, v1..v5 = 4..8.
inline Multigraph marginal_bip_graph() {
    return Multigraph(9, {{0, 4}, {0, 5}, {0, 7}, {1, 4}, {1, 5}, {2, 5}, {2, 6}, {2, 7}, {3, 7}, {3, 8}});
}
// The input set: everything except u2v1 and u4v4.
inline crs::EdgeSet marginal_bip_set() { return {0, 1, 2, 4, 5, 6, 7, 9}; }

// General marginal illustration: u1,u2,u3,v1,v2,v3,w1 = 0..6.
inline Multigraph marginal_gen_graph() {
    return Multigraph(7, {{0, 1}, {0, 3}, {1, 2}, {1, 3}, {2, 5}, {2, 6}, {3, 4}, {3, 6}, {4, 5}, {4, 6}, {5, 6}});
}
inline crs::EdgeSet marginal_gen_set() { return {1, 2, 3, 4, 5, 6, 8, 9, 10}; }

inline bool within_sigma(double observed, double expected, double p_var, double n, double k = 3.0) {
    return std::abs(observed - expected) <= k * std::sqrt(p_var / n) + 1e-12;
}

}  // namespace fixtures
