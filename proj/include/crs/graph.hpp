#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crs/errors.hpp"
#include "crs/rational.hpp"

namespace crs {

using VertexId = int;
using EdgeId = int;

// Edge-id sets are kept sorted and duplicate free.
using EdgeSet = std::vector<EdgeId>;
using Matching = std::vector<EdgeId>;
using FractionalPoint = std::vector<double>;
using MarginalVector = std::vector<double>;
using RationalVector = std::vector<Rational>;

inline constexpr double kPolytopeTolerance = 1e-9;
inline constexpr int kOddSetVertexCap = 20;

struct Edge {
    VertexId u;
    VertexId v;
};

class Multigraph {
public:
    Multigraph() = default;
    Multigraph(int vertex_count, std::vector<Edge> edges);

    int vertex_count() const { return static_cast<int>(incident_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(EdgeId e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<EdgeId>& incident(VertexId v) const { return incident_[v]; }
    VertexId other_end(EdgeId e, VertexId v) const {
        return edges_[e].u == v ? edges_[e].v : edges_[e].u;
    }

    // Parallel edges share a pair class.
    int pair_class(EdgeId e) const { return pair_class_[e]; }
    int pair_class_count() const { return static_cast<int>(pair_members_.size()); }
    const std::vector<EdgeId>& pair_members(int cls) const { return pair_members_[cls]; }

    EdgeSet edges_between(VertexId u, VertexId v) const;
    bool share_endpoint(EdgeId a, EdgeId b) const;

    // Side 0/1 per vertex, or nullopt when an odd cycle exists.
    std::optional<std::vector<int>> two_coloring() const;
    bool is_bipartite() const { return two_coloring().has_value(); }

    void check_vertex(VertexId v) const;
    void check_edge(EdgeId e) const;

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> incident_;
    std::vector<int> pair_class_;
    std::vector<std::vector<EdgeId>> pair_members_;
};

struct Component {
    std::vector<VertexId> vertices;
    EdgeSet edges;
    bool bipartite = true;
};

EdgeSet normalize_edge_set(EdgeSet s);
void check_edge_set(const Multigraph& g, const EdgeSet& s);
std::vector<char> edge_mask(const Multigraph& g, const EdgeSet& s);
EdgeSet mask_to_set(const std::vector<char>& mask);
EdgeSet support(const FractionalPoint& x);

// Throws InputError unless x has one entry per edge, each in [0, 1].
void validate_point(const Multigraph& g, const FractionalPoint& x);

bool is_matching(const Multigraph& g, const EdgeSet& s);

double degree_load(const Multigraph& g, const FractionalPoint& x, VertexId v);
Rational degree_load(const Multigraph& g, const RationalVector& x, VertexId v);

bool in_degree_polytope(const Multigraph& g, const FractionalPoint& x, double b);
bool in_degree_polytope(const Multigraph& g, const RationalVector& x, const Rational& b);

// Degree and odd-set constraints by enumeration; |V| <= 20.
bool in_matching_polytope_exact(const Multigraph& g, const FractionalPoint& x, double b);
bool in_matching_polytope_exact(const Multigraph& g, const RationalVector& x, const Rational& b);

// Connected components of (V, active); isolated vertices are singleton
// bipartite components.
std::vector<Component> bipartite_components(const Multigraph& g, const EdgeSet& active);

// Per-edge flag: edge lies in a bipartite component of (V, active).
// Entries for edges outside active are 0.
std::vector<char> bipartite_component_flags(const Multigraph& g, const std::vector<char>& active);

}  // namespace crs
