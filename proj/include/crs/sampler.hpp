#pragma once

#include <vector>

#include "crs/graph.hpp"
#include "crs/random.hpp"
#include "crs/schemes.hpp"

namespace crs {

struct WeightedMatching {
    Rational weight;
    Matching matching;
};

struct ConvexCombination {
    std::vector<WeightedMatching> terms;

    Rational total_weight() const;
    RationalVector reconstruct(int edge_count) const;
};

// Exact decomposition of a point of the bipartite matching polytope into
// matchings inside supp(y). Each round finds a matching covering every tight
// vertex (as a perfect matching of the slack-padded support graph) and peels
// it with the largest weight that keeps the rest feasible, so at most
// |supp(y)| + 1 terms come out.
ConvexCombination birkhoff_decompose(const Multigraph& g, const RationalVector& y);
// Floating input is read as the shortest round-tripping decimals. Loads above
// 1 by at most 1e-9 are scaled back onto the polytope first.
ConvexCombination birkhoff_decompose(const Multigraph& g, const MarginalVector& y);

// Same peeling for small general graphs, with odd-set constraints found by
// enumeration. Used by the 2/3-scaled reference scheme on odd components.
ConvexCombination matching_polytope_decompose(const Multigraph& g, const RationalVector& y);

// Matching of weighted pick: the term whose cumulative weight first exceeds u.
const Matching& pick(const ConvexCombination& c, double u);

// Edge e is kept iff (t_e, e) is lexicographically smallest among the edges
// sharing an endpoint with it. Infinite times are never kept.
Matching clock_matching(const Multigraph& g, const std::vector<double>& times);
Matching exp_clock_matching(const Multigraph& g, const std::vector<double>& w, RngStream& r);
// Edges of a that come first, in a uniform order of a, among their neighbours in a.
Matching random_order_matching(const Multigraph& g, const EdgeSet& a, RngStream& r);

// A random matching inside a whose marginals are the scheme's conditional
// marginal vector for this draw.
Matching resolve(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r);

struct SchemeContext {
    SchemeKind kind;
    const Multigraph* graph;
};

// Every context shares the edge-id space of x. With coupled set, every scheme
// runs on the same derived stream; otherwise each gets its own.
Matching intersect_schemes(const std::vector<SchemeContext>& schemes, const FractionalPoint& x, const EdgeSet& a,
                           RngStream& r, bool coupled = false);

}  // namespace crs
