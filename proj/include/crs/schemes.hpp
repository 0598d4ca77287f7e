#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crs/graph.hpp"
#include "crs/random.hpp"

namespace crs {

enum class SchemeKind {
    RefIsolated,          // ex1.4
    BipSimple,            // ex2.2
    BipPoisson,           // alg1
    BipPoissonMerged,     // alg2
    GenRandomOrder,       // ex4.1
    GenPoisson,           // alg3
    GenPoissonMerged,     // alg4
    Mixed,                // alg5
    MixedMerged,          // alg6
    RefBipartition,       // ref-bipartition
    RefScaledTwoThirds,   // ref-2of3
};

// How Poisson intensities turn into marginals.
enum class Formula { Max, Sum, Mixed };

SchemeKind parse_scheme(std::string_view name);
std::string scheme_name(SchemeKind kind);
const std::vector<SchemeKind>& all_schemes();

bool requires_bipartite(SchemeKind kind);
bool is_merged(SchemeKind kind);
// alg2 -> alg1, alg4 -> alg3, alg6 -> alg5; identity otherwise.
SchemeKind base_kind(SchemeKind kind);
// Marginals are a deterministic function of the input set.
bool is_deterministic(SchemeKind kind);
// Formula used on intensities; nullopt for kinds without intensities.
std::optional<Formula> intensity_formula(SchemeKind kind);

using IntensityVector = std::vector<int>;

// Throws unless x is a valid point, a is a subset of supp(x), and the graph
// class suits the kind.
void check_scheme_input(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a);

MarginalVector intensity_marginals(Formula f, const Multigraph& g, const IntensityVector& q);
RationalVector intensity_marginals_exact(Formula f, const Multigraph& g, const IntensityVector& q);

// Subsample a, then PoissonGeq1(x_e) on the survivors; zero elsewhere.
IntensityVector draw_intensity(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r);
// Poisson(x_e) on every edge.
IntensityVector draw_merged_intensity(const Multigraph& g, const FractionalPoint& x, RngStream& r);

MarginalVector bip_simple_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a);
RationalVector bip_simple_marginals_exact(const Multigraph& g, const EdgeSet& a);
MarginalVector bip_poisson_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r);
MarginalVector gen_random_order_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a);
RationalVector gen_random_order_marginals_exact(const Multigraph& g, const EdgeSet& a);
MarginalVector gen_poisson_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r);
MarginalVector mixed_marginals(const Multigraph& g, const FractionalPoint& x, const EdgeSet& a, RngStream& r);

// Algorithms 2, 4, 6: the rounding and the scheme in one pass.
MarginalVector merged_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, RngStream& r);

// Vertex sides for the random-bipartition reference scheme and the crossing
// part of a.
EdgeSet crossing_subset(const Multigraph& g, const EdgeSet& a, RngStream& r);
// Survivors of the fair coin that have no surviving neighbour in a.
EdgeSet isolated_survivors(const Multigraph& g, const EdgeSet& a, RngStream& r);

MarginalVector reference_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a,
                                   RngStream& r);

// One draw of the conditional marginal y^a for any kind. Merged kinds run
// their two-stage counterpart on a. Asserts supp(y) is inside a.
MarginalVector scheme_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, const EdgeSet& a,
                                RngStream& r);

// One draw of y^{R(x)}; merged kinds draw Poisson intensities directly.
MarginalVector rounded_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x, RngStream& r);

}  // namespace crs
