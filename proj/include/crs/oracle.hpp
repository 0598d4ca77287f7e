#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crs/graph.hpp"
#include "crs/schemes.hpp"

namespace crs {

inline constexpr int kExactSetCap = 12;
inline constexpr int kMonotonicityCap = 10;
// Neglected Poisson mass per edge in exact computations.
inline constexpr double kTruncationTail = 1e-13;

struct BalancednessReport {
    enum class Mode { Exact, MonteCarlo };

    Mode mode = Mode::Exact;
    // Edges of supp(x) that were evaluated, with aligned entries below.
    std::vector<EdgeId> edges;
    std::vector<double> value;
    std::vector<double> std_error;   // zero when exact
    std::vector<double> half_width;  // 99% normal interval; zero when exact
    double minimum = 1.0;
    EdgeId argmin = -1;
    // Certified bound on truncation error of exact Poisson computations.
    double error_bound = 0.0;
    std::int64_t trials = 0;

    double at(EdgeId e) const;
    double std_error_at(EdgeId e) const;
    void finish();
};

// E[y^a] by enumeration over subsampling outcomes and truncated intensities;
// deterministic kinds use their formula. |a| <= 12.
MarginalVector exact_expected_marginals(SchemeKind kind, const Multigraph& g, const FractionalPoint& x,
                                        const EdgeSet& a);
// Exact rational E[y^a] for ex1.4, ex2.2 and ex4.1.
RationalVector exact_expected_marginals_rational(SchemeKind kind, const Multigraph& g, const EdgeSet& a);

// c_e = E[y^{R(x)}_e] / x_e by enumeration of R(x). |supp(x)| <= 12.
BalancednessReport exact_balancedness(SchemeKind kind, const Multigraph& g, const FractionalPoint& x);
// Exact rational c_e (zero off the support) for ex1.4, ex2.2 and ex4.1.
RationalVector exact_balancedness_rational(SchemeKind kind, const Multigraph& g, const RationalVector& x);

struct MonotonicityWitness {
    EdgeSet smaller;
    EdgeSet larger;
    EdgeId edge;
    double smaller_value;
    double larger_value;
};

struct MonotonicityResult {
    bool pass = true;
    std::int64_t checked = 0;
    std::optional<MonotonicityWitness> witness;
};

enum class CheckMode { Exhaustive, Sampled };

using MarginalOracle = std::function<MarginalVector(const EdgeSet&)>;

// Checks E[y^A_e] >= E[y^B_e] for e in A subset of B subset of ground.
// Exhaustive mode needs |ground| <= 10; sampled mode draws random pairs.
MonotonicityResult verify_monotonicity(const MarginalOracle& oracle, const EdgeSet& ground, CheckMode mode,
                                       std::int64_t samples = 0, std::uint64_t seed = 1);
MonotonicityResult verify_monotonicity(SchemeKind kind, const Multigraph& g, const FractionalPoint& x,
                                       CheckMode mode, std::int64_t samples = 0, std::uint64_t seed = 1);

struct TruncatedDistribution {
    std::vector<double> p;  // masses at 0..K
    double tail = 0.0;      // neglected mass beyond K

    int support_max() const { return static_cast<int>(p.size()) - 1; }
};

TruncatedDistribution truncated_poisson(double lambda, int k_max);
TruncatedDistribution point_mass(int value, int k_max);

struct DominanceResult {
    bool pass = true;
    int worst_k = 0;
    // min over k of Pr[max(Y+P, Z+Q) >= k] - Pr[X + max(P,Q) >= k]
    double worst_margin = 0.0;
};

enum class DominanceDirection { Forward, Reversed };

// Exact check that max(Y+P, Z+Q) stochastically dominates X + max(P,Q) with
// X, Y, Z iid. All three inputs must share the truncation point. Reversed
// asks for the opposite inequality.
DominanceResult check_stochastic_dominance(const TruncatedDistribution& p, const TruncatedDistribution& q,
                                           const TruncatedDistribution& xyz,
                                           DominanceDirection direction = DominanceDirection::Forward);

template <class T>
struct SplitResult {
    Multigraph graph;
    std::vector<T> x;
    // The original edge first, then the new parallel copies.
    std::vector<EdgeId> siblings;
};

SplitResult<double> split_edge(const Multigraph& g, const FractionalPoint& x, EdgeId e, int k);
SplitResult<Rational> split_edge(const Multigraph& g, const RationalVector& x, EdgeId e, int k);

struct SiblingPattern {
    std::uint32_t mask;  // bit i set: sibling i is in D
    Rational probability;
};

// The lift law over nonempty sibling sets J:
// Pr[D = J] = (1/x_e) (x_e/k)^{|J|} (1 - x_e/k)^{k-|J|}.
std::vector<SiblingPattern> sibling_lift_law(const Rational& x_e, int k);

// Replaces e in a by a random nonempty subset of its siblings. The stated law
// carries total mass (1 - (1 - x_e/k)^k) / x_e, below 1 for k >= 2, so the
// draw follows the law renormalized to a distribution.
EdgeSet sibling_lift(const EdgeSet& a, const std::vector<EdgeId>& siblings, double x_e, RngStream& r);

struct Partition {
    std::vector<VertexId> near_u;
    std::vector<VertexId> near_v;
};

// Decreasing-load greedy split of V - {u, v} for an edge e = {u, v} whose
// endpoints carry load >= 0.99 outside E_uv and x(E_uv) <= 0.01.
Partition greedy_partition(const Multigraph& g, const FractionalPoint& x, EdgeId e);

struct PathEventEstimate {
    std::int64_t trials = 0;
    std::int64_t count_path = 0;   // event C
    std::int64_t count_strong = 0; // event D
    double frequency_path() const { return trials ? double(count_path) / trials : 0.0; }
    double frequency_strong() const { return trials ? double(count_strong) / trials : 0.0; }
    double std_error_path() const;
    double std_error_strong() const;
};

// Conditioned on e in R(x), with Poisson intensities for the other edges:
// C is "e survives, its component in supp(q) is a three-edge path with e in
// the middle, all three intensities equal 1"; D is the stronger event built on
// the greedy partition.
PathEventEstimate path_event_probability(const Multigraph& g, const FractionalPoint& x, EdgeId e,
                                         std::int64_t trials, std::uint64_t seed, int jobs = 1);

}  // namespace crs
