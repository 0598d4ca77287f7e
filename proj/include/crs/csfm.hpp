#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crs/graph.hpp"
#include "crs/schemes.hpp"

namespace crs {

enum class FunctionKind { Modular, Coverage, Cut };

FunctionKind parse_function_kind(const std::string& name);
std::string function_kind_name(FunctionKind kind);

// Set functions over edge ids.
class SubmodularOracle {
public:
    // f(S) = sum of weights in S; weights must be nonnegative.
    static SubmodularOracle modular(std::vector<double> weights);
    // f(S) = total weight of items covered by the edges of S.
    static SubmodularOracle coverage(std::vector<std::vector<int>> covers, std::vector<double> item_weights);
    // f(S) = total weight of pairs (i, j) with exactly one of i, j in S.
    struct WeightedPair {
        EdgeId i;
        EdgeId j;
        double w;
    };
    static SubmodularOracle cut(int ground_size, std::vector<WeightedPair> pairs);

    // Seeded random instance of the given kind over `ground_size` elements.
    static SubmodularOracle random(FunctionKind kind, int ground_size, std::uint64_t seed);

    FunctionKind kind() const { return kind_; }
    int ground_size() const { return ground_size_; }
    bool monotone() const { return kind_ != FunctionKind::Cut; }
    double evaluate(const EdgeSet& s) const;
    // Same, with membership given as a per-element flag vector.
    double evaluate_mask(const std::vector<char>& in) const;

private:
    FunctionKind kind_ = FunctionKind::Modular;
    int ground_size_ = 0;
    std::vector<double> weights_;
    std::vector<std::vector<int>> covers_;
    std::vector<double> item_weights_;
    std::vector<WeightedPair> pairs_;
};

struct SubmodularityCheck {
    bool submodular = true;
    bool monotone = true;
    std::int64_t checked = 0;
};

// Exhaustive check over all S subset of T and e outside T; ground size <= 10.
SubmodularityCheck check_submodular(const SubmodularOracle& f);

struct MultilinearEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

MultilinearEstimate multilinear_estimate(const SubmodularOracle& f, const FractionalPoint& x, std::int64_t samples,
                                         std::uint64_t seed, int jobs = 1);
// Exact F_ML by enumeration; ground size <= 20.
double multilinear_exact(const SubmodularOracle& f, const FractionalPoint& x);

inline constexpr int kBruteForceMatchingEdges = 16;

// Bipartite graphs use the Hungarian method; general graphs need |E| <= 16.
Matching max_weight_matching(const Multigraph& g, const std::vector<double>& w);

// Increments of b/steps along max-weight matchings for sampled marginal gains,
// so the result is b times an average of matchings.
FractionalPoint continuous_greedy(const SubmodularOracle& f, const Multigraph& g, double b, int steps,
                                  std::int64_t samples, std::uint64_t seed);

struct RoundingResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

// Mean of f(resolve(kind, R(x))) over independent trials.
RoundingResult round_and_evaluate(const SubmodularOracle& f, const Multigraph& g, const FractionalPoint& x,
                                  SchemeKind kind, std::int64_t trials, std::uint64_t seed, int jobs = 1);

}  // namespace crs
