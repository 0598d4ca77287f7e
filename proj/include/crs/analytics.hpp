#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crs/graph.hpp"
#include "crs/oracle.hpp"
#include "crs/schemes.hpp"

namespace crs {

// E[1 / (1 + max(P1, P2))] for iid P1, P2 ~ Poisson(b).
double beta(double b);
// (1 - e^{-2b}) / (2b), equal to 1 at b = 0.
double gamma(double b);
// E[1 / (1 + Poisson(2b))] by summing the series.
double gamma_series(double b);

struct KnnSpec {
    int n;
    double b;
};
struct HeavyStarSpec {
    double eps;
    int k;
};
struct Path3Spec {
    double eps;
};
struct RandomBipartiteSpec {
    int n;
    double density;
    double b;
    std::uint64_t seed;
};
struct RandomGeneralSpec {
    int n;
    double density;
    double b;
    std::uint64_t seed;
};
struct FileSpec {
    std::string path;
};

using InstanceSpec = std::variant<KnnSpec, HeavyStarSpec, Path3Spec, RandomBipartiteSpec, RandomGeneralSpec, FileSpec>;

// Grammar: knn:n,b  fig5:eps,k  path3:eps  randbip:n,density,b,seed
// randgen:n,density,b,seed  file:PATH
InstanceSpec parse_instance_spec(const std::string& text);
std::string instance_spec_string(const InstanceSpec& spec);

struct Instance {
    Multigraph graph;
    FractionalPoint x;
    // Exact values when every entry comes from decimal parameters.
    std::optional<RationalVector> exact_x;
    std::optional<std::vector<int>> bipartition;
    std::string name;
    // The edge the construction is about (middle path edge, star edge e), or -1.
    EdgeId focus = -1;
};

Instance generate_instance(const InstanceSpec& spec);

struct EstimateOptions {
    std::int64_t trials = 1000000;
    std::uint64_t seed = 1;
    int jobs = 1;
    // Restrict the report to these edges of supp(x); empty means all of them.
    EdgeSet edges;
};

inline constexpr std::int64_t kMinEstimateTrials = 1000;

// Monte Carlo c_e with 99% normal intervals. Each trial draws R(x) and all
// scheme randomness once; for every reported edge e the scheme is then
// evaluated on R(x) + e, which has the law of R(x) given e in R(x). Averaging
// y_e over trials therefore estimates E[y_e | e in R(x)] = c_e directly.
BalancednessReport estimate_balancedness(SchemeKind kind, const Instance& inst, const EstimateOptions& opt);

// E[1 / (1 + max(B1, B2))] with B1, B2 iid Binomial(n - 1, b / n).
double optimality_limit_exact(int n, double b);
struct LimitResult {
    double value;
    double std_error;  // zero in exact mode
    bool exact;
    std::int64_t trials;
};
// Exact for n <= 12, Monte Carlo otherwise.
LimitResult optimality_limit(int n, double b, std::int64_t trials, std::uint64_t seed, int jobs = 1);

}  // namespace crs
