#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crs/analytics.hpp"

namespace crs {

struct CheckRecord {
    std::string check;
    std::string scheme;  // empty for instance-level checks
    bool pass;
    std::string detail;
};

struct VerifyOptions {
    int max_edges = 8;           // exact-vs-Monte-Carlo comparisons up to this support size
    std::int64_t trials = 200000;
    std::int64_t draws = 2000;   // per-draw contract checks
    std::uint64_t seed = 1;
    int jobs = 1;
};

// Invariant battery on one instance: polytope membership, per-draw CR1/CR2 and
// matching contracts, exact against Monte Carlo balancedness, monotonicity and
// the 1/3 floor of ex2.2. Schemes that do not apply to the graph are skipped.
std::vector<CheckRecord> verify_instance(const Instance& inst, const VerifyOptions& opt);

}  // namespace crs
