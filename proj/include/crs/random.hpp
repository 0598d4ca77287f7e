#pragma once

#include <cstdint>
#include <limits>
#include <variant>

#include "crs/graph.hpp"

namespace crs {

std::uint64_t mix64(std::uint64_t z);
std::uint64_t stream_key(std::uint64_t a, std::uint64_t b);

// Splitmix64 sequence started at a hash of (seed, stream-id). Cheap to
// construct, so one stream per (trial, edge) costs nothing to set up.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    // [0, 1) with 53 random bits.
    double uniform();
    // (0, 1].
    double uniform_open();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
};

// Stream for a (trial, slot) pair; slots are edge ids, then |E| + vertex id.
inline RngStream trial_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t slot) {
    return RngStream(seed, stream_key(trial, slot));
}

struct Bernoulli { double p; };
struct Binomial { int n; double p; };
struct Poisson { double lambda; };
struct PoissonGeq1 { double lambda; };
struct Exponential { double rate; };

using Distribution = std::variant<Bernoulli, Binomial, Poisson, PoissonGeq1, Exponential>;

void validate(const Distribution& d);
double draw(const Distribution& d, RngStream& r);

bool draw_bernoulli(double p, RngStream& r);
int draw_binomial(int n, double p, RngStream& r);
int draw_poisson(double lambda, RngStream& r);
int draw_poisson_geq1(double lambda, RngStream& r);
double draw_exponential(double rate, RngStream& r);

// (1 - e^{-x}) / x, with a series below 1e-5.
double subsample_keep_probability(double x);

EdgeSet independent_round(const FractionalPoint& x, RngStream& r);
EdgeSet subsample(const EdgeSet& a, const FractionalPoint& x, RngStream& r);

}  // namespace crs
