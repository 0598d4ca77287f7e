#include "crs/random.hpp"

#include <cmath>
#include <string>

namespace crs {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr double kTailCutoff = 1e-15;
constexpr double kMaxLambda = 700.0;

void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda) || lambda > kMaxLambda) {
        throw ParameterError("Poisson parameter must lie in [0, 700], got " + std::to_string(lambda));
    }
}

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("probability outside [0,1]: " + std::to_string(p));
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a + kGolden) ^ (b + 0x632be59bd9b4e019ULL));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), state_(mix64(seed ^ mix64(stream_id ^ 0xd1b54a32d192ed03ULL))) {}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw ParameterError("below(0)");
    // Lemire's multiply-shift with rejection of the biased low region.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < n) {
        std::uint64_t t = (0 - n) % n;
        while (low < t) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

void validate(const Distribution& d) {
    std::visit(
        [](const auto& dist) {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                check_probability(dist.p);
            } else if constexpr (std::is_same_v<T, Binomial>) {
                if (dist.n < 0) throw ParameterError("Binomial n must be nonnegative");
                check_probability(dist.p);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                check_lambda(dist.lambda);
            } else if constexpr (std::is_same_v<T, PoissonGeq1>) {
                check_lambda(dist.lambda);
                if (dist.lambda == 0.0) throw ParameterError("PoissonGeq1 needs a positive parameter");
            } else {
                if (!(dist.rate >= 0.0)) throw ParameterError("Exponential rate must be nonnegative");
            }
        },
        d);
}

double draw(const Distribution& d, RngStream& r) {
    return std::visit(
        [&r](const auto& dist) -> double {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return draw_bernoulli(dist.p, r) ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Binomial>) {
                return draw_binomial(dist.n, dist.p, r);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return draw_poisson(dist.lambda, r);
            } else if constexpr (std::is_same_v<T, PoissonGeq1>) {
                return draw_poisson_geq1(dist.lambda, r);
            } else {
                return draw_exponential(dist.rate, r);
            }
        },
        d);
}

bool draw_bernoulli(double p, RngStream& r) {
    check_probability(p);
    return r.uniform() < p;
}

int draw_binomial(int n, double p, RngStream& r) {
    if (n < 0) throw ParameterError("Binomial n must be nonnegative");
    check_probability(p);
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - draw_binomial(n, 1.0 - p, r);
    const double log_p0 = n * std::log1p(-p);
    if (log_p0 < -kMaxLambda) throw ParameterError("Binomial mean too large for inversion");
    const double ratio = p / (1.0 - p);
    double prob = std::exp(log_p0);
    double cdf = prob;
    const double u = r.uniform();
    int k = 0;
    while (u >= cdf && k < n) {
        prob *= ratio * (n - k) / (k + 1);
        ++k;
        cdf += prob;
        if (1.0 - cdf < kTailCutoff && k > n * p) break;
    }
    return k;
}

int draw_poisson(double lambda, RngStream& r) {
    check_lambda(lambda);
    if (lambda == 0.0) return 0;
    double prob = std::exp(-lambda);
    double cdf = prob;
    const double u = r.uniform();
    int k = 0;
    while (u >= cdf) {
        ++k;
        prob *= lambda / k;
        cdf += prob;
        if (1.0 - cdf < kTailCutoff && k > lambda) break;
    }
    return k;
}

int draw_poisson_geq1(double lambda, RngStream& r) {
    check_lambda(lambda);
    if (lambda == 0.0) throw ParameterError("PoissonGeq1 needs a positive parameter");
    // Renormalized pmf: lambda^k / k! / (e^lambda - 1) for k >= 1.
    double prob = lambda / std::expm1(lambda);
    double cdf = prob;
    const double u = r.uniform();
    int k = 1;
    while (u >= cdf) {
        ++k;
        prob *= lambda / k;
        cdf += prob;
        if (1.0 - cdf < kTailCutoff && k > lambda) break;
    }
    return k;
}

double draw_exponential(double rate, RngStream& r) {
    if (!(rate >= 0.0)) throw ParameterError("Exponential rate must be nonnegative");
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(r.uniform_open()) / rate;
}

double subsample_keep_probability(double x) {
    if (!(x > 0.0 && x <= 1.0)) {
        throw InputError("subsampling needs 0 < x_e <= 1, got " + std::to_string(x));
    }
    if (x < 1e-5) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return -std::expm1(-x) / x;
}

EdgeSet independent_round(const FractionalPoint& x, RngStream& r) {
    EdgeSet out;
    for (EdgeId e = 0; e < static_cast<EdgeId>(x.size()); ++e) {
        check_probability(x[e]);
        if (r.uniform() < x[e]) out.push_back(e);
    }
    return out;
}

EdgeSet subsample(const EdgeSet& a, const FractionalPoint& x, RngStream& r) {
    EdgeSet out;
    for (EdgeId e : a) {
        if (e < 0 || e >= static_cast<EdgeId>(x.size())) throw InputError("unknown edge-id " + std::to_string(e));
        if (x[e] == 0.0) throw InputError("edge " + std::to_string(e) + " is not in supp(x)");
        if (r.uniform() < subsample_keep_probability(x[e])) out.push_back(e);
    }
    return out;
}

}  // namespace crs
