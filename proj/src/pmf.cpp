#include "crs/pmf.hpp"

#include <algorithm>
#include <cmath>

#include "crs/errors.hpp"

namespace crs {

std::vector<double> poisson_pmf(double lambda, double tail_bound, double* tail) {
    if (!(lambda >= 0.0) || lambda > 700.0) throw ParameterError("Poisson parameter outside [0, 700]");
    std::vector<double> p{std::exp(-lambda)};
    // Stop once the remaining mass is certified small: past the mode the tail
    // is bounded by the next term times a geometric factor.
    for (int k = 1;; ++k) {
        double next = p.back() * lambda / k;
        double ratio = lambda / (k + 1);
        if (k > lambda && ratio < 1.0 && next / (1.0 - ratio) < tail_bound) {
            if (tail) *tail = std::max(0.0, next / (1.0 - ratio));
            return p;
        }
        p.push_back(next);
    }
}

std::vector<double> poisson_geq1_pmf(double lambda, double tail_bound, double* tail) {
    if (!(lambda > 0.0)) throw ParameterError("PoissonGeq1 needs a positive parameter");
    if (lambda > 700.0) throw ParameterError("Poisson parameter outside [0, 700]");
    std::vector<double> p{0.0, lambda / std::expm1(lambda)};
    for (int k = 2;; ++k) {
        double next = p.back() * lambda / k;
        double ratio = lambda / (k + 1);
        if (k > lambda && ratio < 1.0 && next / (1.0 - ratio) < tail_bound) {
            if (tail) *tail = next / (1.0 - ratio);
            return p;
        }
        p.push_back(next);
    }
}

std::vector<double> binomial_pmf(int n, double p) {
    if (n < 0 || !(p >= 0.0 && p <= 1.0)) throw ParameterError("invalid Binomial parameters");
    std::vector<double> out(n + 1, 0.0);
    if (p == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (p == 1.0) {
        out[n] = 1.0;
        return out;
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (int k = 0; k <= n; ++k) {
        double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        out[k] = std::exp(lc + k * lp + (n - k) * lq);
    }
    return out;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<double> max_of(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::max(a.size(), b.size());
    std::vector<double> out(n, 0.0);
    double ca = 0.0, cb = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ca += k < a.size() ? a[k] : 0.0;
        cb += k < b.size() ? b[k] : 0.0;
        double joint = ca * cb;
        out[k] = joint - prev;
        prev = joint;
    }
    return out;
}

}  // namespace crs
