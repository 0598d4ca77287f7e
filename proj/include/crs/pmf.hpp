#pragma once

#include <vector>

namespace crs {

// Probability masses at 0..K, with K the first index whose neglected upper
// tail is below tail_bound. The neglected mass is written to *tail when given.
std::vector<double> poisson_pmf(double lambda, double tail_bound, double* tail = nullptr);
// Poisson(lambda) conditioned on being at least 1; entry 0 is zero.
std::vector<double> poisson_geq1_pmf(double lambda, double tail_bound, double* tail = nullptr);
// Full Binomial(n, p) pmf.
std::vector<double> binomial_pmf(int n, double p);

// Distribution of the sum of independent variables given by pmfs.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);
// Distribution of the maximum of two independent variables.
std::vector<double> max_of(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace crs
