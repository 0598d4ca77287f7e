#pragma once

#include <cmath>
#include <cstdint>

namespace crs {

// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct MeanAccumulator {
    std::int64_t n = 0;
    double sum = 0;
    double sum_sq = 0;

    void add(double v) {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const MeanAccumulator& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        double v = (sum_sq - n * m * m) / (n - 1);
        return v > 0 ? v : 0.0;
    }
    double stderr_of_mean() const { return n ? std::sqrt(variance() / n) : 0.0; }
};

}  // namespace crs
