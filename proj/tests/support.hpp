#pragma once

// Shared helpers for the statistical tests: sample moments, the
// Kolmogorov-Smirnov distance against an exact CDF, and the chi-square
// survival function for even degrees of freedom.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace support {

inline double sample_mean(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs, double mean) {
    double sum = 0.0;
    for (double x : xs) sum += (x - mean) * (x - mean);
    return sum / static_cast<double>(xs.size());
}

template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double value = cdf(samples[i]);
        worst = std::max(worst, std::abs(value - static_cast<double>(i + 1) / n));
        worst = std::max(worst, std::abs(value - static_cast<double>(i) / n));
    }
    return worst;
}

// P(X > x) for a chi-square variable with even df.
inline double chi_square_survival_even_df(double x, int df) {
    const double half = 0.5 * x;
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < df / 2; ++i) {
        term *= half / i;
        sum += term;
    }
    return std::exp(-half) * sum;
}

// fourth central moment of the two-point mechanism's output at attribute A
inline double duchi_fourth_central(double epsilon, double attribute) {
    const double em1 = std::expm1(epsilon);
    const double atom = (em1 + 2.0) / em1;
    const double positive = em1 / (2.0 * (em1 + 2.0)) * attribute + 0.5;
    const double up = atom - attribute;
    const double down = atom + attribute;
    return positive * up * up * up * up + (1.0 - positive) * down * down * down * down;
}

}  // namespace support
