#pragma once

// Mean estimation from noisy reports and the error-scaling experiment
// harness. Every trial owns a child random stream keyed by (n index, trial
// index), so tables are reproducible under partial re-runs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ptt/analysis.hpp"
#include "ptt/core.hpp"
#include "ptt/mechanisms.hpp"
#include "ptt/random.hpp"

namespace ptt {

inline double estimate_mean(std::span<const double> noisy) {
    if (noisy.empty()) throw argument_error("estimate_mean: empty sequence");
    double sum = 0.0;
    for (double v : noisy) sum += v;
    return sum / static_cast<double>(noisy.size());
}

// Coordinate-wise mean of sparse noisy tuples. Each report carries one
// d-scaled coordinate chosen with probability 1/d, so the plain average is
// unbiased for the per-coordinate means.
inline std::vector<double> estimate_means_multidim(std::span<const NoisyTuple> tuples,
                                                   std::size_t dimension) {
    if (tuples.empty()) throw argument_error("estimate_means_multidim: empty sequence");
    std::vector<double> sums(dimension, 0.0);
    for (const auto& tuple : tuples) {
        if (tuple.values.size() != dimension)
            throw argument_error("estimate_means_multidim: tuple of dimension " +
                                 std::to_string(tuple.values.size()) + ", expected " +
                                 std::to_string(dimension));
        for (std::size_t j = 0; j < dimension; ++j) sums[j] += tuple.values[j];
    }
    for (double& s : sums) s /= static_cast<double>(tuples.size());
    return sums;
}

// Everywhere-valid bound m on |report - attribute|: support half-width plus
// one. Laplace noise is unbounded, so its m is infinite.
inline double report_bound(const MechanismKind& mech) {
    if (std::holds_alternative<LaplaceMechanism>(mech))
        return std::numeric_limits<double>::infinity();
    if (const auto* duchi = std::get_if<DuchiMechanism>(&mech)) return duchi->atom + 1.0;
    return std::get<PttMechanism>(mech).params.B + 1.0;
}

enum class ValueDistribution { Constant, Uniform, TwoPoint };

inline std::string_view distribution_name(ValueDistribution dist) {
    switch (dist) {
        case ValueDistribution::Constant: return "constant";
        case ValueDistribution::Uniform: return "uniform";
        default: return "two-point";
    }
}

struct ExperimentConfig {
    std::vector<std::size_t> sample_sizes;
    std::size_t dimension = 1;
    MechanismKind mechanism;
    std::size_t trials = 50;
    double beta = 0.05;  // the table records the empirical (1-beta) error quantile
    ValueDistribution distribution = ValueDistribution::Uniform;
    double distribution_value = 0.5;  // the c of constant(c) and two-point(+-c)
    std::uint64_t master_seed = 0;
};

struct ErrorRow {
    std::size_t n = 0;
    std::size_t d = 1;
    double epsilon = 0.0;
    std::string mechanism;
    double mean_abs_err = 0.0;
    double max_err = 0.0;
    double quantile_err = 0.0;
    double beta = 0.0;
    std::size_t trials = 0;
    double m_bound = 0.0;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;
};

namespace detail {

inline double draw_true_value(ValueDistribution dist, double c, RandomSource& rng) {
    switch (dist) {
        case ValueDistribution::Constant: return c;
        case ValueDistribution::Uniform: return 2.0 * rng.next_unit() - 1.0;
        default: return rng.next_unit() < 0.5 ? -c : c;
    }
}

// |estimate - true sample mean| for one simulated collection round.
inline double run_trial(const ExperimentConfig& config, std::size_t n, RandomSource rng) {
    const std::size_t d = config.dimension;
    if (d == 1) {
        double true_sum = 0.0;
        double noisy_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double value =
                draw_true_value(config.distribution, config.distribution_value, rng);
            true_sum += value;
            noisy_sum += perturb(UnitValue(value), config.mechanism, rng);
        }
        return std::abs(noisy_sum - true_sum) / static_cast<double>(n);
    }
    std::vector<double> tuple(d), true_sums(d, 0.0), noisy_sums(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            tuple[j] = draw_true_value(config.distribution, config.distribution_value, rng);
            true_sums[j] += tuple[j];
        }
        const NoisyTuple report = multidim_perturb(tuple, config.mechanism, rng);
        noisy_sums[report.chosen_index - 1] += report.values[report.chosen_index - 1];
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        worst = std::max(worst, std::abs(noisy_sums[j] - true_sums[j]) /
                                    static_cast<double>(n));
    return worst;
}

}  // namespace detail

inline ErrorTable run_scaling_experiment(const ExperimentConfig& config) {
    if (config.sample_sizes.empty())
        throw argument_error("experiment needs at least one sample size");
    for (std::size_t n : config.sample_sizes)
        if (n == 0) throw argument_error("sample sizes must be positive");
    if (config.trials == 0) throw argument_error("trials must be positive");
    if (config.dimension == 0) throw argument_error("dimension must be positive");
    if (!(config.beta > 0.0 && config.beta < 1.0))
        throw argument_error("beta must lie in (0, 1)");

    const RandomSource master(config.master_seed);
    const double m_bound = report_bound(config.mechanism);
    const std::string label = mechanism_label(config.mechanism);
    const double epsilon = mechanism_epsilon(config.mechanism);

    ErrorTable table;
    table.rows.reserve(config.sample_sizes.size());
    for (std::size_t size_index = 0; size_index < config.sample_sizes.size(); ++size_index) {
        const std::size_t n = config.sample_sizes[size_index];
        const RandomSource per_size = master.child(size_index);
        std::vector<double> errors(config.trials);
        for (std::size_t trial = 0; trial < config.trials; ++trial)
            errors[trial] = detail::run_trial(config, n, per_size.child(trial));

        ErrorRow row;
        row.n = n;
        row.d = config.dimension;
        row.epsilon = epsilon;
        row.mechanism = label;
        row.trials = config.trials;
        row.beta = config.beta;
        row.m_bound = m_bound;
        double sum = 0.0;
        for (double e : errors) {
            sum += e;
            row.max_err = std::max(row.max_err, e);
        }
        row.mean_abs_err = sum / static_cast<double>(config.trials);
        std::sort(errors.begin(), errors.end());
        const auto rank = static_cast<std::size_t>(
            std::ceil((1.0 - config.beta) * static_cast<double>(config.trials)));
        row.quantile_err = errors[std::clamp<std::size_t>(rank, 1, config.trials) - 1];
        table.rows.push_back(std::move(row));
    }
    return table;
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least squares of log(mean abs error) on log(n); a slope near -1/2 is the
// root-n rate the estimators are expected to follow.
inline SlopeFit fit_error_slope(const ErrorTable& table) {
    std::vector<std::pair<double, double>> points;
    for (const auto& row : table.rows)
        points.emplace_back(std::log(static_cast<double>(row.n)), std::log(row.mean_abs_err));
    std::vector<double> distinct;
    for (const auto& [x, y] : points)
        if (std::find(distinct.begin(), distinct.end(), x) == distinct.end())
            distinct.push_back(x);
    if (distinct.size() < 3)
        throw argument_error("slope fit needs at least 3 distinct sample sizes");

    const double count = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace ptt
