#pragma once

// Samplers and exact densities for the Laplace, Duchi and PTT mechanisms,
// the pointwise privacy-ratio audit, and the one-attribute-per-report
// wrapper for multidimensional tuples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "ptt/core.hpp"
#include "ptt/random.hpp"

namespace ptt {

struct LaplaceMechanism {
    double epsilon;
    double scale;  // 2 / epsilon
};

struct DuchiMechanism {
    double epsilon;
    double atom;  // (e^eps + 1) / (e^eps - 1); outputs are exactly +-atom
};

struct PttMechanism {
    PttParams params;
};

using MechanismKind = std::variant<LaplaceMechanism, DuchiMechanism, PttMechanism>;

inline MechanismKind make_laplace(PrivacyBudget epsilon) {
    return LaplaceMechanism{epsilon.value(), 2.0 / epsilon.value()};
}

inline MechanismKind make_duchi(PrivacyBudget epsilon) {
    const double em1 = std::expm1(epsilon.value());
    return DuchiMechanism{epsilon.value(), (em1 + 2.0) / em1};
}

inline MechanismKind make_ptt(const PttParams& params) {
    if (params.analysis_only)
        throw parameter_error("analysis-only PTT parameters cannot back a mechanism");
    ValidationReport report = validate_params(params);
    if (!report.passed())
        throw parameter_error("invalid PTT parameters:\n" + report.summary());
    return PttMechanism{params};
}

inline double mechanism_epsilon(const MechanismKind& mech) {
    return std::visit(
        [](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PttMechanism>)
                return m.params.epsilon;
            else
                return m.epsilon;
        },
        mech);
}

inline std::string mechanism_label(const MechanismKind& mech) {
    if (std::holds_alternative<LaplaceMechanism>(mech)) return "laplace";
    if (std::holds_alternative<DuchiMechanism>(mech)) return "duchi";
    const auto& prm = std::get<PttMechanism>(mech).params;
    return std::string("ptt-") + std::string(family_name(prm.family));
}

// ---------------------------------------------------------------------------
// Draw mappings (one uniform in, one value out). Exposed so tests can pin the
// inverse-CDF behaviour without touching an engine.
// ---------------------------------------------------------------------------

// Laplace(0, scale) by inverting the CDF; u = 1/2 maps to exactly 0. The
// argument of the log is floored at the smallest normal double so the output
// stays finite even at u = 0.
inline double laplace_noise_from_uniform(double u, double scale) {
    const double d = u - 0.5;
    const double t = std::max(1.0 - 2.0 * std::abs(d), std::numeric_limits<double>::min());
    const double magnitude = -scale * std::log(t);
    return d < 0.0 ? -magnitude : magnitude;
}

namespace detail {

// In-band offset s in [-a, a] from the band center, given band mass m in
// [0, q]. TypeI is the plain uniform inverse; TypeII inverts the piecewise
// quadratic CDF of the tent density p - (p/a)((e^eps-1)/e^eps)|s|. The left
// half is solved in a cancellation-free rational form and the right half is
// its mirror image.
inline double band_offset_from_mass(double m, const PttParams& prm) {
    if (prm.family == PttFamily::TypeI) return -prm.a + 2.0 * prm.a * (m / prm.q);
    const double ee = std::exp(prm.epsilon);
    const double c = (prm.p / prm.a) * (std::expm1(prm.epsilon) / ee);  // tent slope
    const double half = 0.5 * prm.q;
    const double mm = m <= half ? m : prm.q - m;
    const double edge = prm.p - c * prm.a;  // density at the band edge, p / e^eps
    const double s =
        (2.0 * mm - 2.0 * prm.p * prm.a + c * prm.a * prm.a) /
        (prm.p + std::sqrt(edge * edge + 2.0 * c * mm));
    return m <= half ? s : -s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Samplers. Each consumes a deterministic number of uniforms per call.
// ---------------------------------------------------------------------------

inline double laplace_perturb(UnitValue attribute, PrivacyBudget epsilon, RandomSource& rng) {
    return attribute.value() + laplace_noise_from_uniform(rng.next_unit(), 2.0 / epsilon.value());
}

inline double duchi_positive_probability(UnitValue attribute, PrivacyBudget epsilon) {
    const double em1 = std::expm1(epsilon.value());
    return em1 / (2.0 * (em1 + 2.0)) * attribute.value() + 0.5;
}

inline double duchi_perturb(UnitValue attribute, PrivacyBudget epsilon, RandomSource& rng) {
    const double em1 = std::expm1(epsilon.value());
    const double atom = (em1 + 2.0) / em1;
    return rng.next_unit() < duchi_positive_probability(attribute, epsilon) ? atom : -atom;
}

// With probability q sample inside the band [kA - a, kA + a] (uniformly for
// TypeI, from the tent profile for TypeII); otherwise land uniformly in the
// complement [-B, kA - a] u [kA + a, B], choosing the side in proportion to
// its length so a zero-length side (A = +-1) needs no special case.
inline double ptt_perturb(UnitValue attribute, const PttParams& prm, RandomSource& rng) {
    if (prm.analysis_only)
        throw parameter_error("analysis-only PTT parameters cannot be sampled");
    const double center = prm.k * attribute.value();
    const double omega = rng.next_unit();
    double y;
    if (omega < prm.q) {
        y = center + detail::band_offset_from_mass(rng.next_unit() * prm.q, prm);
    } else {
        const double left = (center - prm.a) + prm.B;
        const double right = prm.B - (center + prm.a);
        const double v = rng.next_unit() * (left + right);
        y = v < left ? -prm.B + v : (center + prm.a) + (v - left);
    }
    return std::clamp(y, -prm.B, prm.B);
}

inline double perturb(UnitValue attribute, const MechanismKind& mech, RandomSource& rng) {
    if (const auto* lap = std::get_if<LaplaceMechanism>(&mech))
        return attribute.value() + laplace_noise_from_uniform(rng.next_unit(), lap->scale);
    if (const auto* duchi = std::get_if<DuchiMechanism>(&mech))
        return rng.next_unit() <
                       duchi_positive_probability(attribute, PrivacyBudget(duchi->epsilon))
                   ? duchi->atom
                   : -duchi->atom;
    return ptt_perturb(attribute, std::get<PttMechanism>(mech).params, rng);
}

// ---------------------------------------------------------------------------
// Exact densities. Analysis-only parameter bundles are accepted here; the
// audit and the moment oracle need them even when sampling is refused.
// ---------------------------------------------------------------------------

inline double ptt_density(double y, UnitValue attribute, const PttParams& prm) {
    if (y < -prm.B || y > prm.B) return 0.0;
    const double center = prm.k * attribute.value();
    const double off = std::abs(y - center);
    const double out_level = prm.p / std::exp(prm.epsilon);
    if (off > prm.a) return out_level;
    if (prm.family == PttFamily::TypeI) return prm.p;
    const double c = (prm.p / prm.a) * (std::expm1(prm.epsilon) / std::exp(prm.epsilon));
    return prm.p - c * off;  // hits out_level exactly at off = a
}

// Piecewise closed-form integral of ptt_density over (-inf, y].
inline double ptt_cdf(double y, UnitValue attribute, const PttParams& prm) {
    if (y <= -prm.B) return 0.0;
    if (y >= prm.B) return 1.0;
    const double center = prm.k * attribute.value();
    const double lo = center - prm.a;
    const double hi = center + prm.a;
    const double out_level = prm.p / std::exp(prm.epsilon);
    if (y <= lo) return out_level * (y + prm.B);
    const double left_mass = out_level * (lo + prm.B);
    if (y >= hi) return left_mass + prm.q + out_level * (y - hi);
    if (prm.family == PttFamily::TypeI) return left_mass + prm.p * (y - lo);
    const double c = (prm.p / prm.a) * (std::expm1(prm.epsilon) / std::exp(prm.epsilon));
    const double s = y - center;
    if (s <= 0.0)
        return left_mass + prm.p * (y - lo) + 0.5 * c * (s * s - prm.a * prm.a);
    return left_mass + 0.5 * prm.q + prm.p * s - 0.5 * c * s * s;
}

inline double laplace_density(double y, UnitValue attribute, PrivacyBudget epsilon) {
    const double scale = 2.0 / epsilon.value();
    return std::exp(-std::abs(y - attribute.value()) / scale) / (2.0 * scale);
}

// ---------------------------------------------------------------------------
// Privacy-ratio audit: max over input pairs and outputs of the density ratio,
// restricted to points where both densities are positive. For a mechanism
// satisfying the eps guarantee the result never exceeds e^eps, and for PTT it
// attains e^eps exactly.
// ---------------------------------------------------------------------------

struct RatioWitness {
    double input_i = 0.0;
    double input_j = 0.0;
    double output = 0.0;
};

struct AuditReport {
    double max_ratio = 0.0;
    double bound = 0.0;  // e^eps
    RatioWitness witness;
};

namespace detail {

template <typename Density>
AuditReport audit_over_grids(double epsilon, std::span<const double> inputs,
                             std::span<const double> outputs, Density&& density) {
    if (inputs.empty() || outputs.empty())
        throw argument_error("ldp_ratio_audit: input and output grids must be non-empty");
    AuditReport report;
    report.bound = std::exp(epsilon);
    for (double ai : inputs) {
        for (double aj : inputs) {
            for (double y : outputs) {
                const double di = density(y, ai);
                const double dj = density(y, aj);
                if (di <= 0.0 || dj <= 0.0) continue;
                const double ratio = di / dj;
                if (ratio > report.max_ratio) {
                    report.max_ratio = ratio;
                    report.witness = {ai, aj, y};
                }
            }
        }
    }
    return report;
}

}  // namespace detail

// Density route; analysis-only bundles are allowed. The supplied output grid
// is augmented with each input's band center and band edges, where the
// piecewise density attains its extremes, so the reported maximum is the true
// supremum rather than a grid approximation.
inline AuditReport ldp_ratio_audit(const PttParams& prm, std::span<const double> inputs,
                                   std::span<const double> outputs) {
    std::vector<double> candidates(outputs.begin(), outputs.end());
    for (double ai : inputs) {
        const double center = prm.k * ai;
        for (double y : {center, center - prm.a, center + prm.a, -prm.B, prm.B})
            if (y >= -prm.B && y <= prm.B) candidates.push_back(y);
    }
    return detail::audit_over_grids(
        prm.epsilon, inputs, candidates,
        [&prm](double y, double a) { return ptt_density(y, UnitValue(a), prm); });
}

inline AuditReport ldp_ratio_audit(const MechanismKind& mech, std::span<const double> inputs,
                                   std::span<const double> outputs) {
    if (const auto* lap = std::get_if<LaplaceMechanism>(&mech)) {
        const double eps = lap->epsilon;
        return detail::audit_over_grids(eps, inputs, outputs, [eps](double y, double a) {
            return laplace_density(y, UnitValue(a), PrivacyBudget(eps));
        });
    }
    if (const auto* duchi = std::get_if<DuchiMechanism>(&mech)) {
        // outputs are the two atoms regardless of the supplied grid
        const double eps = duchi->epsilon;
        const double atoms[2] = {duchi->atom, -duchi->atom};
        return detail::audit_over_grids(
            eps, inputs, std::span<const double>(atoms, 2), [eps](double y, double a) {
                const double pos = duchi_positive_probability(UnitValue(a), PrivacyBudget(eps));
                return y > 0.0 ? pos : 1.0 - pos;
            });
    }
    return ldp_ratio_audit(std::get<PttMechanism>(mech).params, inputs, outputs);
}

// ---------------------------------------------------------------------------
// Multidimensional wrapper: perturb one uniformly chosen coordinate, scale it
// by d, zero the rest.
// ---------------------------------------------------------------------------

struct NoisyTuple {
    std::vector<double> values;
    std::size_t chosen_index = 0;  // 1-based
};

inline NoisyTuple multidim_perturb(std::span<const double> tuple, const MechanismKind& mech,
                                   RandomSource& rng) {
    if (tuple.empty()) throw argument_error("multidim_perturb: empty tuple");
    const std::size_t d = tuple.size();
    const std::size_t j =
        std::min(d - 1, static_cast<std::size_t>(rng.next_unit() * static_cast<double>(d)));
    NoisyTuple out;
    out.values.assign(d, 0.0);
    out.values[j] = static_cast<double>(d) * perturb(UnitValue(tuple[j]), mech, rng);
    out.chosen_index = j + 1;
    return out;
}

}  // namespace ptt
