#pragma once

// Closed-form moments, the exact piecewise-integration oracle, mechanism
// comparisons, root finding for the Laplace/Duchi crossover, optimal-eta
// machinery, the eta feasibility scan for the worst-case comparison, and the
// variance lower-bound curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptt/core.hpp"
#include "ptt/mechanisms.hpp"

namespace ptt {

// One row of any sweep the CLI emits.
struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    std::string series;
};

// ---------------------------------------------------------------------------
// Per-report variance of one noisy value given the true attribute.
// ---------------------------------------------------------------------------

inline double laplace_variance(double epsilon) { return 8.0 / (epsilon * epsilon); }

inline double duchi_variance(double epsilon, double attribute) {
    const double em1 = std::expm1(epsilon);
    const double atom = (em1 + 2.0) / em1;
    return atom * atom - attribute * attribute;
}

// Accepts analysis-only bundles.
inline double ptt_variance_analytic(const PttParams& prm, UnitValue attribute) {
    const double em1 = std::expm1(prm.epsilon);
    const double eta3 = prm.eta * prm.eta * prm.eta;
    const double attr2 = attribute.value() * attribute.value();
    if (prm.family == PttFamily::TypeI)
        return (prm.k - 1.0) * attr2 + prm.a / (3.0 * (prm.eta - 1.0)) * (eta3 / em1 + 1.0);
    return (prm.k - 1.0) * attr2 + prm.a / (6.0 * (prm.eta - 1.0)) * (4.0 * eta3 / em1 + 1.0);
}

inline double variance_analytic(const MechanismKind& mech, UnitValue attribute) {
    if (const auto* lap = std::get_if<LaplaceMechanism>(&mech))
        return laplace_variance(lap->epsilon);
    if (const auto* duchi = std::get_if<DuchiMechanism>(&mech))
        return duchi_variance(duchi->epsilon, attribute.value());
    return ptt_variance_analytic(std::get<PttMechanism>(mech).params, attribute);
}

// max over A in [-1,1]; the quadratic A^2 coefficient decides the endpoint.
inline double max_variance_over_inputs(const MechanismKind& mech) {
    if (const auto* lap = std::get_if<LaplaceMechanism>(&mech))
        return laplace_variance(lap->epsilon);
    if (const auto* duchi = std::get_if<DuchiMechanism>(&mech)) return duchi->atom * duchi->atom;
    const auto& prm = std::get<PttMechanism>(mech).params;
    return ptt_variance_analytic(prm, UnitValue(prm.k >= 1.0 ? 1.0 : 0.0));
}

// ---------------------------------------------------------------------------
// Independent moment oracle: the density is piecewise constant/linear, so its
// raw moments have closed-form antiderivatives. No numeric quadrature error
// beyond rounding.
// ---------------------------------------------------------------------------

namespace detail {

struct DensityPiece {
    double lo, hi, alpha, beta;  // density alpha + beta * y on [lo, hi]
};

inline std::array<DensityPiece, 4> density_pieces(const PttParams& prm, double attribute,
                                                  std::size_t& count) {
    const double center = prm.k * attribute;
    const double lo = center - prm.a;
    const double hi = center + prm.a;
    const double out_level = prm.p / std::exp(prm.epsilon);
    std::array<DensityPiece, 4> pieces{};
    count = 0;
    pieces[count++] = {-prm.B, lo, out_level, 0.0};
    if (prm.family == PttFamily::TypeI) {
        pieces[count++] = {lo, hi, prm.p, 0.0};
    } else {
        const double c = (prm.p / prm.a) * (std::expm1(prm.epsilon) / std::exp(prm.epsilon));
        pieces[count++] = {lo, center, prm.p - c * center, c};
        pieces[count++] = {center, hi, prm.p + c * center, -c};
    }
    pieces[count++] = {hi, prm.B, out_level, 0.0};
    return pieces;
}

}  // namespace detail

// Raw moments integral of y^j * density for j = 0..4.
inline std::array<double, 5> quadrature_raw_moments(const PttParams& prm, UnitValue attribute) {
    std::size_t count = 0;
    const auto pieces = detail::density_pieces(prm, attribute.value(), count);
    std::array<double, 5> raw{};
    for (std::size_t i = 0; i < count; ++i) {
        const auto& piece = pieces[i];
        // powers of the endpoints up to hi^6 for the beta * y^5 term
        double lo_pow = piece.lo, hi_pow = piece.hi;
        for (int j = 0; j <= 4; ++j) {
            const double lo_next = lo_pow * piece.lo;
            const double hi_next = hi_pow * piece.hi;
            raw[static_cast<std::size_t>(j)] +=
                piece.alpha * (hi_pow - lo_pow) / (j + 1.0) +
                piece.beta * (hi_next - lo_next) / (j + 2.0);
            lo_pow = lo_next;
            hi_pow = hi_next;
        }
    }
    return raw;
}

struct QuadratureMoments {
    double mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

inline QuadratureMoments moments_by_quadrature(const PttParams& prm, UnitValue attribute) {
    const auto raw = quadrature_raw_moments(prm, attribute);
    const double mean = raw[1] / raw[0];
    return {raw[0], mean, raw[2] / raw[0] - mean * mean};
}

// Central moment of order <= 4 (binomial expansion of the raw moments).
inline double quadrature_central_moment(const PttParams& prm, UnitValue attribute, int order) {
    if (order < 0 || order > 4)
        throw argument_error("central moment order must lie in [0, 4]");
    const auto raw = quadrature_raw_moments(prm, attribute);
    const double mu = raw[1] / raw[0];
    static constexpr double kBinomial[5][5] = {{1},
                                               {1, 1},
                                               {1, 2, 1},
                                               {1, 3, 3, 1},
                                               {1, 4, 6, 4, 1}};
    double result = 0.0;
    double mu_pow = 1.0;  // (-mu)^i
    for (int i = 0; i <= order; ++i) {
        result += kBinomial[order][i] * mu_pow * raw[static_cast<std::size_t>(order - i)];
        mu_pow *= -mu;
    }
    return result / raw[0];
}

// ---------------------------------------------------------------------------
// Crossover between the Duchi and Laplace variances.
// ---------------------------------------------------------------------------

// F1(eps, A) = ((e^eps+1)/(e^eps-1))^2 - A^2 - 8/eps^2; negative where the
// two-point scheme wins, positive where Laplace wins.
inline double crossover_function(double epsilon, UnitValue attribute) {
    const double em1 = std::expm1(epsilon);
    const double ratio = (em1 + 2.0) / em1;
    return ratio * ratio - attribute.value() * attribute.value() - 8.0 / (epsilon * epsilon);
}

// Sign-change scan on a 1000-point log grid followed by bisection. Returns the
// root with |F1| <= 1e-10, or nothing when F1 keeps one sign on the bracket.
inline std::optional<double> crossover_root(UnitValue attribute, double lo, double hi) {
    if (!(lo > 0.0 && lo < hi && std::isfinite(hi)))
        throw argument_error("crossover bracket must satisfy 0 < lo < hi");
    constexpr int kScanPoints = 1000;
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / kScanPoints;
    double x0 = lo;
    double f0 = crossover_function(x0, attribute);
    for (int i = 1; i <= kScanPoints; ++i) {
        const double x1 = std::exp(log_lo + step * i);
        const double f1 = crossover_function(x1, attribute);
        if (f0 == 0.0) return x0;
        if ((f0 < 0.0) != (f1 < 0.0)) {
            double a = x0, b = x1, fa = f0;
            for (int iter = 0; iter < 200; ++iter) {
                const double mid = 0.5 * (a + b);
                const double fm = crossover_function(mid, attribute);
                if (std::abs(fm) <= 1e-10) return mid;
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        x0 = x1;
        f0 = f1;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Optimal eta.
// ---------------------------------------------------------------------------

// eta^3 - 3 eta^2 - 2(e^eps - 1); its root above 2 is the fixed-q optimum.
inline double optimal_eta_cubic(double eta, double epsilon) {
    return eta * eta * eta - 3.0 * eta * eta - 2.0 * std::expm1(epsilon);
}

struct OptimalEta {
    double eta0 = 0.0;
    double f_residual = 0.0;  // cubic evaluated at eta0
};

inline OptimalEta optimal_eta_closed_form(PrivacyBudget epsilon) {
    const double eta0 = detail::optimal_eta(epsilon.value());
    return {eta0, optimal_eta_cubic(eta0, epsilon.value())};
}

// Band half-width from a caller-fixed band mass q at the optimal eta.
inline double optimal_eta_fixed_q_a(PrivacyBudget epsilon, double q) {
    if (!(q >= 0.5 && q < 1.0))
        throw argument_error("band mass q must lie in [1/2, 1), got " +
                             detail::real_to_string(q));
    const double k = std::exp(epsilon.value()) / (q * std::expm1(epsilon.value()));
    return k / (detail::optimal_eta(epsilon.value()) - 1.0);
}

// The eta-dependent variance factor once the band mass is held fixed;
// minimized exactly at the cubic's root.
inline double optimal_eta_objective(double eta, double epsilon) {
    const double eta3 = eta * eta * eta;
    return (eta3 / std::expm1(epsilon) + 1.0) / (3.0 * (eta - 1.0) * (eta - 1.0));
}

// Constant-band variance as a function of eta with the band mass q held
// fixed (so k is pinned by q and the bundle is generally not normalized).
inline double ptt_variance_fixed_q(PrivacyBudget epsilon, double q, double eta,
                                   UnitValue attribute) {
    if (!(q > 0.0 && q < 1.0)) throw argument_error("band mass q must lie in (0, 1)");
    if (!(eta > 1.0)) throw argument_error("eta must exceed 1");
    const double k = std::exp(epsilon.value()) / (q * std::expm1(epsilon.value()));
    return (k - 1.0) * attribute.value() * attribute.value() +
           k * optimal_eta_objective(eta, epsilon.value());
}

// ---------------------------------------------------------------------------
// Numeric variance minimization over eta for the normalization-closed family.
// ---------------------------------------------------------------------------

struct EtaMinimum {
    double eta_star = 0.0;
    double var_star = 0.0;
};

inline EtaMinimum min_variance_numeric(PrivacyBudget epsilon, UnitValue attribute,
                                       PttFamily family) {
    const auto objective = [&](double eta) {
        return ptt_variance_analytic(
            detail::normalization_closure(epsilon.value(), eta, family), attribute);
    };
    const double bound = eta_upper_bound(epsilon.value(), family);
    // coarse scan, log-spaced in eta - 1 to cover both endpoints well
    constexpr int kScanPoints = 4096;
    const double log_lo = std::log(1e-6);
    const double log_hi = std::log(bound - 1.0);
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScanPoints; ++i) {
        const double eta = 1.0 + std::exp(log_lo + (log_hi - log_lo) * i / kScanPoints);
        const double value = objective(eta);
        if (value < best_value) {
            best_value = value;
            best = i;
        }
    }
    auto grid_eta = [&](int i) {
        return 1.0 + std::exp(log_lo + (log_hi - log_lo) * std::clamp(i, 0, kScanPoints) /
                                           static_cast<double>(kScanPoints));
    };
    double lo = grid_eta(best - 1);
    double hi = grid_eta(best + 1);
    // golden-section refinement down to interval width 1e-6
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > 1e-6) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = objective(x2);
        }
    }
    const double eta_star = 0.5 * (lo + hi);
    return {eta_star, objective(eta_star)};
}

// ---------------------------------------------------------------------------
// Pairwise comparisons (pointwise and worst-case variance gaps).
// ---------------------------------------------------------------------------

namespace detail {

inline void require_matching_epsilon(const MechanismKind& a, const MechanismKind& b) {
    const double ea = mechanism_epsilon(a);
    const double eb = mechanism_epsilon(b);
    if (std::abs(ea - eb) > 1e-9 * std::max(1.0, std::abs(ea)))
        throw argument_error("compared mechanisms must share the privacy budget (" +
                             real_to_string(ea) + " vs " + real_to_string(eb) + ")");
}

}  // namespace detail

// pointwise gap at one attribute
inline double noisy_variance_gap_r(const MechanismKind& mech_a, const MechanismKind& mech_b,
                                   UnitValue attribute) {
    detail::require_matching_epsilon(mech_a, mech_b);
    return variance_analytic(mech_a, attribute) - variance_analytic(mech_b, attribute);
}

// gap of the worst-case variances over the whole input domain
inline double noisy_variance_gap_s(const MechanismKind& mech_a, const MechanismKind& mech_b) {
    detail::require_matching_epsilon(mech_a, mech_b);
    return max_variance_over_inputs(mech_a) - max_variance_over_inputs(mech_b);
}

// ---------------------------------------------------------------------------
// Auxiliary comparison polynomials, all in t = 1/(e^eps - 1) or eta.
// ---------------------------------------------------------------------------

// worst-case gap against the two-point scheme as a downward parabola in t
inline double s1_quadratic(double t, double a, double eta) {
    const double band = a * eta * eta * eta / (3.0 * (eta - 1.0));
    return -4.0 * t * t - (4.0 - band) * t + a / (3.0 * (eta - 1.0)) + (eta - 1.0) * a - 2.0;
}

// pointwise-gap counterpart (trailing constant -1 instead of -2)
inline double p1_quadratic(double t, double a, double eta) {
    return s1_quadratic(t, a, eta) + 1.0;
}

// s1 with a at its validity infimum (t+1)/(eta-1)
inline double p2_quadratic(double t, double eta) {
    const double d = 3.0 * (eta - 1.0) * (eta - 1.0);
    const double eta3 = eta * eta * eta;
    return (eta3 / d - 4.0) * t * t + (eta3 / d + 1.0 / d - 3.0) * t + 1.0 / d - 1.0;
}

// lower bound of the linear t-coefficient condition; not always positive,
// which is what blocks a pointwise-optimal choice
inline double i1_bound(double eta, double epsilon) {
    const double ee = std::exp(epsilon);
    return 4.0 - 2.0 * ee * eta * eta * eta /
                     (3.0 * std::expm1(epsilon) * (eta - 1.0) * (eta - 1.0));
}

// discriminant of p2 as a quadratic in t
inline double f1_discriminant(double eta) {
    const double d = 3.0 * (eta - 1.0) * (eta - 1.0);
    const double eta3 = eta * eta * eta;
    const double b = eta3 / d + 1.0 / d - 3.0;
    return b * b - 4.0 * (eta3 / d - 4.0) * (1.0 / d - 1.0);
}

// sign of p2's leading coefficient (times 3(eta-1)^2)
inline double f2_cubic(double eta) {
    return eta * eta * eta - 12.0 * eta * eta + 24.0 * eta - 12.0;
}

inline double f3_cubic(double eta) {
    return eta * eta * eta + 3.0 * (eta - 1.0) * (eta - 1.0) - 12.0 * eta + 13.0;
}

inline double f4_concavity(double eta) { return 1.0 - 3.0 * (eta - 1.0) * (eta - 1.0); }

enum class ComparisonKind { S1, P1, P2, I1, F1, F2, F3, F4, EtaCubic };

struct ComparisonArgs {
    std::optional<double> a;
    std::optional<double> eta;
    std::optional<double> epsilon;
};

// Uniform dispatcher for the named auxiliary functions. x is t for the
// quadratics in t and eta for the rest.
inline double comparison_polynomial(ComparisonKind kind, double x,
                                    const ComparisonArgs& args = {}) {
    auto need = [](const std::optional<double>& v, const char* what) {
        if (!v) throw argument_error(std::string("comparison polynomial requires ") + what);
        return *v;
    };
    switch (kind) {
        case ComparisonKind::S1: return s1_quadratic(x, need(args.a, "a"), need(args.eta, "eta"));
        case ComparisonKind::P1: return p1_quadratic(x, need(args.a, "a"), need(args.eta, "eta"));
        case ComparisonKind::P2: return p2_quadratic(x, need(args.eta, "eta"));
        case ComparisonKind::I1: return i1_bound(x, need(args.epsilon, "epsilon"));
        case ComparisonKind::F1: return f1_discriminant(x);
        case ComparisonKind::F2: return f2_cubic(x);
        case ComparisonKind::F3: return f3_cubic(x);
        case ComparisonKind::F4: return f4_concavity(x);
        case ComparisonKind::EtaCubic: return optimal_eta_cubic(x, need(args.epsilon, "epsilon"));
    }
    throw argument_error("unreachable comparison kind");
}

// ---------------------------------------------------------------------------
// Feasibility scan over eta for the worst-case comparison systems.
// ---------------------------------------------------------------------------

struct FeasibilityReport {
    double eta = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;
    double f4 = 0.0;
    bool sys29 = false;  // f1 <= 0 and f2 < 0
    bool sys30 = false;  // f1 > 0, f2 < 0, f3 <= 0, f4 <= 0
};

inline std::vector<FeasibilityReport> scan_eta_feasibility(std::span<const double> grid) {
    std::vector<FeasibilityReport> reports;
    reports.reserve(grid.size());
    for (double eta : grid) {
        // (eta-1)^-2 blows up numerically below this guard
        if (!(eta > 1.0 + 1e-6))
            throw argument_error("feasibility scan requires eta > 1 + 1e-6, got " +
                                 detail::real_to_string(eta));
        FeasibilityReport r;
        r.eta = eta;
        r.f1 = f1_discriminant(eta);
        r.f2 = f2_cubic(eta);
        r.f3 = f3_cubic(eta);
        r.f4 = f4_concavity(eta);
        r.sys29 = r.f1 <= 0.0 && r.f2 < 0.0;
        r.sys30 = r.f1 > 0.0 && r.f2 < 0.0 && r.f3 <= 0.0 && r.f4 <= 0.0;
        reports.push_back(r);
    }
    return reports;
}

// Variance excess of the triangular-band family over the constant-band family
// at matched (k, a); strictly positive whenever e^eps < 1 + 2 eta^3.
inline double variance_gap_ii_minus_i(PrivacyBudget epsilon, double a, double eta) {
    if (!(a > 0.0 && eta > 1.0))
        throw argument_error("variance gap requires a > 0 and eta > 1");
    const double eta3 = eta * eta * eta;
    return a / (6.0 * (eta - 1.0)) * (2.0 * eta3 / std::expm1(epsilon.value()) - 1.0);
}

// ---------------------------------------------------------------------------
// Worst-case variance lower bound. theta1 and theta2 are the tangency
// constants that keep the bracket polynomials nonnegative for every eta > 1.
// ---------------------------------------------------------------------------

inline double lower_bound_theta1() { return 2.25; }

inline double lower_bound_theta2() {
    static const double value = [] {
        const double c = std::cbrt(2.0 + std::sqrt(3.0)) + std::cbrt(2.0 - std::sqrt(3.0));
        const double u = 1.0 + c;
        return 1.0 + (u * u * u + 1.0) / (3.0 * c * c);
    }();
    return value;
}

struct LowerBoundConstants {
    double theta1 = 0.0;
    double theta2 = 0.0;
};

inline LowerBoundConstants lower_bound_constants() {
    return {lower_bound_theta1(), lower_bound_theta2()};
}

inline double psi1(double eta) {
    return eta * eta * eta - 3.0 * lower_bound_theta1() * (eta - 1.0) * (eta - 1.0);
}

inline double psi2(double eta) {
    return eta * eta * eta - 3.0 * (lower_bound_theta2() - 1.0) * (eta - 1.0) * (eta - 1.0) +
           1.0;
}

struct LowerBoundCurves {
    double g1 = 0.0;    // the lower bound itself
    double h1 = 0.0;    // worst-case variance at the infimum band half-width
    double h2 = 0.0;    // h1 - g1, nonnegative for all eta > 1
    double psi1 = 0.0;  // quadratic-coefficient bracket, tangent zero at eta = 3
    double psi2 = 0.0;  // linear-coefficient bracket, tangent zero near eta = 3.196
};

inline LowerBoundCurves lower_bound_curves(PrivacyBudget epsilon, double eta) {
    if (!(eta > 1.0))
        throw argument_error("lower-bound curves require eta > 1, got " +
                             detail::real_to_string(eta));
    const double t = 1.0 / std::expm1(epsilon.value());
    const double denom = 3.0 * (eta - 1.0) * (eta - 1.0);
    const double eta3 = eta * eta * eta;
    LowerBoundCurves curves;
    curves.psi1 = psi1(eta);
    curves.psi2 = psi2(eta);
    curves.g1 = lower_bound_theta1() * t * t + lower_bound_theta2() * t;
    curves.h1 = t + eta3 * t * (t + 1.0) / denom + (t + 1.0) / denom;
    curves.h2 = (curves.psi1 * t * t + curves.psi2 * t + 1.0) / denom;
    return curves;
}

}  // namespace ptt
