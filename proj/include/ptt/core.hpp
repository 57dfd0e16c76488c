#pragma once

// Core domain types for piecewise transformation technique (PTT) mechanisms:
// privacy budgets, the [-1,1] attribute domain, and derivation/validation of
// PTT parameter bundles.
//
// A PTT instance is fully determined by the privacy budget epsilon and the
// shape ratio eta = B/a, where
//   k : band-center slope   (the band for input A is [k*A - a, k*A + a]),
//   a : band half-width,
//   B : support half-width, B = k + a, so k = (eta - 1) * a,
//   p : peak density inside the band,
//   q : total probability mass inside the band.
// Requiring the density to integrate to one with out-of-band level p/e^eps
// pins (k, a, p, q) uniquely per (epsilon, eta); derive_ptt_params applies
// that closure. q >= 1/2 restricts eta to (1, 1+e^eps] for the constant-band
// family and (1, (e^eps+3)/2] for the triangular-band family.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ptt {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// caller passed something structurally wrong (empty input, missing flag value)
struct argument_error : error {
    using error::error;
};
// a parameter bundle cannot be built or used (eta outside validity, ...)
struct parameter_error : error {
    using error::error;
};
// a numeric input lies outside its admissible interval
struct range_error : error {
    using error::error;
};
struct io_error : error {
    using error::error;
};

namespace detail {

// shortest representation that still round-trips a double exactly
inline std::string real_to_string(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

class PrivacyBudget {
public:
    explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {
        if (!(std::isfinite(epsilon) && epsilon > 0.0))
            throw parameter_error("privacy budget must be a finite positive real, got " +
                                  detail::real_to_string(epsilon));
    }
    double value() const noexcept { return epsilon_; }

private:
    double epsilon_;
};

// Sequential composition: mechanisms run with budgets eps_i jointly satisfy
// the sum of the eps_i.
inline PrivacyBudget compose_budgets(std::span<const PrivacyBudget> budgets) {
    if (budgets.empty()) throw argument_error("compose_budgets: empty budget sequence");
    double total = 0.0;
    for (const auto& b : budgets) total += b.value();
    return PrivacyBudget(total);
}

inline PrivacyBudget compose_budgets(std::initializer_list<PrivacyBudget> budgets) {
    return compose_budgets(std::span<const PrivacyBudget>(budgets.begin(), budgets.size()));
}

// An attribute value in the canonical domain [-1, 1].
class UnitValue {
public:
    explicit UnitValue(double value) : value_(value) {
        if (!(value >= -1.0 && value <= 1.0))
            throw range_error("attribute value " + detail::real_to_string(value) +
                              " outside [-1, 1]");
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

struct DomainBounds {
    double lo;
    double hi;
    DomainBounds(double lo_in, double hi_in) : lo(lo_in), hi(hi_in) {
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
            throw argument_error("domain bounds must be finite with lo < hi, got [" +
                                 detail::real_to_string(lo) + ", " + detail::real_to_string(hi) +
                                 "]");
    }
    double width() const noexcept { return hi - lo; }
};

// Affine map [lo, hi] -> [-1, 1]. Endpoints land exactly on -1 and 1; interior
// rounding spill is clamped so the result always constructs a UnitValue.
inline UnitValue rescale_to_unit(double u, const DomainBounds& bounds) {
    if (!(u >= bounds.lo && u <= bounds.hi))
        throw range_error("value " + detail::real_to_string(u) + " outside domain [" +
                          detail::real_to_string(bounds.lo) + ", " +
                          detail::real_to_string(bounds.hi) + "]");
    const double v = ((u - bounds.lo) + (u - bounds.hi)) / (bounds.hi - bounds.lo);
    return UnitValue(std::clamp(v, -1.0, 1.0));
}

// Inverse of rescale_to_unit. Accepts values outside [-1, 1] because noisy
// reports exceed the unit interval; the image then lies outside [lo, hi].
inline double rescale_from_unit(double v, const DomainBounds& bounds) {
    return 0.5 * (v * (bounds.hi - bounds.lo) + (bounds.hi + bounds.lo));
}

enum class PttFamily {
    TypeI,   // constant density across the band
    TypeII,  // density decays linearly from the band center to p/e^eps at the edges
};

inline std::string_view family_name(PttFamily family) {
    return family == PttFamily::TypeI ? "type-i" : "type-ii";
}

inline PttFamily family_from_name(std::string_view name) {
    if (name == "type-i") return PttFamily::TypeI;
    if (name == "type-ii") return PttFamily::TypeII;
    throw argument_error("unknown PTT family '" + std::string(name) +
                         "' (expected type-i or type-ii)");
}

struct PttParams {
    double epsilon = 0.0;
    double eta = 0.0;  // B / a
    double k = 0.0;    // band-center slope
    double a = 0.0;    // band half-width
    double B = 0.0;    // support half-width, k + a
    double p = 0.0;    // peak density
    double q = 0.0;    // in-band mass
    PttFamily family = PttFamily::TypeI;
    // True when the bundle fails validation (sub-stochastic density or
    // q < 1/2). Such bundles stay usable for densities and moments but are
    // refused by samplers.
    bool analysis_only = false;
};

// Largest eta keeping q >= 1/2 for the given family.
inline double eta_upper_bound(double epsilon, PttFamily family) {
    const double ee = std::exp(epsilon);
    return family == PttFamily::TypeI ? 1.0 + ee : 0.5 * (ee + 3.0);
}

namespace detail {

// Unique root above 2 of eta^3 - 3 eta^2 - 2(e^eps - 1); the variance-minimal
// eta when the band mass q is held fixed. The second cube-root operand
// e^eps - sqrt(e^{2 eps} - 1) is evaluated as a reciprocal to avoid
// cancellation at large epsilon.
inline double optimal_eta(double epsilon) {
    const double ee = std::exp(epsilon);
    const double s = ee + std::sqrt(std::expm1(2.0 * epsilon));
    return 1.0 + std::cbrt(s) + std::cbrt(1.0 / s);
}

// Solve (k, a, p, q) from (epsilon, eta) so that the density integrates to
// one. Performs no validity check; callers decide how strict to be.
inline PttParams normalization_closure(double epsilon, double eta, PttFamily family) {
    const double ee = std::exp(epsilon);
    const double em1 = std::expm1(epsilon);
    PttParams prm;
    prm.epsilon = epsilon;
    prm.eta = eta;
    prm.family = family;
    if (family == PttFamily::TypeI) {
        prm.k = (eta - 1.0 + ee) / em1;
        prm.a = prm.k / (eta - 1.0);
        prm.q = ee / (eta - 1.0 + ee);
        prm.p = prm.q / (2.0 * prm.a);
    } else {
        prm.k = (ee + 1.0 + 2.0 * (eta - 1.0)) / em1;
        prm.a = prm.k / (eta - 1.0);
        prm.q = (ee + 1.0) / (prm.k * em1);
        prm.p = ee / (prm.a * prm.k * em1);
    }
    prm.B = prm.k + prm.a;
    return prm;
}

}  // namespace detail

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    std::string summary() const {
        std::string out;
        for (const auto& c : checks) {
            out += c.name;
            out += c.passed ? ": pass" : ": FAIL";
            out += " (residual ";
            out += detail::real_to_string(c.residual);
            out += ")\n";
        }
        return out;
    }
};

// Mechanized check of every PttParams invariant. Never throws; a bundle is
// samplable iff the report passes.
inline ValidationReport validate_params(const PttParams& prm) {
    constexpr double kTol = 1e-12;
    ValidationReport report;
    auto add = [&report](std::string name, bool passed, double residual) {
        report.checks.push_back({std::move(name), passed, residual});
    };

    const bool finite = std::isfinite(prm.epsilon) && std::isfinite(prm.eta) &&
                        std::isfinite(prm.k) && std::isfinite(prm.a) && std::isfinite(prm.B) &&
                        std::isfinite(prm.p) && std::isfinite(prm.q);
    const bool positive = prm.epsilon > 0.0 && prm.k > 0.0 && prm.a > 0.0 && prm.B > 0.0 &&
                          prm.p > 0.0 && prm.q > 0.0;
    add("finite-positive", finite && positive, finite && positive ? 0.0 : 1.0);
    if (!finite) return report;  // residuals below would be meaningless

    const double ee = std::exp(prm.epsilon);
    const double em1 = std::expm1(prm.epsilon);

    const double b_resid = std::abs(prm.B - (prm.k + prm.a)) / std::max(1.0, std::abs(prm.B));
    add("b-is-k-plus-a", b_resid <= kTol, b_resid);

    const double eta_resid =
        std::abs(prm.eta - prm.B / prm.a) / std::max(1.0, std::abs(prm.eta));
    add("eta-is-b-over-a", eta_resid <= kTol, eta_resid);

    const double k_resid =
        std::abs(prm.k - (prm.eta - 1.0) * prm.a) / std::max(1.0, std::abs(prm.k));
    add("k-is-eta-minus-one-times-a", k_resid <= kTol, k_resid);

    const double q_low = std::max(0.0, 0.5 - prm.q);
    add("q-range", q_low <= kTol && prm.q < 1.0, std::max(q_low, prm.q >= 1.0 ? prm.q - 1.0 : 0.0));

    const double bound = eta_upper_bound(prm.epsilon, prm.family);
    const double eta_excess = std::max(prm.eta - bound, 1.0 - prm.eta);
    add("eta-validity", prm.eta > 1.0 && prm.eta <= bound + kTol * bound,
        std::max(0.0, eta_excess));

    const double q_ref = prm.family == PttFamily::TypeI ? ee / (prm.k * em1)
                                                        : (ee + 1.0) / (prm.k * em1);
    const double q_resid = std::abs(prm.q - q_ref) / std::abs(q_ref);
    add("q-formula", q_resid <= kTol, q_resid);

    const double p_ref = prm.family == PttFamily::TypeI ? ee / (2.0 * prm.a * prm.k * em1)
                                                        : ee / (prm.a * prm.k * em1);
    const double p_resid = std::abs(prm.p - p_ref) / std::abs(p_ref);
    add("p-formula", p_resid <= kTol, p_resid);

    const double in_band = prm.family == PttFamily::TypeI
                               ? 2.0 * prm.a * prm.p
                               : prm.a * prm.p * (ee + 1.0) / ee;
    const double out_band = 2.0 * prm.k * prm.p / ee;
    const double mass_resid = std::abs(in_band + out_band - 1.0);
    add("normalization", mass_resid <= kTol, mass_resid);

    return report;
}

// Canonical constructor: (epsilon, eta) -> full bundle via the normalization
// closure. Rejects eta outside the family's validity interval.
inline PttParams derive_ptt_params(PrivacyBudget epsilon, double eta, PttFamily family) {
    const double bound = eta_upper_bound(epsilon.value(), family);
    if (!(eta > 1.0 && eta <= bound))
        throw parameter_error("eta " + detail::real_to_string(eta) +
                              " outside admissible interval (1, " +
                              detail::real_to_string(bound) + "] for family " +
                              std::string(family_name(family)) + " at epsilon " +
                              detail::real_to_string(epsilon.value()));
    return detail::normalization_closure(epsilon.value(), eta, family);
}

// Closure for any eta > 1, flagged analysis-only when validation fails
// (q < 1/2 past the validity bound). Densities and moments remain exact.
inline PttParams derive_ptt_params_relaxed(PrivacyBudget epsilon, double eta, PttFamily family) {
    if (!(eta > 1.0))
        throw parameter_error("eta must exceed 1, got " + detail::real_to_string(eta));
    PttParams prm = detail::normalization_closure(epsilon.value(), eta, family);
    prm.analysis_only = !validate_params(prm).passed();
    return prm;
}

enum class Preset {
    PmCompatible,      // eta = e^{eps/2} + 1: matches the published piecewise mechanism
    Eta19Tenths,       // eta = 19/10: beats the two-point scheme in worst-case variance
    OptimalEtaFixedQ,  // eta at the fixed-q variance minimum; caller supplies q
};

inline std::string_view preset_name(Preset preset) {
    switch (preset) {
        case Preset::PmCompatible: return "pm";
        case Preset::Eta19Tenths: return "theorem9";
        default: return "optimal";
    }
}

inline Preset preset_from_name(std::string_view name) {
    if (name == "pm") return Preset::PmCompatible;
    if (name == "theorem9") return Preset::Eta19Tenths;
    if (name == "optimal") return Preset::OptimalEtaFixedQ;
    throw argument_error("unknown preset '" + std::string(name) +
                         "' (expected pm, theorem9 or optimal)");
}

// Named parameter bundles. The first two are normalization-closed and always
// samplable. OptimalEtaFixedQ keeps the caller's q and solves a from it, so
// the bundle is generally sub- or super-stochastic: it comes back flagged
// analysis-only unless the supplied q happens to equal the closure value.
inline PttParams preset_params(Preset preset, PrivacyBudget epsilon,
                               std::optional<double> q_for_optimal = std::nullopt) {
    switch (preset) {
        case Preset::PmCompatible: {
            const double eta = std::exp(0.5 * epsilon.value()) + 1.0;
            return derive_ptt_params(epsilon, eta, PttFamily::TypeI);
        }
        case Preset::Eta19Tenths:
            return derive_ptt_params(epsilon, 1.9, PttFamily::TypeI);
        case Preset::OptimalEtaFixedQ: {
            if (!q_for_optimal)
                throw argument_error("preset 'optimal' requires a band mass q in [1/2, 1)");
            const double q = *q_for_optimal;
            if (!(q >= 0.5 && q < 1.0))
                throw argument_error("band mass q must lie in [1/2, 1), got " +
                                     detail::real_to_string(q));
            const double ee = std::exp(epsilon.value());
            const double em1 = std::expm1(epsilon.value());
            PttParams prm;
            prm.epsilon = epsilon.value();
            prm.family = PttFamily::TypeI;
            prm.eta = detail::optimal_eta(epsilon.value());
            prm.k = ee / (q * em1);
            prm.a = prm.k / (prm.eta - 1.0);
            prm.q = q;
            prm.p = q / (2.0 * prm.a);
            prm.B = prm.k + prm.a;
            prm.analysis_only = !validate_params(prm).passed();
            return prm;
        }
    }
    throw argument_error("unreachable preset");
}

}  // namespace ptt
