#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ptt/analysis.hpp"
#include "ptt/core.hpp"

using namespace ptt;

namespace {
const double kLn3 = std::log(3.0);

double rel_tol(double expected, double tol) { return tol * std::max(1.0, std::abs(expected)); }

// worst-case gap against the two-point scheme, written straight from the
// variance formulas; the independent route for the t-quadratic identity
double s1_direct(double eps, double a, double eta) {
    const double em1 = std::expm1(eps);
    const double duchi = (em1 + 2.0) / em1;
    return (eta - 1.0) * a - 1.0 +
           a / (3.0 * (eta - 1.0)) * (eta * eta * eta / em1 + 1.0) - duchi * duchi;
}
}  // namespace

TEST_CASE("analytic variances match the closed forms") {
    CHECK(laplace_variance(2.0) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(duchi_variance(kLn3, 0.5) == Catch::Approx(3.75).epsilon(1e-12));

    const PttParams uniform_band = derive_ptt_params(PrivacyBudget(kLn3), 2.0, PttFamily::TypeI);
    CHECK(ptt_variance_analytic(uniform_band, UnitValue(0.0)) ==
          Catch::Approx(10.0 / 3.0).epsilon(1e-12));

    const PttParams tent_band = derive_ptt_params(PrivacyBudget(kLn3), 2.0, PttFamily::TypeII);
    CHECK(ptt_variance_analytic(tent_band, UnitValue(1.0)) ==
          Catch::Approx(10.5).epsilon(1e-12));
    CHECK(ptt_variance_analytic(tent_band, UnitValue(0.0)) ==
          Catch::Approx(8.5).epsilon(1e-12));
}

TEST_CASE("quadrature oracle: examples") {
    const PttParams prm = derive_ptt_params(PrivacyBudget(kLn3), 2.0, PttFamily::TypeI);
    const auto moments = moments_by_quadrature(prm, UnitValue(0.3));
    CHECK(moments.mass == Catch::Approx(1.0).margin(1e-12));
    CHECK(moments.mean == Catch::Approx(0.3).margin(1e-10));
    CHECK(moments.variance == Catch::Approx(10.0 / 3.0 + 0.09).margin(1e-10));

    const PttParams tent = derive_ptt_params(PrivacyBudget(kLn3), 2.0, PttFamily::TypeII);
    const auto tent_moments = moments_by_quadrature(tent, UnitValue(0.0));
    CHECK(tent_moments.mass == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(tent_moments.mean) <= 1e-15);  // symmetric density about 0
    CHECK(tent_moments.variance == Catch::Approx(8.5).margin(1e-10));
}

TEST_CASE("quadrature oracle agrees with the analytic variance on a grid") {
    for (double eps : {0.1, 1.0, kLn3, 5.0}) {
        for (auto family : {PttFamily::TypeI, PttFamily::TypeII}) {
            const double bound = eta_upper_bound(eps, family);
            for (double frac : {0.1, 0.3, 0.5, 0.7, 1.0}) {
                const PttParams prm =
                    derive_ptt_params(PrivacyBudget(eps), 1.0 + (bound - 1.0) * frac, family);
                for (double attribute : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
                    const auto moments = moments_by_quadrature(prm, UnitValue(attribute));
                    const double analytic = ptt_variance_analytic(prm, UnitValue(attribute));
                    REQUIRE(std::abs(moments.mass - 1.0) <= 1e-12);
                    REQUIRE(std::abs(moments.mean - attribute) <= rel_tol(1.0, 1e-10));
                    REQUIRE(std::abs(moments.variance - analytic) <= rel_tol(analytic, 1e-10));
                }
            }
        }
    }
}

TEST_CASE("quadrature central moments") {
    const PttParams prm = derive_ptt_params(PrivacyBudget(kLn3), 2.0, PttFamily::TypeII);
    CHECK(quadrature_central_moment(prm, UnitValue(0.2), 0) ==
          Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(quadrature_central_moment(prm, UnitValue(0.2), 1)) <= 1e-12);
    CHECK(quadrature_central_moment(prm, UnitValue(0.2), 2) ==
          Catch::Approx(ptt_variance_analytic(prm, UnitValue(0.2))).epsilon(1e-10));
    CHECK(quadrature_central_moment(prm, UnitValue(0.0), 4) > 0.0);
    CHECK_THROWS_AS(quadrature_central_moment(prm, UnitValue(0.0), 5), argument_error);
}

TEST_CASE("crossover function and root") {
    CHECK(crossover_function(1.0, UnitValue(0.0)) ==
          Catch::Approx(4.682694376538724 - 8.0).margin(1e-9));

    const auto root = crossover_root(UnitValue(0.0), 0.01, 10.0);
    REQUIRE(root.has_value());
    CHECK(*root > 2.3);
    CHECK(*root < 2.4);
    CHECK(*root == Catch::Approx(2.3241701219).margin(1e-6));
    CHECK(std::abs(crossover_function(*root, UnitValue(0.0))) <= 1e-10);

    // at |A| = 1 the gap stays negative over the whole bracket
    CHECK_FALSE(crossover_root(UnitValue(1.0), 0.01, 10.0).has_value());

    CHECK_THROWS_AS(crossover_root(UnitValue(0.0), -1.0, 10.0), argument_error);
    CHECK_THROWS_AS(crossover_root(UnitValue(0.0), 5.0, 2.0), argument_error);
}

TEST_CASE("crossover stays negative on the high-privacy interval") {
    for (int i = 1; i <= 1000; ++i)
        REQUIRE(crossover_function(i / 1000.0, UnitValue(0.0)) < 0.0);
}

TEST_CASE("optimal eta closed form") {
    const auto at_ln3 = optimal_eta_closed_form(PrivacyBudget(kLn3));
    CHECK(at_ln3.eta0 == Catch::Approx(3.3553013976081199).epsilon(1e-12));
    const auto at_one = optimal_eta_closed_form(PrivacyBudget(1.0));
    CHECK(at_one.eta0 == Catch::Approx(3.3130831662572802).epsilon(1e-12));

    for (double eps : {0.01, 0.1, 1.0, 5.0, 10.0}) {
        const auto result = optimal_eta_closed_form(PrivacyBudget(eps));
        REQUIRE(std::abs(result.f_residual) <= 1e-9 * std::max(1.0, std::exp(eps)));
    }

    // vanishing budget: both cube roots tend to 1
    CHECK(optimal_eta_closed_form(PrivacyBudget(1e-6)).eta0 ==
          Catch::Approx(3.0).margin(1e-3));
}

TEST_CASE("closed-form optimal eta agrees with a bisection oracle") {
    // independent root finder on the cubic at eps = ln3: eta^3 - 3 eta^2 - 4
    double lo = 3.0, hi = 4.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * mid * mid - 3.0 * mid * mid - 4.0 < 0.0 ? lo : hi) = mid;
    }
    CHECK(optimal_eta_closed_form(PrivacyBudget(kLn3)).eta0 ==
          Catch::Approx(0.5 * (lo + hi)).margin(1e-9));
}

TEST_CASE("fixed-q objective attains its grid minimum at the closed-form eta") {
    for (double eps : {0.1, 1.0, kLn3}) {
        const double eta0 = optimal_eta_closed_form(PrivacyBudget(eps)).eta0;
        const double span = 4.0 * eta0;
        double best_eta = 0.0, best = std::numeric_limits<double>::infinity();
        const int points = 200000;
        for (int i = 1; i <= points; ++i) {
            const double eta = 1.0 + (span - 1.0) * i / points;
            const double value = optimal_eta_objective(eta, eps);
            if (value < best) {
                best = value;
                best_eta = eta;
            }
        }
        REQUIRE(std::abs(best_eta - eta0) <= (span - 1.0) / points + 1e-12);
    }
}

TEST_CASE("fixed-q variance curve is consistent with its pieces") {
    const double eps = 1.0;
    const double q = 0.6;
    const double k = std::exp(eps) / (q * std::expm1(eps));
    const double value = ptt_variance_fixed_q(PrivacyBudget(eps), q, 2.5, UnitValue(0.8));
    CHECK(value == Catch::Approx((k - 1.0) * 0.64 + k * optimal_eta_objective(2.5, eps))
                       .epsilon(1e-12));
    CHECK(optimal_eta_fixed_q_a(PrivacyBudget(eps), q) ==
          Catch::Approx(k / (optimal_eta_closed_form(PrivacyBudget(eps)).eta0 - 1.0))
              .epsilon(1e-12));
}

TEST_CASE("numeric variance minimum over the normalized family") {
    SECTION("worst case attribute at eps = ln3") {
        const auto result = min_variance_numeric(PrivacyBudget(kLn3), UnitValue(1.0),
                                                 PttFamily::TypeI);
        CHECK(result.eta_star == Catch::Approx(2.322431).margin(2e-3));
        CHECK(result.var_star == Catch::Approx(4.153209116).margin(1e-6));
        // local minimality against the analytic variance
        auto at = [&](double eta) {
            return ptt_variance_analytic(
                derive_ptt_params(PrivacyBudget(kLn3), eta, PttFamily::TypeI), UnitValue(1.0));
        };
        CHECK(at(result.eta_star - 1e-2) > result.var_star);
        CHECK(at(result.eta_star + 1e-2) > result.var_star);
    }
    SECTION("the minimizer moves with the attribute in the normalized family") {
        const auto at_one =
            min_variance_numeric(PrivacyBudget(kLn3), UnitValue(1.0), PttFamily::TypeI);
        const auto at_zero =
            min_variance_numeric(PrivacyBudget(kLn3), UnitValue(0.0), PttFamily::TypeI);
        CHECK(at_zero.eta_star == Catch::Approx(2.59273).margin(2e-3));
        INFO("eta*(A=1) = " << at_one.eta_star << ", eta*(A=0) = " << at_zero.eta_star);
        CHECK(std::abs(at_one.eta_star - at_zero.eta_star) > 0.1);
    }
    SECTION("vanishing budget: eta* -> 2 and eps^2 var* -> 16/3") {
        const auto result =
            min_variance_numeric(PrivacyBudget(1e-4), UnitValue(1.0), PttFamily::TypeI);
        CHECK(result.eta_star == Catch::Approx(2.0).margin(1e-3));
        CHECK(1e-8 * result.var_star == Catch::Approx(16.0 / 3.0).margin(5e-3));
    }
}

TEST_CASE("variance gaps between mechanisms") {
    SECTION("worst-case gap of the eta=19/10 bundle against the two-point scheme") {
        const auto ptt_mech =
            make_ptt(derive_ptt_params(PrivacyBudget(1.0), 1.9, PttFamily::TypeI));
        const double gap = noisy_variance_gap_s(ptt_mech, make_duchi(PrivacyBudget(1.0)));
        CHECK(gap == Catch::Approx(0.74876740776460506).margin(1e-9));
    }
    SECTION("a mechanism against itself") {
        const auto mech = make_duchi(PrivacyBudget(1.0));
        CHECK(noisy_variance_gap_r(mech, mech, UnitValue(0.7)) == 0.0);
        CHECK(noisy_variance_gap_s(make_laplace(PrivacyBudget(2.0)),
                                   make_laplace(PrivacyBudget(2.0))) == 0.0);
    }
    SECTION("mismatched budgets are rejected") {
        CHECK_THROWS_AS(noisy_variance_gap_s(make_laplace(PrivacyBudget(1.0)),
                                             make_duchi(PrivacyBudget(2.0))),
                        argument_error);
    }
    SECTION("pointwise gap matches the variance difference") {
        const auto ptt_mech =
            make_ptt(derive_ptt_params(PrivacyBudget(1.0), 1.9, PttFamily::TypeI));
        const auto duchi_mech = make_duchi(PrivacyBudget(1.0));
        const UnitValue attr(0.4);
        CHECK(noisy_variance_gap_r(ptt_mech, duchi_mech, attr) ==
              Catch::Approx(variance_analytic(ptt_mech, attr) -
                            variance_analytic(duchi_mech, attr))
                  .margin(1e-14));
    }
}

TEST_CASE("comparison polynomials") {
    SECTION("cubic branch values at eta = 19/10") {
        CHECK(f2_cubic(1.9) == Catch::Approx(-2.861).margin(1e-9));
        CHECK(f1_discriminant(1.9) == Catch::Approx(-2.7165844).margin(1e-4));
        CHECK(f1_discriminant(1.9) <= 0.0);
    }
    SECTION("the linear-coefficient bound can go negative") {
        CHECK(i1_bound(2.0, 1.0) == Catch::Approx(-4.437209103).margin(1e-6));
        CHECK(i1_bound(2.0, 0.1) < 0.0);
    }
    SECTION("t-quadratic equals the direct worst-case gap") {
        for (double eps : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double t = 1.0 / std::expm1(eps);
            for (double a : {0.5, 1.0, 2.5}) {
                for (double eta : {1.3, 1.9, 3.0, 6.0}) {
                    const double direct = s1_direct(eps, a, eta);
                    REQUIRE(std::abs(s1_quadratic(t, a, eta) - direct) <=
                            rel_tol(direct, 1e-10));
                }
            }
        }
    }
    SECTION("p2 equals s1 at the infimum band half-width") {
        for (double t : {0.1, 0.7, 1.9, 10.0}) {
            for (double eta : {1.2, 1.9, 2.6, 8.0}) {
                const double a_inf = (t + 1.0) / (eta - 1.0);
                const double lhs = p2_quadratic(t, eta);
                const double rhs = s1_quadratic(t, a_inf, eta);
                REQUIRE(std::abs(lhs - rhs) <= rel_tol(rhs, 1e-10));
            }
        }
    }
    SECTION("p1 exceeds s1 by exactly one") {
        CHECK(p1_quadratic(0.5, 2.0, 1.9) ==
              Catch::Approx(s1_quadratic(0.5, 2.0, 1.9) + 1.0).margin(1e-14));
    }
    SECTION("p1 is positive at its vertex whenever the vertex lies in t > 0") {
        for (double eta : {1.5, 2.0, 3.0, 5.0, 10.0}) {
            for (double k : {1.05, 1.5, 2.0, 4.0}) {
                const double a = k / (eta - 1.0);
                const double b = 4.0 - a * eta * eta * eta / (3.0 * (eta - 1.0));
                const double vertex = -b / 8.0;
                if (vertex > 0.0) REQUIRE(p1_quadratic(vertex, a, eta) > 0.0);
            }
        }
    }
    SECTION("dispatcher demands its parameters") {
        CHECK(comparison_polynomial(ComparisonKind::F2, 1.9) ==
              Catch::Approx(f2_cubic(1.9)).margin(1e-15));
        CHECK(comparison_polynomial(ComparisonKind::S1, 0.5, {.a = 2.0, .eta = 1.9}) ==
              Catch::Approx(s1_quadratic(0.5, 2.0, 1.9)).margin(1e-15));
        CHECK_THROWS_AS(comparison_polynomial(ComparisonKind::S1, 0.5), argument_error);
        CHECK_THROWS_AS(comparison_polynomial(ComparisonKind::I1, 2.0), argument_error);
        CHECK_THROWS_AS(comparison_polynomial(ComparisonKind::EtaCubic, 2.0), argument_error);
        CHECK(comparison_polynomial(ComparisonKind::EtaCubic, 3.3553013976081199,
                                    {.epsilon = kLn3}) == Catch::Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("feasibility scan") {
    SECTION("eta = 19/10 satisfies the closed-form branch") {
        const double grid[] = {1.9};
        const auto reports = scan_eta_feasibility(grid);
        REQUIRE(reports.size() == 1);
        CHECK(reports[0].sys29);
        CHECK_FALSE(reports[0].sys30);
    }
    SECTION("eta = 10 fails both branches") {
        const double grid[] = {10.0};
        const auto reports = scan_eta_feasibility(grid);
        CHECK(reports[0].f2 == Catch::Approx(28.0).margin(1e-9));
        CHECK_FALSE(reports[0].sys29);
        CHECK_FALSE(reports[0].sys30);
    }
    SECTION("near-singular eta still produces a finite report") {
        const double grid[] = {1.0001};
        const auto reports = scan_eta_feasibility(grid);
        CHECK(std::isfinite(reports[0].f1));
        CHECK(reports[0].f1 > 0.0);
    }
    SECTION("eta at or below the guard is rejected") {
        const double grid[] = {1.0000001};
        CHECK_THROWS_AS(scan_eta_feasibility(grid), argument_error);
    }
}

TEST_CASE("variance excess of the triangular band at matched k and a") {
    CHECK(variance_gap_ii_minus_i(PrivacyBudget(kLn3), 1.0, 2.0) ==
          Catch::Approx(7.0 / 6.0).epsilon(1e-12));
    // positive throughout the high-privacy window
    for (int i = 1; i <= 100; ++i) {
        const double eps = kLn3 * i / 101.0;
        for (double a : {1.0, 2.0})
            for (double eta : {1.5, 2.0, 3.0})
                REQUIRE(variance_gap_ii_minus_i(PrivacyBudget(eps), a, eta) > 0.0);
    }
    // root of the parenthesized factor: e^eps = 1 + 2 eta^3
    const double eta = 1.7;
    const double eps_root = std::log1p(2.0 * eta * eta * eta);
    CHECK(std::abs(variance_gap_ii_minus_i(PrivacyBudget(eps_root), 1.3, eta)) <= 1e-12);
}

TEST_CASE("lower-bound constants and tangencies") {
    CHECK(lower_bound_theta1() == 2.25);
    CHECK(lower_bound_theta2() == Catch::Approx(3.3256166932733378).epsilon(1e-12));
    CHECK(std::abs(psi1(3.0)) <= 1e-12);
    // psi2 has its double root at 1 + cbrt(2+sqrt 3) + cbrt(2-sqrt 3)
    const double tangency = 1.0 + std::cbrt(2.0 + std::sqrt(3.0)) + std::cbrt(2.0 - std::sqrt(3.0));
    CHECK(std::abs(psi2(tangency)) <= 1e-9);
    CHECK(tangency == Catch::Approx(3.1958).margin(1e-3));
}

TEST_CASE("lower-bound curves") {
    const auto curves = lower_bound_curves(PrivacyBudget(1.0), 2.0);
    CHECK(curves.g1 == Catch::Approx(2.6974994479724242).margin(1e-9));
    CHECK(curves.h2 == Catch::Approx(curves.h1 - curves.g1).margin(1e-12));

    for (double eps : {0.01, 0.1, 1.0, 5.0}) {
        for (int i = 1; i <= 100; ++i) {
            const double eta = 1.0 + 19.0 * i / 100.0;
            const auto c = lower_bound_curves(PrivacyBudget(eps), eta);
            REQUIRE(c.h2 >= -1e-9);
            REQUIRE(c.psi1 >= -1e-9);
            REQUIRE(c.psi2 >= -1e-9);
        }
    }
    CHECK_THROWS_AS(lower_bound_curves(PrivacyBudget(1.0), 1.0), argument_error);
}

TEST_CASE("normalized worst-case variance dominates the lower bound") {
    for (double eps : {0.01, 0.1, 0.5, 1.0}) {
        const double g1 = lower_bound_curves(PrivacyBudget(eps), 2.0).g1;
        const double bound = eta_upper_bound(eps, PttFamily::TypeI);
        for (int i = 1; i <= 100; ++i) {
            const double eta = 1.0 + (bound - 1.0) * i / 100.0;
            const PttParams prm = derive_ptt_params(PrivacyBudget(eps), eta, PttFamily::TypeI);
            REQUIRE(ptt_variance_analytic(prm, UnitValue(1.0)) > g1);
        }
    }
}
