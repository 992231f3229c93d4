#include <doctest.h>

#include "kvreg/specfun.hpp"
#include "oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace kvreg;
using oracle::rel_err;

TEST_CASE("log_gamma spot values") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rel_err(log_gamma(0.5), 0.5 * std::log(std::numbers::pi)) < 1e-14);
  CHECK(rel_err(log_gamma(10.0), std::log(362880.0)) < 1e-14);
  CHECK(rel_err(log_gamma(1e-3), oracle::kLgamma_1em3) < 1e-13);
  CHECK(rel_err(log_gamma(1.001), oracle::kLgamma_1_001) < 1e-13);
  CHECK(rel_err(log_gamma(1e6), oracle::kLgamma_1e6) < 1e-13);
  CHECK(rel_err(log_gamma(2.5), oracle::kLgamma_2_5) < 1e-13);
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
}

TEST_CASE("reg_inc_beta") {
  CHECK(reg_inc_beta(2.0, 1.0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(reg_inc_beta(3.3, 0.7, 1.0) == 1.0);
  CHECK(reg_inc_beta(3.3, 0.7, 0.0) == 0.0);
  CHECK(rel_err(reg_inc_beta(2.5, 1.5, 0.3), oracle::kIbeta_2_5_1_5_0_3) < 1e-13);
  CHECK_THROWS_AS(reg_inc_beta(0.0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(reg_inc_beta(1.0, 1.0, 1.5), std::domain_error);

  SUBCASE("monotone and matches density quadrature on a 20-point grid") {
    const double a = 2.5, b = 1.5;
    const double norm = std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double u = i / 21.0;
      const double got = reg_inc_beta(a, b, u);
      const double want = oracle::interval(
          [&](double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1) / norm; }, 0.0, u,
          a);
      CHECK(std::abs(got - want) < 1e-9);
      CHECK(got >= prev);
      prev = got;
    }
  }
}

TEST_CASE("reg_inc_gamma") {
  CHECK(rel_err(reg_inc_gamma(1.0, 1.0), 1.0 - std::exp(-1.0)) < 1e-14);
  CHECK(reg_inc_gamma(2.0, 0.0) == 0.0);
  CHECK(rel_err(reg_inc_gamma(0.7, 2.3), oracle::kGammaP_0_7_2_3) < 1e-13);
  CHECK(reg_inc_gamma(0.7, 2.3) + reg_inc_gamma_upper(0.7, 2.3) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(reg_inc_gamma(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(reg_inc_gamma(1.0, -1.0), std::domain_error);

  SUBCASE("monotone and matches density quadrature on a 20-point grid") {
    const double p = 0.7;
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double z = 0.4 * i;
      const double got = reg_inc_gamma(p, z);
      const double want = oracle::interval(
          [&](double t) { return std::pow(t, p - 1) * std::exp(-t - log_gamma(p)); }, 0.0, z, p);
      CHECK(std::abs(got - want) < 1e-9);
      CHECK(got >= prev);
      prev = got;
    }
  }
}

TEST_CASE("kummer_m") {
  CHECK(kummer_m(2.3, 1.7, 0.0) == 1.0);
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.5 * i;
    CHECK(rel_err(kummer_m(1.0, 1.0, t), std::exp(t)) < 1e-10);
  }
  CHECK(rel_err(kummer_m(2.5, 0.5, 3.0), oracle::kM_2_5_0_5_3) < 1e-12);
  CHECK(rel_err(kummer_m(2.5, 0.5, -30.0), oracle::kM_2_5_0_5_m30) < 1e-10);
  CHECK(rel_err(kummer_m(1.3, -1.5, 40.0), oracle::kM_1_3_m1_5_40) < 1e-10);
  CHECK_THROWS_AS(kummer_m(1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kummer_m(1.0, -2.0, 1.0), std::domain_error);

  SUBCASE("term-by-term oracle") {
    // Plain summation in long double is adequate for moderate positive t.
    auto series = [](double a, double b, double t) {
      long double term = 1.0L, sum = 1.0L;
      for (int k = 0; k < 400; ++k) {
        term *= (a + k) * static_cast<long double>(t) / ((b + k) * (k + 1));
        sum += term;
      }
      return static_cast<double>(sum);
    };
    for (double t : {0.3, 2.0, 7.5, 15.0}) {
      CHECK(rel_err(kummer_m(1.7, 0.4, t), series(1.7, 0.4, t)) < 1e-12);
      CHECK(rel_err(kummer_m(3.0, 2.0, t), series(3.0, 2.0, t)) < 1e-12);
    }
  }
}

TEST_CASE("tricomi_u") {
  CHECK(rel_err(tricomi_u(1.0, 1.0, 1.0), oracle::kU_1_1_1) < 1e-12);
  CHECK(rel_err(tricomi_u(1.0, 2.0, 1.0), 1.0) < 1e-12);
  CHECK(rel_err(tricomi_u(2.0, 0.5, 3.0), oracle::kU_2_0_5_3) < 1e-10);
  CHECK(rel_err(tricomi_u(3.7, -20.0, 1e-3), oracle::kU_3_7_m20_1em3) < 1e-9);
  CHECK(rel_err(tricomi_u(3.7, 20.0, 1e3), oracle::kU_3_7_20_1e3) < 1e-9);
  CHECK(rel_err(tricomi_u(50.0, -50.0, 0.5), oracle::kU_50_m50_0_5) < 1e-9);
  CHECK(rel_err(tricomi_u(0.3, 2.2, 0.01), oracle::kU_0_3_2_2_0_01) < 1e-9);
  CHECK(rel_err(std::exp(log_tricomi_u(2.0, 0.5, 3.0)), oracle::kU_2_0_5_3) < 1e-10);
  CHECK_THROWS_AS(tricomi_u(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(tricomi_u(1.0, 1.0, 0.0), std::domain_error);

  SUBCASE("independent Gauss-Legendre quadrature of e^{-x}/(1+x)") {
    const double ref = oracle::halfline([](double x) { return std::exp(-x) / (1 + x); });
    CHECK(std::abs(tricomi_u(1.0, 1.0, 1.0) - ref) < 1e-9);
  }

  SUBCASE("decreasing in t") {
    double prev = tricomi_u(2.0, 0.0, 0.1);
    for (double t = 0.2; t < 30.0; t *= 1.3) {
      const double u = tricomi_u(2.0, 0.0, t);
      CHECK(u < prev);
      prev = u;
    }
  }
}

TEST_CASE("confluent ODE residual for U and M") {
  // t w'' + (b - t) w' - a w = 0, central differences.
  auto residual = [](auto&& w, double a, double b, double t) {
    const double h = 1e-4 * std::max(1.0, t);
    const double f0 = w(t), fp = w(t + h), fm = w(t - h);
    const double d1 = (fp - fm) / (2 * h);
    const double d2 = (fp - 2 * f0 + fm) / (h * h);
    return std::abs(t * d2 + (b - t) * d1 - a * f0) / (std::abs(f0) * (1 + t));
  };
  for (double p : {0.5, 2.5}) {
    for (double q : {0.3, 1.0, 4.0}) {
      const double a = 1 + q, b = 1 - p;
      for (double t : {0.5, 2.0, 7.0, 20.0}) {
        CHECK(residual([&](double x) { return tricomi_u(a, b, x); }, a, b, t) < 1e-5);
        CHECK(residual([&](double x) { return kummer_m(a, b, x); }, a, b, t) < 1e-5);
      }
    }
  }
}

TEST_CASE("integrate_halfline") {
  const QuadratureConfig cfg;
  CHECK(integrate_halfline([](double x) { return std::exp(-x); }, cfg).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_halfline([](double x) { return x * std::exp(-x); }, cfg).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  auto f = [](double x) { return std::pow(x, 1.2) * std::exp(-2 * x) * std::pow(1 + x, -3); };
  const auto r = integrate_halfline(f, cfg);
  CHECK(rel_err(r.value, oracle::kHalflineExample) < 1e-10);
  CHECK(rel_err(oracle::halfline(f, 2.2), oracle::kHalflineExample) < 1e-12);

  SUBCASE("integrable singularity at 0") {
    auto g = [](double x) { return std::pow(x, -0.5) * std::exp(-x); };
    CHECK(rel_err(integrate_halfline(g, cfg).value, std::sqrt(std::numbers::pi)) < 1e-10);
  }

  SUBCASE("deterministic") {
    const auto again = integrate_halfline(f, cfg);
    CHECK(again.value == r.value);
    CHECK(again.error == r.error);
  }

  SUBCASE("errors") {
    QuadratureConfig bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(integrate_halfline(f, bad), std::invalid_argument);
    bad = QuadratureConfig{};
    bad.max_refinements = 0;
    CHECK_THROWS_AS(integrate_halfline(f, bad), std::invalid_argument);
    QuadratureConfig tight;
    tight.max_refinements = 1;
    CHECK_THROWS_AS(integrate_halfline(f, tight), NonConvergence);
    CHECK_THROWS_AS(integrate_halfline([](double) { return std::nan(""); }, cfg),
                    NonConvergence);
  }
}

TEST_CASE("integrate_interval") {
  const QuadratureConfig cfg;
  CHECK(integrate_interval([](double x) { return x * x; }, 0.0, 3.0, cfg).value ==
        doctest::Approx(9.0).epsilon(1e-13));
  CHECK(integrate_interval([](double x) { return x; }, 2.0, 2.0, cfg).value == 0.0);
  CHECK_THROWS_AS(integrate_interval([](double x) { return x; }, 1.0, 0.0, cfg),
                  std::invalid_argument);
}
