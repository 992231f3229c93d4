#include <doctest.h>

#include "kvreg/verify.hpp"
#include "oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace kvreg;
using oracle::rel_err;

TEST_CASE("simulate_pairs") {
  SimulationConfig cfg;
  cfg.n = 20000;
  const auto s = simulate_pairs({2, 1, 1}, cfg);
  CHECK(s.size() == 20000);
  CHECK_NOTHROW(validate_pair_sample(s));
  CHECK(s.provenance.x_source == XSource::kummer);
  CHECK(s.provenance.seed == 42);
  CHECK(s.provenance.y_law.shape == 1.0);

  SUBCASE("deterministic per (seed, streams)") {
    const auto again = simulate_pairs({2, 1, 1}, cfg);
    CHECK(again.u == s.u);
    CHECK(again.v == s.v);
    cfg.streams = 4;
    const auto split = simulate_pairs({2, 1, 1}, cfg);
    CHECK(split.u != s.u);
    CHECK(simulate_pairs({2, 1, 1}, cfg).u == split.u);
    cfg.seed = 43;
    CHECK(simulate_pairs({2, 1, 1}, cfg).u != split.u);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(simulate_pairs({2, 0, 1}, cfg), std::domain_error);
    cfg.n = 0;
    CHECK_THROWS_AS(simulate_pairs({2, 1, 1}, cfg), std::invalid_argument);
    cfg.n = 3;
    cfg.streams = 4;
    CHECK_THROWS_AS(simulate_pairs({2, 1, 1}, cfg), std::invalid_argument);
  }

  SUBCASE("gamma control shares the Y stream") {
    const auto c = simulate_gamma_control({2, 1}, {1, 1}, cfg);
    CHECK(c.provenance.x_source == XSource::gamma);
    CHECK(c.y == s.y);
    CHECK_NOTHROW(validate_pair_sample(c));
  }
}

TEST_CASE("law of V: convolution of the inputs against K(a+b, -b, c)") {
  // f_V(v) = int_0^v f_X(x) f_Y(v - x) dx, by the test's own quadrature.
  for (const KummerParams p : {KummerParams{2, 1, 1}, KummerParams{1.5, 2.5, 0.7}}) {
    const KummerLaw x_law(p);
    const GammaLaw y_law({p.b, p.c});
    const KummerLaw v_law(kv_output_laws(p).second);
    for (double v : {0.2, 1.0, 3.0, 8.0}) {
      // Split at v/2 so each endpoint singularity gets its own substitution.
      auto f = [&](double x) { return x_law.pdf(x) * y_law.pdf(v - x); };
      auto g = [&](double t) { return f(v - t); };
      const double conv = oracle::interval(f, 0.0, 0.5 * v, p.a) +
                          oracle::interval(g, 0.0, 0.5 * v, p.b);
      CHECK(rel_err(conv, v_law.pdf(v)) < 1e-9);
    }
  }
}

TEST_CASE("independence: positive pipeline and negative control") {
  SimulationConfig cfg;
  const auto pos = run_forward_property({2, 1, 1}, cfg);
  CHECK(pos.n == 100000);
  CHECK(pos.chi2.dof == 81);
  CHECK(pos.pass);
  CHECK(pos.chi2.p_value > 0.01);
  CHECK(pos.ks_u.p_value > 0.01);
  CHECK(pos.ks_v.p_value > 0.01);

  const auto ctl_sample = simulate_gamma_control({2, 1}, {1, 1}, cfg);
  const auto neg = independence_from_sample(ctl_sample, {2, 1, 1}, 10);
  CHECK(neg.chi2.p_value < 1e-3);
  CHECK_FALSE(neg.pass);

  cfg.n = 500;
  CHECK_THROWS_AS(run_forward_property({2, 1, 1}, cfg), std::invalid_argument);
}

TEST_CASE("regression constancy") {
  SimulationConfig cfg;
  cfg.n = 1000000;
  const auto r = run_regression_check({3, 2, 1}, cfg);
  CHECK(r.counts.size() == 50);
  CHECK(r.bin_lo.size() == 50);
  for (std::size_t b = 0; b + 1 < r.counts.size(); ++b) CHECK(r.bin_hi[b] <= r.bin_lo[b + 1]);
  CHECK(rel_err(r.alpha_quadrature, 0.6) < 1e-9);
  CHECK(rel_err(r.beta_quadrature, 2.0) < 1e-9);
  CHECK(*r.target("u").theory == doctest::Approx(0.6));
  CHECK(*r.target("inv_u").theory == doctest::Approx(2.0));
  CHECK(*r.target("u").max_abs_z < 4.0);
  CHECK(*r.target("inv_u").max_abs_z < 4.0);
  CHECK(r.target("u").slope.p_value > 0.01);
  CHECK(r.target("inv_u").slope.p_value > 0.01);
  CHECK(r.pass);
  // Targets without a closed-form constant carry no theory value.
  CHECK_FALSE(r.target("one_minus_u").theory.has_value());
  CHECK(r.target("one_minus_u").global.mean == doctest::Approx(0.4).epsilon(0.01));
  CHECK(r.target("one_minus_u_sq").mean.size() == 50);
  // Pointwise 1/U <= 1 + 1/X carries over to the means.
  CHECK(r.mean_inv_u <= r.mean_one_plus_inv_x);
  CHECK_THROWS_AS(r.target("nope"), std::out_of_range);
}

TEST_CASE("regression: negative control is not flat") {
  SimulationConfig cfg;
  cfg.n = 1000000;
  const auto ctl = simulate_gamma_control({2, 1}, {1, 1}, cfg);
  const auto rc = regression_from_sample(ctl, std::nullopt);
  CHECK(std::min(rc.target("u").slope.p_value, rc.target("inv_u").slope.p_value) < 1e-3);
}

TEST_CASE("regression: errors") {
  SimulationConfig cfg;
  CHECK_THROWS_AS(run_regression_check({0.5, 1, 1}, cfg), std::domain_error);
  cfg.n = 1000;
  CHECK_THROWS_AS(run_regression_check({2, 1, 1}, cfg), BinUnderflow);
}

TEST_CASE("regression identities") {
  const std::vector<double> s{-0.1, -0.5, -1, -2, -5};
  for (const KummerParams p : {KummerParams{2, 1, 1}, KummerParams{3, 2, 0.5}}) {
    const auto r = check_regression_identities(p, s);
    CHECK(r.pass());
    CHECK(r.equation("mean_u_identity").max_rel <= 1e-8);
    CHECK(r.equation("mean_inv_u_identity").max_rel <= 1e-8);
    CHECK(r.equation("mean_inv_u_identity_at_zero").max_rel <= 1e-8);
  }
  CHECK_THROWS_AS(check_regression_identities({1, 1, 1}, s), std::domain_error);
}

TEST_CASE("transform identities") {
  const auto grid = linear_grid(-5.0, -0.1, 20);
  CHECK(grid.size() == 20);
  CHECK(grid.front() == -5.0);
  CHECK(grid.back() == doctest::Approx(-0.1));
  for (const KummerParams p : {KummerParams{2, 1, 1}, KummerParams{3, 2, 0.5}}) {
    const auto r = check_transform_identities(p, grid);
    CHECK(r.pass());
    for (const char* name : {"laplace_u", "laplace_inv_u", "laplace_combined", "L_quadrature_eq_tricomi"}) {
      CAPTURE(name);
      CHECK(r.equation(name).max_rel <= 1e-7);
    }
    CHECK(r.equation("G_prime_eq_L").max_rel <= 1e-6);
    CHECK(r.equation("exp_neg_s_K_prime_eq_L").max_rel <= 1e-6);
  }
  const std::vector<double> bad{-1.0, 0.0};
  CHECK_THROWS_AS(check_transform_identities({2, 1, 1}, bad), std::domain_error);
}

TEST_CASE("gamma ODE") {
  const auto grid = linear_grid(-5.0, -0.1, 20);
  const auto r = check_gamma_ode({1.0, 1.0}, grid, {2.0 / 3.0, 2.0});
  CHECK(r.pass());
  CHECK(r.equation("gamma_ode").max_rel <= 1e-12);
  // p = 2.5: alpha, beta with params_from_constants -> b = 2.5.
  const auto rc = constants_from_params(3.0, 2.5);
  const auto r2 = check_gamma_ode({2.5, 0.3}, grid, rc);
  CHECK(r2.pass());
  CHECK(r2.equation("gamma_ode").max_rel <= 1e-10);
  CHECK_THROWS_AS(check_gamma_ode({2.0, 1.0}, grid, {2.0 / 3.0, 2.0}), std::domain_error);
}

TEST_CASE("Kummer Laplace ODE") {
  auto grid = linear_grid(-5.0, -0.1, 20);
  grid.push_back(0.0);
  for (const KummerParams p : {KummerParams{2, 1, 1}, KummerParams{3, 2, 1}}) {
    const auto r = check_kummer_ode(p, grid);
    CHECK(r.pass());
    CHECK(r.equation("kummer_laplace_ode").max_rel <= 1e-5);
    CHECK(r.equation("kummer_laplace_ode_boundary").max_rel <= 1e-4);
  }
  const std::vector<double> bad{0.5};
  CHECK_THROWS_AS(check_kummer_ode({2, 1, 1}, bad), std::domain_error);
}

TEST_CASE("confluent ODEs and growth") {
  const std::vector<double> ps{0.5, 1.0, 2.5}, qs{0.3, 1.0, 4.0};
  const auto r = check_confluent_odes(ps, qs, 0.5, 20.0);
  CHECK(r.pass());
  // U at every (p, q); M skips p = 1 where 1 - p = 0.
  CHECK(r.equations.size() == 9 + 6);
  for (const auto& e : r.equations) CHECK(e.max_rel <= 1e-5);
  CHECK(r.checks.size() >= 2);
  CHECK_THROWS_AS(check_confluent_odes(ps, qs, 0.0, 1.0), std::domain_error);
}

TEST_CASE("parameter maps") {
  const auto u = sample_beta({2.0, 1.0}, 1000000, {42, 0});
  const auto r = compare_parameter_maps(u, {2.0, 1.0});
  CHECK(r.pass);
  CHECK(std::abs(r.recovered.a - 2.0) < 0.05);
  CHECK(std::abs(r.recovered.b - 1.0) < 0.05);
  CHECK(r.ab_variant.a == doctest::Approx(1.25).epsilon(0.02));
  CHECK(r.ab_variant_miss_in_se > 10.0);
  CHECK(r.recovered_se.a > 0.0);
}

TEST_CASE("fit_from_sample") {
  SimulationConfig cfg;
  cfg.n = 1000000;
  const auto s = simulate_pairs({2, 1, 1}, cfg);
  const auto f = fit_from_sample(s.u, s.v);
  CHECK(std::abs(f.fitted.a - 2.0) < 0.05);
  CHECK(std::abs(f.fitted.b - 1.0) < 0.05);
  CHECK(std::abs(f.fitted.c - 1.0) < 0.05);
  CHECK(std::abs(f.fitted.a - 2.0) < 4 * f.se_a);
  CHECK(std::abs(f.fitted.b - 1.0) < 4 * f.se_b);
  CHECK(std::abs(f.fitted.c - 1.0) < 4 * f.se_c);
  CHECK(f.ks_u.p_value > 0.01);
  CHECK(f.ks_v.p_value > 0.01);
}

TEST_CASE("fit_from_sample: errors") {
  const std::vector<double> few(100, 0.5);
  CHECK_THROWS_AS(fit_from_sample(few, few), std::domain_error);
  const std::vector<double> flat(20000, 0.5), v(20000, 1.0);
  CHECK_THROWS_AS(fit_from_sample(flat, v), std::domain_error);
  SimulationConfig cfg;
  cfg.n = 20000;
  const auto s = simulate_pairs({2, 1, 1}, cfg);
  const std::vector<double> tiny(20000, 1e-9);
  CHECK_THROWS_AS(fit_from_sample(s.u, tiny), RootBracketError);
  CHECK_THROWS_AS(fit_from_sample(s.u, std::vector<double>(5)), std::invalid_argument);
}
