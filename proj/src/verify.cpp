#include "kvreg/verify.hpp"

#include "kvreg/specfun.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

namespace kvreg {

// ---------------------------------------------------------------------------
// Simulation

namespace {

template <class XLaw>
PairSample simulate_with(const XLaw& x_law, const GammaLaw& y_law,
                         const SimulationConfig& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("simulation: n must be at least 1");
  if (cfg.streams == 0 || cfg.streams > cfg.n) {
    throw std::invalid_argument("simulation: need 1 <= streams <= n");
  }
  PairSample s;
  s.x.resize(cfg.n);
  s.y.resize(cfg.n);
  s.u.resize(cfg.n);
  s.v.resize(cfg.n);

  auto fill_chunk = [&](std::uint64_t j) {
    const std::size_t begin = static_cast<std::size_t>(j * cfg.n / cfg.streams);
    const std::size_t end = static_cast<std::size_t>((j + 1) * cfg.n / cfg.streams);
    Generator gx(RngStream{cfg.seed, 2 * j});
    Generator gy(RngStream{cfg.seed, 2 * j + 1});
    for (std::size_t i = begin; i < end; ++i) {
      const double x = x_law.draw(gx);
      const double y = y_law.draw(gy);
      const auto uv = kv_forward(x, y);
      s.x[i] = x;
      s.y[i] = y;
      s.u[i] = uv.u;
      s.v[i] = uv.v;
    }
  };

  if (cfg.streams == 1) {
    fill_chunk(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(cfg.streams);
    for (std::uint64_t j = 0; j < cfg.streams; ++j) workers.emplace_back(fill_chunk, j);
  }
  s.provenance.y_law = y_law.params();
  s.provenance.seed = cfg.seed;
  s.provenance.streams = cfg.streams;
  return s;
}

}  // namespace

PairSample simulate_pairs(const KummerParams& x_law, const SimulationConfig& cfg) {
  if (!(x_law.b > 0.0)) {
    throw std::domain_error("simulate_pairs: Kummer b must be positive (it is the gamma shape)");
  }
  auto s = simulate_with(KummerLaw(x_law), GammaLaw({x_law.b, x_law.c}), cfg);
  s.provenance.x_source = XSource::kummer;
  s.provenance.x_kummer = x_law;
  return s;
}

PairSample simulate_gamma_control(const GammaParams& x_law, const GammaParams& y_law,
                                  const SimulationConfig& cfg) {
  auto s = simulate_with(GammaLaw(x_law), GammaLaw(y_law), cfg);
  s.provenance.x_source = XSource::gamma;
  s.provenance.x_gamma = x_law;
  return s;
}

// ---------------------------------------------------------------------------
// Independence

IndependenceReport independence_from_sample(const PairSample& sample,
                                            const KummerParams& reference, int k_bins,
                                            double level) {
  const std::size_t n = sample.size();
  if (k_bins < 2) throw std::invalid_argument("independence: need at least 2 bins");
  if (n < 10 * static_cast<std::size_t>(k_bins * k_bins)) {
    throw std::invalid_argument("independence: need n >= 10 k^2");
  }
  const auto [u_law_p, v_law_p] = kv_output_laws(reference);
  const BetaLaw u_law(u_law_p);
  const KummerLaw v_law(v_law_p);

  IndependenceReport r;
  r.n = n;
  r.reference = reference;
  r.control = sample.provenance.x_source != XSource::kummer;
  r.level = level;
  r.chi2 = stats::rank_independence(sample.u, sample.v, k_bins);
  r.ks_u = stats::ks_test(sample.u, [&](double u) { return u_law.cdf(u); });

  std::vector<double> v_sorted = sample.v;
  std::sort(v_sorted.begin(), v_sorted.end());
  r.ks_v = stats::ks_from_sorted_cdf(v_law.cdf_sorted(v_sorted));

  r.pass = r.chi2.p_value > level && r.ks_u.p_value > level && r.ks_v.p_value > level;
  return r;
}

IndependenceReport run_forward_property(const KummerParams& p, const SimulationConfig& cfg,
                                        int k_bins, double level) {
  p.validate();
  if (cfg.n < 10 * static_cast<std::size_t>(k_bins * k_bins)) {
    throw std::invalid_argument("run_forward_property: need n >= 10 k^2");
  }
  return independence_from_sample(simulate_pairs(p, cfg), p, k_bins, level);
}

// ---------------------------------------------------------------------------
// Regression constancy

const RegressionTarget& RegressionReport::target(const std::string& name) const {
  for (const auto& t : targets) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("regression report has no target " + name);
}

namespace {

// E U and E 1/U under Beta(a, b) by quadrature of the density.
std::pair<double, double> beta_moments_by_quadrature(double a, double b) {
  const BetaLaw law({a, b});
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-14;
  const double m1 =
      integrate_interval([&](double u) { return u * law.pdf(u); }, 0.0, 1.0, cfg).value;
  const double minv =
      integrate_interval([&](double u) { return law.pdf(u) / u; }, 0.0, 1.0, cfg).value;
  return {m1, minv};
}

}  // namespace

RegressionReport regression_from_sample(const PairSample& sample,
                                        std::optional<RegressionConstants> theory,
                                        int q_bins, std::size_t min_bin_count,
                                        double level) {
  const std::size_t n = sample.size();
  if (q_bins < 3) throw std::invalid_argument("regression: need at least 3 bins");
  const std::size_t bins = static_cast<std::size_t>(q_bins);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sample.v[i] < sample.v[j]; });

  RegressionReport r;
  r.n = n;
  r.min_bin_count = min_bin_count;
  r.level = level;

  const std::array<std::string, 4> names = {"u", "inv_u", "one_minus_u", "one_minus_u_sq"};
  r.targets.resize(names.size());
  for (std::size_t t = 0; t < names.size(); ++t) r.targets[t].name = names[t];
  auto transform_u = [](std::size_t t, double u) {
    switch (t) {
      case 0: return u;
      case 1: return 1.0 / u;
      case 2: return 1.0 - u;
      default: return (1.0 - u) * (1.0 - u);
    }
  };

  std::vector<double> buffer;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t begin = b * n / bins;
    const std::size_t end = (b + 1) * n / bins;
    const std::size_t count = end - begin;
    if (count < min_bin_count || count < 2) {
      throw BinUnderflow("regression: bin " + std::to_string(b) + " has " +
                         std::to_string(count) + " points, fewer than " +
                         std::to_string(min_bin_count));
    }
    r.counts.push_back(count);
    r.bin_lo.push_back(sample.v[order[begin]]);
    r.bin_hi.push_back(sample.v[order[end - 1]]);
    double v_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) v_sum += sample.v[order[i]];
    r.bin_center.push_back(v_sum / static_cast<double>(count));
    for (std::size_t t = 0; t < names.size(); ++t) {
      buffer.clear();
      for (std::size_t i = begin; i < end; ++i) buffer.push_back(transform_u(t, sample.u[order[i]]));
      const auto ms = stats::mean_and_se(buffer);
      r.targets[t].mean.push_back(ms.mean);
      r.targets[t].se.push_back(ms.se);
    }
  }

  for (std::size_t t = 0; t < names.size(); ++t) {
    buffer.clear();
    for (double u : sample.u) buffer.push_back(transform_u(t, u));
    r.targets[t].global = stats::mean_and_se(buffer);
    r.targets[t].slope =
        stats::weighted_slope_test(r.bin_center, r.targets[t].mean, r.targets[t].se);
  }

  if (theory) {
    theory->validate();
    r.targets[0].theory = theory->alpha;
    r.targets[1].theory = theory->beta;
    for (std::size_t t = 0; t < 2; ++t) {
      auto& tg = r.targets[t];
      double worst = 0.0;
      for (std::size_t b = 0; b < bins; ++b) {
        worst = std::max(worst, std::abs(tg.mean[b] - *tg.theory) / tg.se[b]);
      }
      tg.max_abs_z = worst;
    }
    r.pass = *r.targets[0].max_abs_z <= r.z_limit && *r.targets[1].max_abs_z <= r.z_limit &&
             r.targets[0].slope.p_value > level && r.targets[1].slope.p_value > level;
  }

  double inv_u = 0.0, bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    inv_u += 1.0 / sample.u[i];
    bound += 1.0 + 1.0 / sample.x[i];
  }
  r.mean_inv_u = inv_u / static_cast<double>(n);
  r.mean_one_plus_inv_x = bound / static_cast<double>(n);
  return r;
}

RegressionReport run_regression_check(const KummerParams& p, const SimulationConfig& cfg,
                                      int q_bins, std::size_t min_bin_count, double level) {
  p.validate();
  const auto rc = constants_from_params(p.a, p.b);  // a > 1, b > 0
  const auto [alpha_q, beta_q] = beta_moments_by_quadrature(p.a, p.b);
  if (std::abs(alpha_q - rc.alpha) > 1e-9 * rc.alpha ||
      std::abs(beta_q - rc.beta) > 1e-8 * rc.beta) {
    throw std::logic_error("regression: closed-form constants disagree with quadrature");
  }
  auto r = regression_from_sample(simulate_pairs(p, cfg), rc, q_bins, min_bin_count, level);
  r.alpha_quadrature = alpha_q;
  r.beta_quadrature = beta_q;
  return r;
}

// ---------------------------------------------------------------------------
// Residual checks

bool ResidualReport::pass() const {
  return std::all_of(equations.begin(), equations.end(), [](const auto& e) { return e.pass; }) &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const EquationResidual& ResidualReport::equation(const std::string& name) const {
  for (const auto& e : equations) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("residual report has no equation " + name);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count < 2) return {lo};
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  g.back() = hi;
  return g;
}

namespace {

class ResidualBuilder {
 public:
  ResidualBuilder(std::string name, double tolerance) {
    eq_.name = std::move(name);
    eq_.tolerance = tolerance;
  }

  // Relative to the larger side.
  void add(double s, double lhs, double rhs) {
    add_scaled(s, lhs, rhs, std::max(std::abs(lhs), std::abs(rhs)));
  }

  void add_scaled(double s, double lhs, double rhs, double scale) {
    eq_.s.push_back(s);
    eq_.lhs.push_back(lhs);
    eq_.rhs.push_back(rhs);
    const double diff = std::abs(lhs - rhs);
    eq_.rel.push_back(scale > 0.0 ? diff / scale : diff);
  }

  EquationResidual finish() {
    if (!eq_.rel.empty()) {
      eq_.max_rel = *std::max_element(eq_.rel.begin(), eq_.rel.end());
      eq_.mean_rel = std::accumulate(eq_.rel.begin(), eq_.rel.end(), 0.0) /
                     static_cast<double>(eq_.rel.size());
    }
    eq_.pass = !eq_.rel.empty() && std::isfinite(eq_.max_rel) && eq_.max_rel <= eq_.tolerance;
    return std::move(eq_);
  }

 private:
  EquationResidual eq_;
};

QuadratureConfig tight_config() {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-12;
  return cfg;
}

// E h(X) under a Kummer law.
template <class H>
double expect_kummer(const KummerLaw& law, const H& h) {
  return integrate_halfline([&](double x) { return law.pdf(x) * h(x); }, tight_config(),
                            law.mean())
      .value;
}

// E g(X, Y) for independent X ~ Kummer, Y ~ gamma. X is the inner variable:
// with a > 1 its density vanishes at 0, which tames the 1/X and 1/(X+Y)
// factors for small Y.
template <class G>
double expect_product(const KummerLaw& xl, const GammaLaw& yl, const G& g) {
  QuadratureConfig inner_cfg = tight_config();
  QuadratureConfig outer_cfg = tight_config();
  outer_cfg.rel_tol = 1e-11;
  const double x_scale = xl.mean();
  auto inner = [&](double y) {
    return integrate_halfline([&](double x) { return xl.pdf(x) * g(x, y); }, inner_cfg, x_scale)
        .value;
  };
  return integrate_halfline([&](double y) { return yl.pdf(y) * inner(y); }, outer_cfg,
                            yl.mean())
      .value;
}

void require_identity_setting(const KummerParams& p, const char* who) {
  p.validate();
  if (!(p.a > 1.0) || !(p.b > 0.0)) {
    throw std::domain_error(std::string(who) + ": need a > 1 (E 1/X < inf) and b > 0");
  }
}

void require_negative(std::span<const double> grid, const char* who) {
  for (double s : grid) {
    if (!(s < 0.0)) throw std::domain_error(std::string(who) + ": grid must be strictly negative");
  }
}

}  // namespace

ResidualReport check_regression_identities(const KummerParams& p,
                                           std::span<const double> s_grid,
                                           double tolerance) {
  require_identity_setting(p, "check_regression_identities");
  require_negative(s_grid, "check_regression_identities");
  const auto rc = constants_from_params(p.a, p.b);
  const KummerLaw xl(p);
  const GammaLaw yl({p.b, p.c});

  ResidualBuilder eq1("mean_u_identity", tolerance), eq2("mean_inv_u_identity", tolerance);
  for (double s : s_grid) {
    const double lhs1 = expect_product(
        xl, yl, [s](double x, double y) { return std::exp(s * (1.0 + x + y)) / (1.0 + x); });
    const double e1 = expect_product(
        xl, yl, [s](double x, double y) { return std::exp(s * (1.0 + x + y)); });
    const double e1v = expect_product(xl, yl, [s](double x, double y) {
      return std::exp(s * (1.0 + x + y)) / (1.0 + x + y);
    });
    eq1.add(s, lhs1, (1.0 - rc.alpha) * e1 + rc.alpha * e1v);

    const double lhs2 =
        expect_product(xl, yl, [s](double x, double y) { return std::exp(s * (x + y)) / x; });
    const double e2 = expect_product(xl, yl, [s](double x, double y) { return std::exp(s * (x + y)); });
    const double e2v = expect_product(
        xl, yl, [s](double x, double y) { return std::exp(s * (x + y)) / (x + y); });
    eq2.add(s, lhs2, (rc.beta - 1.0) * e2 + rc.beta * e2v);
  }

  ResidualBuilder eq2_zero("mean_inv_u_identity_at_zero", tolerance);
  const double inv_x = expect_product(xl, yl, [](double x, double) { return 1.0 / x; });
  const double inv_v = expect_product(xl, yl, [](double x, double y) { return 1.0 / (x + y); });
  eq2_zero.add(0.0, inv_x, rc.beta - 1.0 + rc.beta * inv_v);

  ResidualReport r;
  r.equations.push_back(eq1.finish());
  r.equations.push_back(eq2.finish());
  r.equations.push_back(eq2_zero.finish());
  return r;
}

ResidualReport check_transform_identities(const KummerParams& p,
                                          std::span<const double> s_grid,
                                          double quad_tolerance, double fd_tolerance) {
  require_identity_setting(p, "check_transform_identities");
  require_negative(s_grid, "check_transform_identities");
  const auto rc = constants_from_params(p.a, p.b);
  const double big_a = 1.0 / (1.0 - rc.alpha);
  const double big_b = 1.0 / (rc.beta - 1.0);
  const KummerLaw xl(p);
  const GammaLaw yl({p.b, p.c});

  auto k_fn = [&](double s) {
    return expect_kummer(xl, [s](double x) { return std::exp(s * (1.0 + x)) / (1.0 + x); });
  };
  auto g_fn = [&](double s) { return expect_kummer(xl, [s](double x) { return std::exp(s * x) / x; }); };
  auto l_fn = [&](double s) { return expect_kummer(xl, [s](double x) { return std::exp(s * x); }); };
  auto dl_fn = [&](double s) {
    return expect_kummer(xl, [s](double x) { return x * std::exp(s * x); });
  };

  ResidualBuilder eq1("laplace_u", quad_tolerance), eq2("laplace_inv_u", quad_tolerance),
      eq("laplace_combined", quad_tolerance), g_prime("G_prime_eq_L", fd_tolerance),
      k_prime("exp_neg_s_K_prime_eq_L", fd_tolerance),
      laplace_routes("L_quadrature_eq_tricomi", quad_tolerance);

  for (double s : s_grid) {
    const double k = k_fn(s);
    const double g = g_fn(s);
    const double l = l_fn(s);
    const double dl = dl_fn(s);
    const double m = yl.laplace(s);
    const double dm = p.b / p.c * std::pow(1.0 - s / p.c, -p.b - 1.0);
    const double dlm = dl * m + l * dm;
    const double es = std::exp(-s);

    eq1.add(s, es * k * dm, (1.0 - rc.alpha) * dlm);
    eq2.add(s, g * dm, (rc.beta - 1.0) * (dlm + l * m));
    eq.add(s, big_a * es * k * dm, big_b * g * dm - l * m);

    const double h = 1e-4 * std::max(1.0, std::abs(s));
    g_prime.add(s, (g_fn(s + h) - g_fn(s - h)) / (2.0 * h), l);
    k_prime.add(s, es * (k_fn(s + h) - k_fn(s - h)) / (2.0 * h), l);
    laplace_routes.add(s, l, xl.laplace(s));
  }

  ResidualReport r;
  r.equations.push_back(eq1.finish());
  r.equations.push_back(eq2.finish());
  r.equations.push_back(eq.finish());
  r.equations.push_back(g_prime.finish());
  r.equations.push_back(k_prime.finish());
  r.equations.push_back(laplace_routes.finish());
  return r;
}

ResidualReport check_gamma_ode(const GammaParams& g, std::span<const double> s_grid,
                               const RegressionConstants& rc, double tolerance) {
  g.validate();
  require_negative(s_grid, "check_gamma_ode");
  const auto shapes = params_from_constants(rc);
  const double p = shapes.b;
  if (std::abs(g.shape - p) > 1e-9 * p) {
    throw std::domain_error("check_gamma_ode: gamma shape must equal p = " + std::to_string(p));
  }
  const double c = g.rate;
  const double big_a = 1.0 / (1.0 - rc.alpha);
  const double big_b = 1.0 / (rc.beta - 1.0);

  ResidualBuilder ode("gamma_ode", tolerance);
  for (double s : s_grid) {
    const double base = 1.0 - s / c;
    const double m = std::pow(base, -p);
    const double dm = p / c * std::pow(base, -p - 1.0);
    const double d2m = p * (p + 1.0) / (c * c) * std::pow(base, -p - 2.0);
    ode.add(s, m * d2m, (big_a - big_b) * dm * dm);
  }
  ResidualBuilder ident("a_minus_b_eq_1_plus_inv_p", tolerance);
  ident.add(0.0, big_a - big_b, 1.0 + 1.0 / p);

  ResidualReport r;
  r.equations.push_back(ode.finish());
  r.equations.push_back(ident.finish());
  return r;
}

ResidualReport check_kummer_ode(const KummerParams& kp, std::span<const double> s_grid,
                                double tolerance, double boundary_tolerance) {
  kp.validate();
  const KummerLaw law(kp);
  const double a = kp.a;
  const double p = kp.b;
  const double c = kp.c;

  ResidualBuilder interior("kummer_laplace_ode", tolerance);
  ResidualBuilder boundary("kummer_laplace_ode_boundary", boundary_tolerance);
  for (double s : s_grid) {
    if (s > 0.0) throw std::domain_error("check_kummer_ode: grid must satisfy s <= 0");
    const double h = 1e-4 * std::max(1.0, c - s);
    const double l0 = law.laplace(s);
    double d1, d2;
    const bool one_sided = s + h > 0.0;
    if (one_sided) {
      const double l1 = law.laplace(s - h);
      const double l2 = law.laplace(s - 2.0 * h);
      const double l3 = law.laplace(s - 3.0 * h);
      d1 = (3.0 * l0 - 4.0 * l1 + l2) / (2.0 * h);
      d2 = (2.0 * l0 - 5.0 * l1 + 4.0 * l2 - l3) / (h * h);
    } else {
      const double lp = law.laplace(s + h);
      const double lm = law.laplace(s - h);
      d1 = (lp - lm) / (2.0 * h);
      d2 = (lp - 2.0 * l0 + lm) / (h * h);
    }
    const double lhs = (c - s) * d2 + (c - s + p - 1.0) * d1;
    const double rhs = a * l0;
    (one_sided ? boundary : interior).add_scaled(s, lhs, rhs, std::abs(l0));
  }

  ResidualReport r;
  auto in = interior.finish();
  auto bd = boundary.finish();
  if (!in.s.empty()) r.equations.push_back(std::move(in));
  if (!bd.s.empty()) r.equations.push_back(std::move(bd));
  return r;
}

namespace {

bool nonpositive_integer(double b) {
  return b <= 1e-12 && std::abs(b - std::round(b)) <= 1e-12;
}

std::string grid_label(const char* fn, double p, double q) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s[p=%g,bp=%g]", fn, p, q);
  return buf;
}

}  // namespace

ResidualReport check_confluent_odes(std::span<const double> p_values,
                                    std::span<const double> q_values, double t_lo,
                                    double t_hi, std::size_t points, double tolerance) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
    throw std::domain_error("check_confluent_odes: need 0 < t_lo < t_hi");
  }
  const auto t_grid = linear_grid(t_lo, t_hi, points);
  const auto growth_grid = linear_grid(5.0, 60.0, 56);
  ResidualReport r;

  auto residual_of = [&](const char* label, double p, double q, auto&& fn) {
    const double a = 1.0 + q;
    const double b = 1.0 - p;
    ResidualBuilder rb(grid_label(label, p, q), tolerance);
    for (double t : t_grid) {
      const double h = 1e-4 * std::max(1.0, t);
      const double n0 = fn(a, b, t);
      const double np = fn(a, b, t + h);
      const double nm = fn(a, b, t - h);
      const double d1 = (np - nm) / (2.0 * h);
      const double d2 = (np - 2.0 * n0 + nm) / (h * h);
      rb.add_scaled(t, t * d2 + (b - t) * d1, a * n0, std::abs(n0) * (1.0 + t));
    }
    r.equations.push_back(rb.finish());
  };

  for (double p : p_values) {
    for (double q : q_values) {
      residual_of("tricomi_u_ode", p, q, [](double a, double b, double t) { return tricomi_u(a, b, t); });
      bool u_decreasing = true;
      double prev = tricomi_u(1.0 + q, 1.0 - p, growth_grid.front());
      for (std::size_t i = 1; i < growth_grid.size(); ++i) {
        const double cur = tricomi_u(1.0 + q, 1.0 - p, growth_grid[i]);
        u_decreasing = u_decreasing && cur < prev;
        prev = cur;
      }
      r.checks.push_back({grid_label("tricomi_u_decreasing", p, q), u_decreasing});

      if (nonpositive_integer(1.0 - p)) continue;
      residual_of("kummer_m_ode", p, q, [](double a, double b, double t) { return kummer_m(a, b, t); });
      bool m_growing = true;
      prev = kummer_m(1.0 + q, 1.0 - p, growth_grid.front()) * std::exp(-growth_grid.front());
      for (std::size_t i = 1; i < growth_grid.size(); ++i) {
        const double t = growth_grid[i];
        const double cur = kummer_m(1.0 + q, 1.0 - p, t) * std::exp(-t);
        m_growing = m_growing && cur > prev;
        prev = cur;
      }
      r.checks.push_back({grid_label("kummer_m_scaled_increasing", p, q), m_growing});
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Parameter recovery

namespace {

// Sample means and covariance matrix of the given columns.
template <std::size_t K>
struct Moments {
  std::array<double, K> mean{};
  std::array<std::array<double, K>, K> cov{};
};

template <std::size_t K, class Row>
Moments<K> sample_moments(std::size_t n, const Row& row) {
  Moments<K> m;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = row(i);
    for (std::size_t j = 0; j < K; ++j) m.mean[j] += r[j];
  }
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = row(i);
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        m.cov[j][k] += (r[j] - m.mean[j]) * (r[k] - m.mean[k]);
      }
    }
  }
  for (auto& rowc : m.cov) {
    for (auto& v : rowc) v /= static_cast<double>(n - 1);
  }
  return m;
}

// Jacobian of params_from_constants with respect to (alpha, beta):
// rows (a, b), columns (alpha, beta).
std::array<std::array<double, 2>, 2> shape_jacobian(const RegressionConstants& rc) {
  const double al = rc.alpha;
  const double be = rc.beta;
  const double e = al * be - 1.0;
  const double e2 = e * e;
  // a = 1 + (1-al)/e
  const double da_dal = (-e - (1.0 - al) * be) / e2;
  const double da_dbe = -(1.0 - al) * al / e2;
  // b = (1-al)(be-1)/e
  const double db_dal = (-(be - 1.0) * e - (1.0 - al) * (be - 1.0) * be) / e2;
  const double db_dbe = ((1.0 - al) * e - (1.0 - al) * (be - 1.0) * al) / e2;
  return {{{da_dal, da_dbe}, {db_dal, db_dbe}}};
}

double v_mean_model(double a, double b, double c) {
  return KummerLaw({a + b, -b, c}).mean();
}

}  // namespace

ParameterMapReport compare_parameter_maps(std::span<const double> u, ShapePair truth,
                                          double tolerance) {
  const std::size_t n = u.size();
  if (n < 2) throw std::invalid_argument("compare_parameter_maps: need at least 2 values");
  const auto mom = sample_moments<2>(n, [&](std::size_t i) {
    return std::array<double, 2>{u[i], 1.0 / u[i]};
  });
  ParameterMapReport r;
  r.n = n;
  r.truth = truth;
  r.tolerance = tolerance;
  r.measured = {mom.mean[0], mom.mean[1]};
  r.alpha_se = std::sqrt(mom.cov[0][0] / static_cast<double>(n));
  r.beta_se = std::sqrt(mom.cov[1][1] / static_cast<double>(n));
  r.recovered = params_from_constants(r.measured);
  r.ab_variant = params_from_constants_ab_denominator(r.measured);

  const auto jac = shape_jacobian(r.measured);
  auto se_of = [&](const std::array<double, 2>& g) {
    double var = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < 2; ++k) var += g[j] * mom.cov[j][k] * g[k];
    }
    return std::sqrt(var / static_cast<double>(n));
  };
  r.recovered_se = {se_of(jac[0]), se_of(jac[1])};
  r.ab_variant_miss_in_se =
      std::max(std::abs(r.ab_variant.a - truth.a) / r.recovered_se.a,
               std::abs(r.ab_variant.b - truth.b) / r.recovered_se.b);
  r.pass = std::abs(r.recovered.a - truth.a) <= tolerance &&
           std::abs(r.recovered.b - truth.b) <= tolerance && r.ab_variant_miss_in_se > 10.0;
  return r;
}

FitReport fit_from_sample(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = u.size();
  if (v.size() != n) throw std::invalid_argument("fit_from_sample: u and v differ in length");
  if (n < 10000) throw std::domain_error("fit_from_sample: need at least 10^4 rows");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0) || !(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw std::domain_error("fit_from_sample: need 0 < u < 1 and v > 0 in every row");
    }
  }
  const auto mom = sample_moments<3>(n, [&](std::size_t i) {
    return std::array<double, 3>{u[i], 1.0 / u[i], v[i]};
  });
  FitReport r;
  r.n = n;
  r.measured = {mom.mean[0], mom.mean[1]};
  r.mean_v = mom.mean[2];
  if (!(r.measured.alpha * r.measured.beta > 1.0)) {
    throw std::domain_error(
        "fit_from_sample: measured alpha * beta <= 1; the constants admit no Kummer/gamma pair");
  }
  const auto shapes = params_from_constants(r.measured);
  const double a = shapes.a;
  const double b = shapes.b;

  auto gap = [&](double log_c) { return v_mean_model(a, b, std::exp(log_c)) - r.mean_v; };
  double lo = std::log(1e-6), hi = std::log(1e6);
  const double f_lo = gap(lo);
  const double f_hi = gap(hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw RootBracketError("fit_from_sample: mean of v outside the range attainable for c in "
                           "[1e-6, 1e6]");
  }
  std::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      gap, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(45), iters);
  const double c = std::exp(0.5 * (bracket.first + bracket.second));
  r.fitted = {a, b, c};

  // Delta method. c solves h(a, b, c) = mean v, so
  // dc = (d mean_v - h_a da - h_b db) / h_c.
  const double da = 1e-4 * a, db = 1e-4 * b, dc = 1e-4 * c;
  const double h_a = (v_mean_model(a + da, b, c) - v_mean_model(a - da, b, c)) / (2.0 * da);
  const double h_b = (v_mean_model(a, b + db, c) - v_mean_model(a, b - db, c)) / (2.0 * db);
  const double h_c = (v_mean_model(a, b, c + dc) - v_mean_model(a, b, c - dc)) / (2.0 * dc);
  const auto jac_ab = shape_jacobian(r.measured);
  const std::array<double, 3> grad_a{jac_ab[0][0], jac_ab[0][1], 0.0};
  const std::array<double, 3> grad_b{jac_ab[1][0], jac_ab[1][1], 0.0};
  std::array<double, 3> grad_c{};
  for (std::size_t j = 0; j < 2; ++j) grad_c[j] = -(h_a * grad_a[j] + h_b * grad_b[j]) / h_c;
  grad_c[2] = 1.0 / h_c;
  auto se_of = [&](const std::array<double, 3>& g) {
    double var = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) var += g[j] * mom.cov[j][k] * g[k];
    }
    return std::sqrt(var / static_cast<double>(n));
  };
  r.se_a = se_of(grad_a);
  r.se_b = se_of(grad_b);
  r.se_c = se_of(grad_c);

  const auto [u_law_p, v_law_p] = kv_output_laws(r.fitted);
  const BetaLaw u_law(u_law_p);
  const KummerLaw v_law(v_law_p);
  r.ks_u = stats::ks_test(std::vector<double>(u.begin(), u.end()),
                          [&](double x) { return u_law.cdf(x); });
  std::vector<double> v_sorted(v.begin(), v.end());
  std::sort(v_sorted.begin(), v_sorted.end());
  r.ks_v = stats::ks_from_sorted_cdf(v_law.cdf_sorted(v_sorted));
  return r;
}

}  // namespace kvreg
