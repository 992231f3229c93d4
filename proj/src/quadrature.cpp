#include "kvreg/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kvreg {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_refinements < 1) {
    throw std::invalid_argument(
        "QuadratureConfig: abs_tol and rel_tol must be positive and "
        "max_refinements at least 1");
  }
}

namespace {

// Beyond this abscissa the complement 1/(1+exp(pi sinh tau)) drops below
// 1e-270, so nodes further out carry no weight in double precision.
constexpr double kTauMax = 6.0;
// Levels below this are never accepted as converged.
constexpr int kMinLevel = 3;

// g(t, 1-t) on (0,1). The complement is passed separately so that nodes
// clustered at t = 1 keep full relative precision.
template <class G>
QuadratureResult tanh_sinh_unit(const G& g, const QuadratureConfig& cfg) {
  cfg.validate();

  struct Node {
    double small, large, weight;
  };
  auto node_at = [](double tau) {
    const double e = std::exp(std::numbers::pi * std::sinh(tau));
    const double small = 1.0 / (1.0 + e);
    const double large = e / (1.0 + e);
    return Node{small, large, std::numbers::pi * std::cosh(tau) * small * large};
  };

  // Far-tail abscissae can produce inf * 0 for integrands that decay
  // exponentially but are written as products. Trim each side back to the
  // last level-0 abscissa where the integrand is finite.
  auto side_limit = [&](bool right) {
    for (double tau = kTauMax; tau > 0.0; tau -= 1.0) {
      const Node nd = node_at(tau);
      const double v = right ? g(nd.large, nd.small) : g(nd.small, nd.large);
      if (std::isfinite(v)) return tau;
    }
    return 0.0;
  };
  const double left_max = side_limit(false);
  const double right_max = side_limit(true);

  auto node_pair_sum = [&](double tau) {
    const Node nd = node_at(tau);
    if (nd.weight == 0.0) return 0.0;
    const double f1 = tau <= left_max ? g(nd.small, nd.large) : 0.0;
    const double f2 = tau <= right_max ? g(nd.large, nd.small) : 0.0;
    if (!std::isfinite(f1) || !std::isfinite(f2)) {
      throw NonConvergence("quadrature: integrand is not finite at tau = " +
                           std::to_string(tau));
    }
    return nd.weight * (f1 + f2);
  };

  // Level 0: step h = 1, nodes at integer tau.
  double h = 1.0;
  double sum = std::numbers::pi / 4.0 * g(0.5, 0.5);
  if (!std::isfinite(sum)) {
    throw NonConvergence("quadrature: integrand is not finite at the midpoint");
  }
  for (int j = 1; j <= static_cast<int>(kTauMax); ++j) sum += node_pair_sum(j);
  double estimate = h * sum;

  for (int level = 1; level <= cfg.max_refinements; ++level) {
    h /= 2.0;
    const long count = static_cast<long>(kTauMax / h);
    for (long j = 1; j <= count; j += 2) sum += node_pair_sum(j * h);
    const double refined = h * sum;
    const double err = std::abs(refined - estimate);
    estimate = refined;
    if (level >= kMinLevel &&
        err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(refined))) {
      return {refined, err, level};
    }
  }
  throw NonConvergence("quadrature: no convergence after " +
                       std::to_string(cfg.max_refinements) + " refinements");
}

}  // namespace

QuadratureResult integrate_halfline(const Integrand& f,
                                    const QuadratureConfig& cfg,
                                    double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("integrate_halfline: scale must be positive");
  }
  auto g = [&](double t, double tc) {
    const double x = scale * t / tc;
    if (!std::isfinite(x)) return 0.0;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * scale / (tc * tc);
  };
  return tanh_sinh_unit(g, cfg);
}

QuadratureResult integrate_interval(const Integrand& f, double lo, double hi,
                                    const QuadratureConfig& cfg) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("integrate_interval: need finite lo <= hi");
  }
  if (lo == hi) return {0.0, 0.0, 0};
  const double width = hi - lo;
  auto g = [&](double t, double tc) {
    const double x = t <= 0.5 ? lo + width * t : hi - width * tc;
    return f(x) * width;
  };
  return tanh_sinh_unit(g, cfg);
}

}  // namespace kvreg
