#include "kvreg/specfun.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kvreg {

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("log_gamma: argument must be positive and finite");
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // reentrant; std::lgamma writes signgam
#else
  return std::lgamma(x);
#endif
}

double reg_inc_beta(double a, double b, double u) {
  if (!(a > 0.0) || !(b > 0.0) || !(u >= 0.0 && u <= 1.0)) {
    throw std::domain_error("reg_inc_beta: need a > 0, b > 0, 0 <= u <= 1");
  }
  return boost::math::ibeta(a, b, u);
}

double reg_inc_gamma(double p, double z) {
  if (!(p > 0.0) || !(z >= 0.0)) {
    throw std::domain_error("reg_inc_gamma: need p > 0, z >= 0");
  }
  if (std::isinf(z)) return 1.0;
  return boost::math::gamma_p(p, z);
}

double reg_inc_gamma_upper(double p, double z) {
  if (!(p > 0.0) || !(z >= 0.0)) {
    throw std::domain_error("reg_inc_gamma_upper: need p > 0, z >= 0");
  }
  if (std::isinf(z)) return 0.0;
  return boost::math::gamma_q(p, z);
}

namespace {

constexpr int kSeriesTermCap = 10000;
constexpr double kSeriesRelTol = std::numeric_limits<double>::epsilon() / 2.0;

bool is_nonpositive_integer(double b) {
  return b <= 1e-12 && std::abs(b - std::round(b)) <= 1e-12;
}

// 1F1 ascending series for t >= 0.
double kummer_series(double a, double b, double t) {
  double term = 1.0;
  double sum = 1.0;
  int small_run = 0;
  for (int k = 0; k < kSeriesTermCap; ++k) {
    const double ratio = (a + k) / (b + k) * t / (k + 1);
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;  // a is a nonpositive integer: polynomial
    const bool past_peak = k + 1 > t && std::abs(ratio) < 1.0;
    if (past_peak && std::abs(term) < kSeriesRelTol * std::abs(sum)) {
      if (++small_run == 3) return sum;
    } else {
      small_run = 0;
    }
  }
  throw NonConvergence("kummer_m: series did not converge within " +
                       std::to_string(kSeriesTermCap) + " terms");
}

// Mode of x^{a-1} (1+x)^{b-a-1} e^{-t x}, used as the quadrature scale.
double tricomi_scale(double a, double b, double t) {
  const double lin = b - 2.0 - t;
  const double disc = lin * lin + 4.0 * t * (a - 1.0);
  double mode = 0.0;
  if (disc >= 0.0) mode = (lin + std::sqrt(disc)) / (2.0 * t);
  const double floor_scale = 0.5 * std::min(1.0, 1.0 / t);
  return std::max(mode, floor_scale);
}

}  // namespace

double kummer_m(double a, double b, double t) {
  if (is_nonpositive_integer(b)) {
    throw std::domain_error("kummer_m: b must not be a nonpositive integer");
  }
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(t)) {
    throw std::domain_error("kummer_m: arguments must be finite");
  }
  if (t == 0.0) return 1.0;
  if (t > 0.0) return kummer_series(a, b, t);
  return std::exp(t) * kummer_series(b - a, b, -t);
}

double log_tricomi_u(double a, double b, double t) {
  if (!(a > 0.0) || !(t > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(t)) {
    throw std::domain_error("tricomi_u: need a > 0, t > 0 and finite b");
  }
  const double scale = tricomi_scale(a, b, t);
  auto log_integrand = [=](double x) {
    return (a - 1.0) * std::log(x) + (b - a - 1.0) * std::log1p(x) - t * x;
  };
  // Factor the integrand's value at the scale point out of the integral to
  // keep the quadrature sum near unity.
  const double offset = log_integrand(scale);
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-12;
  const auto r = integrate_halfline(
      [&](double x) { return std::exp(log_integrand(x) - offset); }, cfg, scale);
  if (!(r.value > 0.0)) {
    throw NonConvergence("tricomi_u: quadrature returned a nonpositive value");
  }
  return offset + std::log(r.value) - log_gamma(a);
}

double tricomi_u(double a, double b, double t) {
  return std::exp(log_tricomi_u(a, b, t));
}

}  // namespace kvreg
