#include "kvreg/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kvreg {

void RegressionConstants::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 1.0) || !std::isfinite(beta)) {
    throw std::domain_error("regression constants: need 0 < alpha < 1 and beta > 1");
  }
  if (!(alpha * beta > 1.0)) {
    throw std::domain_error("regression constants: need alpha * beta > 1");
  }
}

UV kv_forward(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw std::domain_error("kv_forward: x and y must be positive and finite");
  }
  const double v = x + y;
  const double u = x * (1.0 + v) / ((1.0 + x) * v);
  return {u, v};
}

XY kv_inverse(double u, double v) {
  if (!(u > 0.0 && u < 1.0) || !(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error("kv_inverse: need 0 < u < 1 and v > 0");
  }
  const double x = u * v / (1.0 + (1.0 - u) * v);
  // y = v - x, rearranged to avoid cancellation when u is near 1.
  const double y = (1.0 - u) * v * (1.0 + v) / (1.0 + (1.0 - u) * v);
  return {x, y};
}

RegressionConstants constants_from_params(double a, double b) {
  if (!(a > 1.0) || !std::isfinite(a)) {
    throw std::domain_error(
        "constants_from_params: a must exceed 1 (E 1/X < inf), got " + std::to_string(a));
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::domain_error("constants_from_params: b must be positive");
  }
  return {a / (a + b), (a + b - 1.0) / (a - 1.0)};
}

ShapePair params_from_constants(const RegressionConstants& rc) {
  rc.validate();
  const double excess = rc.alpha * rc.beta - 1.0;
  const double one_minus_alpha = 1.0 - rc.alpha;
  return {1.0 + one_minus_alpha / excess, one_minus_alpha * (rc.beta - 1.0) / excess};
}

ShapePair params_from_constants_ab_denominator(const RegressionConstants& rc) {
  rc.validate();
  const double ab = rc.alpha * rc.beta;
  const double one_minus_alpha = 1.0 - rc.alpha;
  return {1.0 + one_minus_alpha / ab, one_minus_alpha * (rc.beta - 1.0) / ab};
}

std::pair<BetaParams, KummerParams> kv_output_laws(const KummerParams& p) {
  p.validate();
  if (!(p.b > 0.0)) {
    throw std::domain_error("kv_output_laws: the Kummer b parameter must be positive");
  }
  return {BetaParams{p.a, p.b}, KummerParams{p.a + p.b, -p.b, p.c}};
}

void validate_pair_sample(const PairSample& s) {
  const std::size_t n = s.u.size();
  if (s.x.size() != n || s.y.size() != n || s.v.size() != n) {
    throw std::invalid_argument("pair sample: column lengths differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto expect = kv_forward(s.x[i], s.y[i]);
    const bool ok = s.u[i] > 0.0 && s.u[i] < 1.0 && s.x[i] < s.v[i] &&
                    std::abs(s.v[i] - expect.v) <= 1e-12 * expect.v &&
                    std::abs(s.u[i] - expect.u) <= 1e-12 * expect.u;
    if (!ok) {
      throw std::invalid_argument("pair sample: row " + std::to_string(i) +
                                  " violates the transform invariants");
    }
  }
}

}  // namespace kvreg
