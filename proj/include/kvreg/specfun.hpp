#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace kvreg {

/// Raised when a series or quadrature cannot meet its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_refinements = 30;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
};

using Integrand = std::function<double(double)>;

/// Integral of f over (0, inf). The half-line is mapped onto (0,1) through
/// x = scale * t / (1 - t) and integrated by tanh-sinh with step halving until
/// two successive levels agree. Integrable power singularities at 0 are fine.
/// `scale` should be of the order of where the integrand carries its mass.
QuadratureResult integrate_halfline(const Integrand& f,
                                    const QuadratureConfig& cfg = {},
                                    double scale = 1.0);

/// Integral of f over (lo, hi), same scheme without the half-line map.
QuadratureResult integrate_interval(const Integrand& f, double lo, double hi,
                                    const QuadratureConfig& cfg = {});

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Regularized incomplete beta I_u(a, b).
double reg_inc_beta(double a, double b, double u);

/// Regularized lower incomplete gamma P(p, z).
double reg_inc_gamma(double p, double z);

/// Regularized upper incomplete gamma Q(p, z) = 1 - P(p, z), accurate in the
/// far tail.
double reg_inc_gamma_upper(double p, double z);

/// Confluent hypergeometric function of the first kind, M(a, b, t) = 1F1.
/// Ascending series; for t < 0 Kummer's transformation
/// M(a,b,t) = e^t M(b-a, b, -t) is applied first so all series terms are
/// eventually of one sign.
double kummer_m(double a, double b, double t);

/// Tricomi's confluent hypergeometric function U(a, b, t) for a > 0, t > 0,
/// computed from
///   U(a,b,t) = 1/Gamma(a) * int_0^inf e^{-t x} x^{a-1} (1+x)^{b-a-1} dx.
double tricomi_u(double a, double b, double t);

/// ln U(a, b, t); avoids underflow of U when a is large.
double log_tricomi_u(double a, double b, double t);

}  // namespace kvreg
