#pragma once

#include "kvreg/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace kvreg {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// G(shape, rate): density proportional to y^{shape-1} e^{-rate y} on (0,inf).
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
  void validate() const;
};

/// K(a, b, c): density proportional to x^{a-1} e^{-c x} (1+x)^{-(a+b)} on
/// (0,inf). Well defined for a > 0, c > 0 and any real b.
struct KummerParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  void validate() const;
};

/// Beta of the first kind: density proportional to u^{a-1} (1-u)^{b-1} on (0,1).
struct BetaParams {
  double a = 1.0;
  double b = 1.0;
  void validate() const;
};

/// ln of int_0^inf x^{a-1} e^{-cx} (1+x)^{-(a+b)} dx = ln Gamma(a) + ln U(a, 1-b, c).
double kummer_log_norm(const KummerParams& p);

// ---------------------------------------------------------------------------
// Laws
// ---------------------------------------------------------------------------

class GammaLaw {
 public:
  explicit GammaLaw(GammaParams p);

  const GammaParams& params() const { return p_; }
  double log_pdf(double y) const;
  double pdf(double y) const;
  double cdf(double y) const;
  double mean() const { return p_.shape / p_.rate; }
  /// E e^{sY} = (1 - s/c)^{-b}, for s < c.
  double laplace(double s) const;
  double draw(Generator& gen) const;

 private:
  GammaParams p_;
  double log_norm_;
};

class BetaLaw {
 public:
  explicit BetaLaw(BetaParams p);

  const BetaParams& params() const { return p_; }
  double log_pdf(double u) const;
  double pdf(double u) const;
  double cdf(double u) const;
  double mean() const { return p_.a / (p_.a + p_.b); }
  double draw(Generator& gen) const;

 private:
  BetaParams p_;
  double log_norm_;
};

class KummerLaw {
 public:
  explicit KummerLaw(KummerParams p);

  const KummerParams& params() const { return p_; }
  double log_norm() const { return log_norm_; }
  double log_pdf(double x) const;
  double pdf(double x) const;
  /// Quadrature of the normalized density; integrates the shorter side and
  /// complements when x lies above the mean.
  double cdf(double x) const;
  /// CDF at every point of an ascending sequence. The first point is
  /// integrated from 0; each later point adds a 10-point Gauss-Legendre
  /// panel over the gap from its predecessor, or is integrated afresh when
  /// the gap is wide.
  std::vector<double> cdf_sorted(std::span<const double> ascending) const;
  /// Root of cdf(x) = prob by bisection on [0, x_hi], x_hi doubled until it
  /// brackets the target.
  double quantile(double prob) const;
  /// E X = a U(a+1, 2-b, c) / U(a, 1-b, c).
  double mean() const { return mean_; }
  /// E e^{sX} = U(a, 1-b, c-s) / U(a, 1-b, c), for s <= 0.
  double laplace(double s) const;
  double draw(Generator& gen) const;

 private:
  KummerParams p_;
  double log_norm_;
  double mean_;
};

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Marsaglia-Tsang squeeze for shape >= 1; shape < 1 draws at shape + 1 and
/// multiplies by u^{1/shape}.
std::vector<double> sample_gamma(const GammaParams& p, std::size_t n,
                                 RngStream rng);

/// Rejection from a gamma envelope. With m = -(a+b): m <= 0 uses G(a, c) and
/// accepts with probability (1+x)^m; m > 0 uses G(a, c/2) and accepts with
/// (1+x)^m e^{-cx/2} / R, R being the envelope's maximum at
/// x* = max(0, 2m/c - 1).
std::vector<double> sample_kummer(const KummerParams& p, std::size_t n,
                                  RngStream rng);

/// u = g1 / (g1 + g2) with g1 ~ G(a,1), g2 ~ G(b,1).
std::vector<double> sample_beta(const BetaParams& p, std::size_t n,
                                RngStream rng);

}  // namespace kvreg
