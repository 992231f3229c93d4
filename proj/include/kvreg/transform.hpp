#pragma once

#include "kvreg/distributions.hpp"
#include "kvreg/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace kvreg {

/// Constants of the regressions E(U|V) = alpha and E(1/U | V) = beta.
struct RegressionConstants {
  double alpha = 0.5;
  double beta = 2.0;
  /// Requires 0 < alpha < 1, beta > 1 and alpha * beta > 1.
  void validate() const;
};

struct UV {
  double u;
  double v;
};

struct XY {
  double x;
  double y;
};

/// u = (1 + 1/(x+y)) / (1 + 1/x), v = x + y. Evaluated as
/// x (1+x+y) / ((1+x)(x+y)) so tiny x does not lose significance.
UV kv_forward(double x, double y);

/// x = u v / (1 + (1-u) v), y = v - x.
XY kv_inverse(double u, double v);

/// For X ~ K(a,b,c): U ~ Beta(a,b), hence alpha = a/(a+b) and
/// beta = (a+b-1)/(a-1). Needs a > 1 for E 1/U to be finite.
RegressionConstants constants_from_params(double a, double b);

struct ShapePair {
  double a;
  double b;
};

/// Inverse of constants_from_params:
///   b = (1-alpha)(beta-1) / (alpha beta - 1),
///   a = 1 + (1-alpha) / (alpha beta - 1).
ShapePair params_from_constants(const RegressionConstants& rc);

/// The same map with alpha*beta in both denominators instead of
/// alpha*beta - 1. Not an inverse of constants_from_params; kept so reports
/// can show how far it lands from the simulated truth.
ShapePair params_from_constants_ab_denominator(const RegressionConstants& rc);

/// Laws of (U, V) when X ~ K(a,b,c) and Y ~ G(b,c): Beta(a,b) and
/// K(a+b, -b, c). Needs b > 0.
std::pair<BetaParams, KummerParams> kv_output_laws(const KummerParams& p);

/// Where the X column came from.
enum class XSource { kummer, gamma };

struct SampleProvenance {
  XSource x_source = XSource::kummer;
  KummerParams x_kummer{};  // used when x_source == kummer
  GammaParams x_gamma{};    // used when x_source == gamma
  GammaParams y_law{};
  std::uint64_t seed = 0;
  std::uint64_t streams = 1;
};

/// Rows satisfy v = x + y and u = kv_forward(x, y).u.
struct PairSample {
  std::vector<double> x, y, u, v;
  SampleProvenance provenance;

  std::size_t size() const { return u.size(); }
};

/// Checks the row invariants: equal column lengths, 0 < u < 1, 0 < x < v,
/// v = x + y and u matching kv_forward to 1e-12 relative.
void validate_pair_sample(const PairSample& s);

}  // namespace kvreg
