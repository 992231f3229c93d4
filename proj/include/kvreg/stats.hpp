#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace kvreg::stats {

/// Upper tail of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
double kolmogorov_upper(double lambda);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_upper(double stat, double dof);

/// Two-sided p-value of Student's t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample KS given ascending draws and the model CDF at each draw. The
/// p-value uses Stephens' finite-n scaling (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
KsResult ks_from_sorted_cdf(std::span<const double> cdf_at_sorted);

template <class Cdf>
KsResult ks_test(std::vector<double> draws, const Cdf& cdf) {
  std::sort(draws.begin(), draws.end());
  std::vector<double> f(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) f[i] = cdf(draws[i]);
  return ks_from_sorted_cdf(f);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Chi-square test of independence on the k x k table of equiprobable rank
/// bins of (first, second). Expected counts come from the table margins.
ChiSquareResult rank_independence(std::span<const double> first,
                                  std::span<const double> second, int k);

struct SlopeTest {
  double slope = 0.0;
  double slope_se = 0.0;
  double t = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Weighted least squares of y on x with weights 1/se^2 and a two-sided
/// Student-t test of zero slope on n - 2 degrees of freedom.
SlopeTest weighted_slope_test(std::span<const double> x, std::span<const double> y,
                              std::span<const double> se);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values);

}  // namespace kvreg::stats
