#include "kvreg/stats.hpp"

#include "kvreg/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kvreg::stats {

double kolmogorov_upper(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series below is 1 to double precision
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17 * sum) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_upper(double stat, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("chi_square_upper: dof must be positive");
  if (stat <= 0.0) return 1.0;
  return reg_inc_gamma_upper(0.5 * dof, 0.5 * stat);
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("student_t_two_sided: dof must be positive");
  if (!std::isfinite(t)) return 0.0;
  return reg_inc_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

KsResult ks_from_sorted_cdf(std::span<const double> f) {
  const std::size_t n = f.size();
  if (n == 0) throw std::invalid_argument("ks test: empty sample");
  double d = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    d = std::max(d, std::max((i + 1) / nn - f[i], f[i] - i / nn));
  }
  const double root_n = std::sqrt(nn);
  return {d, kolmogorov_upper((root_n + 0.12 + 0.11 / root_n) * d)};
}

namespace {

std::vector<int> rank_bins(std::span<const double> values, int k) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<int> bin(n);
  for (std::size_t r = 0; r < n; ++r) {
    bin[order[r]] = static_cast<int>(r * static_cast<std::size_t>(k) / n);
  }
  return bin;
}

}  // namespace

ChiSquareResult rank_independence(std::span<const double> first,
                                  std::span<const double> second, int k) {
  if (first.size() != second.size()) {
    throw std::invalid_argument("rank_independence: columns differ in length");
  }
  if (k < 2) throw std::invalid_argument("rank_independence: need k >= 2");
  const std::size_t n = first.size();
  if (n < static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) {
    throw std::invalid_argument("rank_independence: fewer rows than table cells");
  }
  const auto rows = rank_bins(first, k);
  const auto cols = rank_bins(second, k);
  std::vector<double> table(static_cast<std::size_t>(k * k), 0.0);
  std::vector<double> row_sum(k, 0.0), col_sum(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[rows[i] * k + cols[i]] += 1.0;
    row_sum[rows[i]] += 1.0;
    col_sum[cols[i]] += 1.0;
  }
  double stat = 0.0;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const double expected = row_sum[r] * col_sum[c] / static_cast<double>(n);
      const double diff = table[r * k + c] - expected;
      stat += diff * diff / expected;
    }
  }
  const int dof = (k - 1) * (k - 1);
  return {stat, dof, chi_square_upper(stat, dof)};
}

SlopeTest weighted_slope_test(std::span<const double> x, std::span<const double> y,
                              std::span<const double> se) {
  const std::size_t n = x.size();
  if (y.size() != n || se.size() != n) {
    throw std::invalid_argument("weighted_slope_test: length mismatch");
  }
  if (n < 3) throw std::invalid_argument("weighted_slope_test: need at least 3 points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(se[i] > 0.0)) {
      throw std::invalid_argument("weighted_slope_test: standard errors must be positive");
    }
    const double w = 1.0 / (se[i] * se[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / (se[i] * se[i]);
    sxx += w * (x[i] - xbar) * (x[i] - xbar);
    sxy += w * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("weighted_slope_test: x has no spread");
  SlopeTest out;
  out.slope = sxy / sxx;
  out.slope_se = std::sqrt(1.0 / sxx);
  out.t = out.slope / out.slope_se;
  out.dof = static_cast<int>(n) - 2;
  out.p_value = student_t_two_sided(out.t, out.dof);
  return out;
}

MeanSe mean_and_se(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("mean_and_se: need at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace kvreg::stats
