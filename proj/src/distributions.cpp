#include "kvreg/distributions.hpp"

#include "kvreg/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kvreg {

namespace {

bool finite_positive(double v) { return v > 0.0 && std::isfinite(v); }

double gamma_draw(double shape, double rate, Generator& gen) {
  if (shape < 1.0) {
    const double boost = std::pow(gen.uniform(), 1.0 / shape);
    return gamma_draw(shape + 1.0, rate, gen) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double cc = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = gen.normal();
      v = 1.0 + cc * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = gen.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v / rate;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

// Gauss-Legendre, 10 nodes on [-1, 1].
constexpr std::array<double, 5> kGl10Nodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659,
    0.6794095682990244062343274, 0.8650633666889845107320967,
    0.9739065285171717200779640};
constexpr std::array<double, 5> kGl10Weights = {
    0.2955242247147528701738930, 0.2692667193099963550912269,
    0.2190863625159820439955349, 0.1494513491505805931457763,
    0.0666713443086881375935688};

template <class F>
double gauss_legendre10(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGl10Nodes.size(); ++i) {
    const double dx = half * kGl10Nodes[i];
    sum += kGl10Weights[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

}  // namespace

// ---------------------------------------------------------------------------

void GammaParams::validate() const {
  if (!finite_positive(shape) || !finite_positive(rate)) {
    throw std::domain_error("gamma law: shape and rate must be positive");
  }
}

void KummerParams::validate() const {
  if (!finite_positive(a) || !finite_positive(c) || !std::isfinite(b)) {
    throw std::domain_error("Kummer law: need a > 0, c > 0 and finite b");
  }
}

void BetaParams::validate() const {
  if (!finite_positive(a) || !finite_positive(b)) {
    throw std::domain_error("beta law: a and b must be positive");
  }
}

double kummer_log_norm(const KummerParams& p) {
  p.validate();
  return log_gamma(p.a) + log_tricomi_u(p.a, 1.0 - p.b, p.c);
}

// ---------------------------------------------------------------------------
// Gamma

GammaLaw::GammaLaw(GammaParams p) : p_(p) {
  p_.validate();
  log_norm_ = log_gamma(p_.shape) - p_.shape * std::log(p_.rate);
}

double GammaLaw::log_pdf(double y) const {
  if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
  return (p_.shape - 1.0) * std::log(y) - p_.rate * y - log_norm_;
}

double GammaLaw::pdf(double y) const { return y > 0.0 ? std::exp(log_pdf(y)) : 0.0; }

double GammaLaw::cdf(double y) const {
  if (!(y > 0.0)) return 0.0;
  return reg_inc_gamma(p_.shape, p_.rate * y);
}

double GammaLaw::laplace(double s) const {
  if (!(s < p_.rate)) {
    throw std::domain_error("gamma Laplace transform: need s < rate");
  }
  return std::pow(1.0 - s / p_.rate, -p_.shape);
}

double GammaLaw::draw(Generator& gen) const { return gamma_draw(p_.shape, p_.rate, gen); }

// ---------------------------------------------------------------------------
// Beta

BetaLaw::BetaLaw(BetaParams p) : p_(p) {
  p_.validate();
  log_norm_ = log_gamma(p_.a) + log_gamma(p_.b) - log_gamma(p_.a + p_.b);
}

double BetaLaw::log_pdf(double u) const {
  if (!(u > 0.0 && u < 1.0)) return -std::numeric_limits<double>::infinity();
  return (p_.a - 1.0) * std::log(u) + (p_.b - 1.0) * std::log1p(-u) - log_norm_;
}

double BetaLaw::pdf(double u) const {
  return (u > 0.0 && u < 1.0) ? std::exp(log_pdf(u)) : 0.0;
}

double BetaLaw::cdf(double u) const {
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return 1.0;
  return reg_inc_beta(p_.a, p_.b, u);
}

double BetaLaw::draw(Generator& gen) const {
  const double g1 = gamma_draw(p_.a, 1.0, gen);
  const double g2 = gamma_draw(p_.b, 1.0, gen);
  return g1 / (g1 + g2);
}

// ---------------------------------------------------------------------------
// Kummer

KummerLaw::KummerLaw(KummerParams p) : p_(p), log_norm_(kummer_log_norm(p)) {
  mean_ = std::exp(std::log(p_.a) + log_tricomi_u(p_.a + 1.0, 2.0 - p_.b, p_.c) -
                   log_tricomi_u(p_.a, 1.0 - p_.b, p_.c));
}

double KummerLaw::log_pdf(double x) const {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return (p_.a - 1.0) * std::log(x) - p_.c * x - (p_.a + p_.b) * std::log1p(x) -
         log_norm_;
}

double KummerLaw::pdf(double x) const {
  if (!(x > 0.0) || std::isinf(x)) return 0.0;
  return std::exp(log_pdf(x));
}

double KummerLaw::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  auto density = [this](double t) { return pdf(t); };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-15;
  const double m = mean_;
  if (x <= m) {
    return std::clamp(integrate_interval(density, 0.0, x, cfg).value, 0.0, 1.0);
  }
  const auto upper = integrate_halfline(
      [&](double y) { return pdf(x + y); }, cfg, std::max(m, 1.0 / p_.c));
  return std::clamp(1.0 - upper.value, 0.0, 1.0);
}

std::vector<double> KummerLaw::cdf_sorted(std::span<const double> ascending) const {
  std::vector<double> out(ascending.size());
  if (ascending.empty()) return out;
  double acc = cdf(ascending.front());
  out[0] = acc;
  auto density = [this](double t) { return pdf(t); };
  for (std::size_t i = 1; i < ascending.size(); ++i) {
    const double lo = ascending[i - 1];
    const double hi = ascending[i];
    if (hi < lo) throw std::invalid_argument("cdf_sorted: input not ascending");
    // A single panel is only trusted over a gap that is short relative to
    // the local length scale; wider gaps restart from the full quadrature.
    if (hi - lo > 0.05 * std::max(lo, 1.0 / p_.c)) {
      acc = cdf(hi);
    } else if (hi > lo) {
      acc += gauss_legendre10(density, lo, hi);
    }
    out[i] = std::clamp(acc, 0.0, 1.0);
  }
  return out;
}

double KummerLaw::quantile(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("Kummer quantile: probability must be in (0,1)");
  }
  double hi = 1.0;
  while (cdf(hi) < prob) {
    hi *= 2.0;
    if (hi > 1e300) throw NonConvergence("Kummer quantile: cannot bracket");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double KummerLaw::laplace(double s) const {
  if (!(s <= 0.0)) {
    throw std::domain_error("Kummer Laplace transform: need s <= 0");
  }
  if (s == 0.0) return 1.0;
  return std::exp(log_tricomi_u(p_.a, 1.0 - p_.b, p_.c - s) -
                  log_tricomi_u(p_.a, 1.0 - p_.b, p_.c));
}

double KummerLaw::draw(Generator& gen) const {
  const double m = -(p_.a + p_.b);
  if (m <= 0.0) {
    for (;;) {
      const double x = gamma_draw(p_.a, p_.c, gen);
      if (std::log(gen.uniform()) < m * std::log1p(x)) return x;
    }
  }
  const double half_c = 0.5 * p_.c;
  const double x_star = std::max(0.0, m / half_c - 1.0);
  const double log_r = m * std::log1p(x_star) - half_c * x_star;
  for (;;) {
    const double x = gamma_draw(p_.a, half_c, gen);
    if (std::log(gen.uniform()) < m * std::log1p(x) - half_c * x - log_r) return x;
  }
}

// ---------------------------------------------------------------------------

namespace {

template <class Law>
std::vector<double> draw_n(const Law& law, std::size_t n, RngStream rng) {
  if (n == 0) throw std::invalid_argument("sampler: n must be at least 1");
  Generator gen(rng);
  std::vector<double> out(n);
  for (auto& v : out) v = law.draw(gen);
  return out;
}

}  // namespace

std::vector<double> sample_gamma(const GammaParams& p, std::size_t n, RngStream rng) {
  return draw_n(GammaLaw(p), n, rng);
}

std::vector<double> sample_kummer(const KummerParams& p, std::size_t n, RngStream rng) {
  return draw_n(KummerLaw(p), n, rng);
}

std::vector<double> sample_beta(const BetaParams& p, std::size_t n, RngStream rng) {
  return draw_n(BetaLaw(p), n, rng);
}

}  // namespace kvreg
