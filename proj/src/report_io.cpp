#include "kvreg/report_io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace kvreg::io {

using nlohmann::json;

namespace {

json ks_json(const stats::KsResult& k) { return {{"stat", k.statistic}, {"p", k.p_value}}; }

json slope_json(const stats::SlopeTest& s) {
  return {{"slope", s.slope}, {"se", s.slope_se}, {"t", s.t}, {"dof", s.dof}, {"p", s.p_value}};
}

}  // namespace

json to_json(const KummerParams& p) { return {{"a", p.a}, {"b", p.b}, {"c", p.c}}; }

json to_json(const IndependenceReport& r) {
  return {{"kind", "independence"},
          {"n", r.n},
          {"reference", to_json(r.reference)},
          {"control", r.control},
          {"chi2", {{"stat", r.chi2.statistic}, {"dof", r.chi2.dof}, {"p", r.chi2.p_value}}},
          {"ks_u", ks_json(r.ks_u)},
          {"ks_v", ks_json(r.ks_v)},
          {"level", r.level},
          {"pass", r.pass}};
}

json to_json(const RegressionReport& r) {
  json targets = json::array();
  for (const auto& t : r.targets) {
    json jt = {{"name", t.name},
               {"mean", t.mean},
               {"se", t.se},
               {"slope_test", slope_json(t.slope)},
               {"global_mean", t.global.mean},
               {"global_se", t.global.se},
               {"theory", t.theory ? json(*t.theory) : json(nullptr)},
               {"max_abs_z", t.max_abs_z ? json(*t.max_abs_z) : json(nullptr)}};
    targets.push_back(std::move(jt));
  }
  return {{"kind", "regression"},
          {"n", r.n},
          {"min_bin_count", r.min_bin_count},
          {"bins",
           {{"lo", r.bin_lo}, {"hi", r.bin_hi}, {"center", r.bin_center}, {"count", r.counts}}},
          {"targets", std::move(targets)},
          {"alpha_quadrature", r.alpha_quadrature},
          {"beta_quadrature", r.beta_quadrature},
          {"moment_bound",
           {{"mean_inv_u", r.mean_inv_u}, {"mean_one_plus_inv_x", r.mean_one_plus_inv_x}}},
          {"z_limit", r.z_limit},
          {"level", r.level},
          {"pass", r.pass}};
}

json to_json(const ResidualReport& r) {
  json eqs = json::array();
  for (const auto& e : r.equations) {
    eqs.push_back({{"name", e.name},
                   {"points", e.s},
                   {"lhs", e.lhs},
                   {"rhs", e.rhs},
                   {"rel", e.rel},
                   {"max_rel", e.max_rel},
                   {"mean_rel", e.mean_rel},
                   {"tolerance", e.tolerance},
                   {"pass", e.pass}});
  }
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}});
  return {{"kind", "residuals"}, {"equations", std::move(eqs)}, {"checks", std::move(checks)},
          {"pass", r.pass()}};
}

json to_json(const ParameterMapReport& r) {
  return {{"kind", "parameter_map"},
          {"n", r.n},
          {"alpha", r.measured.alpha},
          {"beta", r.measured.beta},
          {"alpha_se", r.alpha_se},
          {"beta_se", r.beta_se},
          {"truth", {{"a", r.truth.a}, {"b", r.truth.b}}},
          {"recovered", {{"a", r.recovered.a}, {"b", r.recovered.b}}},
          {"recovered_se", {{"a", r.recovered_se.a}, {"b", r.recovered_se.b}}},
          {"ab_denominator_variant", {{"a", r.ab_variant.a}, {"b", r.ab_variant.b}}},
          {"ab_variant_miss_in_se", r.ab_variant_miss_in_se},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

json to_json(const FitReport& r) {
  return {{"kind", "fit"},
          {"n", r.n},
          {"alpha", r.measured.alpha},
          {"beta", r.measured.beta},
          {"mean_v", r.mean_v},
          {"fitted", to_json(r.fitted)},
          {"se", {{"a", r.se_a}, {"b", r.se_b}, {"c", r.se_c}}},
          {"ks_u", ks_json(r.ks_u)},
          {"ks_v", ks_json(r.ks_v)}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string regression_csv(const RegressionReport& r) {
  std::ostringstream out;
  out << "bin,count,v_lo,v_hi,v_center";
  for (const auto& t : r.targets) out << ",mean_" << t.name << ",se_" << t.name;
  out << '\n';
  for (std::size_t b = 0; b < r.counts.size(); ++b) {
    out << b << ',' << r.counts[b] << ',' << format_double(r.bin_lo[b]) << ','
        << format_double(r.bin_hi[b]) << ',' << format_double(r.bin_center[b]);
    for (const auto& t : r.targets) {
      out << ',' << format_double(t.mean[b]) << ',' << format_double(t.se[b]);
    }
    out << '\n';
  }
  return out.str();
}

std::string residual_csv(const ResidualReport& r) {
  std::ostringstream out;
  out << "equation,point,lhs,rhs,rel_residual,tolerance\n";
  for (const auto& e : r.equations) {
    for (std::size_t i = 0; i < e.s.size(); ++i) {
      out << '"' << e.name << "\"," << format_double(e.s[i]) << ',' << format_double(e.lhs[i])
          << ',' << format_double(e.rhs[i]) << ',' << format_double(e.rel[i]) << ','
          << format_double(e.tolerance) << '\n';
    }
  }
  return out.str();
}

std::string columns_csv(std::span<const std::string_view> names,
                        std::span<const std::span<const double>> columns) {
  if (names.size() != columns.size() || columns.empty()) {
    throw std::invalid_argument("columns_csv: need one name per column");
  }
  const std::size_t rows = columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw std::invalid_argument("columns_csv: ragged columns");
  }
  std::ostringstream out;
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j ? "," : "") << format_double(columns[j][i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace kvreg::io
