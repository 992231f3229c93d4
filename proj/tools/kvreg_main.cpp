// kvreg: sampling, verification and fitting for the Kummer/gamma
// independence property and its regression characterization.

#include "kvreg/distributions.hpp"
#include "kvreg/report_io.hpp"
#include "kvreg/transform.hpp"
#include "kvreg/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace kvreg;

constexpr int kExitPass = 0;
constexpr int kExitGateFailed = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string law = "kummer";
  std::optional<double> a, b, c, alpha, beta;
  std::size_t n = 0;  // 0 until apply_defaults
  std::uint64_t seed = 42;
  std::uint64_t streams = 1;
  int bins = 0;  // 0 until apply_defaults; unused by some commands
  std::string out_path;
  std::string format;  // csv for sample, json otherwise
  bool control = false;
  std::string in_path;

  json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return {{"command", command}, {"law", law},     {"a", opt(a)},
            {"b", opt(b)},         {"c", opt(c)},     {"alpha", opt(alpha)},
            {"beta", opt(beta)},   {"n", n},          {"seed", seed},
            {"streams", streams},  {"bins", bins},    {"format", format},
            {"control", control},  {"in", in_path}};
  }
};

// Fills command defaults so the embedded config is exactly what ran.
void apply_defaults(RunConfig& cfg) {
  if (!cfg.c) cfg.c = 1.0;
  if (cfg.format.empty()) cfg.format = cfg.command == "sample" ? "csv" : "json";
  if (cfg.n == 0) {
    if (cfg.command == "fit") cfg.n = 1000000;
    else if (cfg.command != "check-identities" && cfg.command != "check-ode") cfg.n = 100000;
  }
  if (cfg.bins == 0) {
    if (cfg.command == "check-independence") cfg.bins = 10;
    if (cfg.command == "check-regression") cfg.bins = 50;
  }
}

// (a, b) from --a/--b or from --alpha/--beta, never both.
ShapePair resolve_shapes(const RunConfig& cfg) {
  const bool by_shape = cfg.a || cfg.b;
  const bool by_constants = cfg.alpha || cfg.beta;
  if (by_shape && by_constants) {
    throw UsageError("give either --a/--b or --alpha/--beta, not both");
  }
  if (by_constants) {
    if (!cfg.alpha || !cfg.beta) throw UsageError("--alpha and --beta go together");
    return params_from_constants({*cfg.alpha, *cfg.beta});
  }
  if (!cfg.a || !cfg.b) throw UsageError("--a and --b are required");
  return {*cfg.a, *cfg.b};
}

KummerParams resolve_kummer(const RunConfig& cfg) {
  const auto s = resolve_shapes(cfg);
  KummerParams p{s.a, s.b, cfg.c.value_or(1.0)};
  p.validate();
  return p;
}

std::string key_value_csv(const json& flat) {
  std::ostringstream out;
  out << "key,value\n";
  std::function<void(const std::string&, const json&)> walk = [&](const std::string& prefix,
                                                                  const json& j) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        walk(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
      }
    } else if (j.is_number_float()) {
      out << prefix << ',' << io::format_double(j.get<double>()) << '\n';
    } else if (j.is_string()) {
      out << prefix << ',' << j.get<std::string>() << '\n';
    } else {
      out << prefix << ',' << j.dump() << '\n';
    }
  };
  walk("", flat);
  return out.str();
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + cfg.out_path);
  f << text;
}

void emit_report(const RunConfig& cfg, const json& report, const std::string& csv) {
  if (cfg.format == "csv") {
    emit(cfg, csv);
    return;
  }
  json doc = {{"schema_version", io::kSchemaVersion},
              {"config", cfg.to_json()},
              {"report", report}};
  emit(cfg, doc.dump(2) + "\n");
}

SimulationConfig sim_config(const RunConfig& cfg, std::size_t default_n) {
  return {cfg.n ? cfg.n : default_n, cfg.seed, cfg.streams};
}

PairSample simulate(const RunConfig& cfg, const KummerParams& p, std::size_t default_n) {
  const auto sim = sim_config(cfg, default_n);
  if (cfg.control) return simulate_gamma_control({p.a, p.c}, {p.b, p.c}, sim);
  return simulate_pairs(p, sim);
}

// ---------------------------------------------------------------------------

int cmd_sample(const RunConfig& cfg) {
  const std::size_t n = cfg.n ? cfg.n : 100000;
  std::vector<std::string_view> names;
  std::vector<std::vector<double>> cols;
  if (cfg.law == "kummer") {
    names = {"x"};
    cols.push_back(sample_kummer(resolve_kummer(cfg), n, {cfg.seed, 0}));
  } else if (cfg.law == "gamma") {
    if (!cfg.b) throw UsageError("gamma sampling needs --b (shape) and --c (rate)");
    cols.push_back(sample_gamma({*cfg.b, cfg.c.value_or(1.0)}, n, {cfg.seed, 0}));
    names = {"y"};
  } else if (cfg.law == "beta") {
    const auto s = resolve_shapes(cfg);
    cols.push_back(sample_beta({s.a, s.b}, n, {cfg.seed, 0}));
    names = {"u"};
  } else if (cfg.law == "pair") {
    auto s = simulate(cfg, resolve_kummer(cfg), n);
    names = {"x", "y", "u", "v"};
    cols = {std::move(s.x), std::move(s.y), std::move(s.u), std::move(s.v)};
  } else {
    throw UsageError("unknown --law " + cfg.law + " (kummer, gamma, beta, pair)");
  }
  if (cfg.format == "csv") {
    std::vector<std::span<const double>> views(cols.begin(), cols.end());
    emit(cfg, io::columns_csv(names, views));
  } else {
    json columns = json::object();
    for (std::size_t j = 0; j < names.size(); ++j) columns[std::string(names[j])] = cols[j];
    emit_report(cfg, {{"kind", "sample"}, {"columns", columns}}, "");
  }
  return kExitPass;
}

int cmd_check_independence(const RunConfig& cfg) {
  const auto p = resolve_kummer(cfg);
  if (!(p.b > 0.0)) throw std::domain_error("check-independence: b must be positive");
  const int k = cfg.bins ? cfg.bins : 10;
  const auto sample = simulate(cfg, p, 100000);
  const auto r = independence_from_sample(sample, p, k);
  const auto j = io::to_json(r);
  emit_report(cfg, j, key_value_csv(j));
  // A control run passes when the chi-square test rejects independence.
  const bool ok = cfg.control ? r.chi2.p_value < 1e-3 : r.pass;
  return ok ? kExitPass : kExitGateFailed;
}

int cmd_check_regression(const RunConfig& cfg) {
  const auto p = resolve_kummer(cfg);
  const auto rc = constants_from_params(p.a, p.b);
  const int q = cfg.bins ? cfg.bins : 50;
  RegressionReport r;
  if (cfg.control) {
    r = regression_from_sample(simulate(cfg, p, 100000), rc, q);
  } else {
    r = run_regression_check(p, sim_config(cfg, 100000), q);
  }
  emit_report(cfg, io::to_json(r), io::regression_csv(r));
  if (cfg.control) {
    const double p_min = std::min(r.target("u").slope.p_value, r.target("inv_u").slope.p_value);
    return p_min < 1e-3 ? kExitPass : kExitGateFailed;
  }
  return r.pass ? kExitPass : kExitGateFailed;
}

int cmd_check_identities(const RunConfig& cfg) {
  const auto p = resolve_kummer(cfg);
  const auto grid = linear_grid(-5.0, -0.1, 20);
  const auto reg = check_regression_identities(p, std::array<double, 5>{-0.1, -0.5, -1.0, -2.0, -5.0});
  const auto tr = check_transform_identities(p, grid);
  ResidualReport all = reg;
  all.equations.insert(all.equations.end(), tr.equations.begin(), tr.equations.end());
  emit_report(cfg, io::to_json(all), io::residual_csv(all));
  return all.pass() ? kExitPass : kExitGateFailed;
}

int cmd_check_ode(const RunConfig& cfg) {
  const auto p = resolve_kummer(cfg);
  const auto rc = (cfg.alpha && cfg.beta) ? RegressionConstants{*cfg.alpha, *cfg.beta}
                                          : constants_from_params(p.a, p.b);
  const auto grid = linear_grid(-5.0, -0.1, 20);
  ResidualReport all = check_gamma_ode({p.b, p.c}, grid, rc);
  auto s_grid = grid;
  s_grid.push_back(0.0);
  const auto kode = check_kummer_ode(p, s_grid);
  const std::array<double, 3> ps{0.5, 1.0, 2.5};
  const std::array<double, 3> qs{0.3, 1.0, 4.0};
  const auto conf = check_confluent_odes(ps, qs, 0.5, 20.0);
  for (const auto* part : {&kode, &conf}) {
    all.equations.insert(all.equations.end(), part->equations.begin(), part->equations.end());
    all.checks.insert(all.checks.end(), part->checks.begin(), part->checks.end());
  }
  emit_report(cfg, io::to_json(all), io::residual_csv(all));
  return all.pass() ? kExitPass : kExitGateFailed;
}

std::pair<std::vector<double>, std::vector<double>> read_uv_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open input file " + path);
  std::string line;
  if (!std::getline(f, line)) throw UsageError("input file is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw UsageError("input file needs a '" + name + "' column");
  };
  const std::size_t iu = col("u"), iv = col("v");
  std::vector<double> u, v;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw UsageError("ragged row in " + path);
    u.push_back(std::stod(cells[iu]));
    v.push_back(std::stod(cells[iv]));
  }
  return {std::move(u), std::move(v)};
}

int cmd_fit(const RunConfig& cfg) {
  json report;
  if (!cfg.in_path.empty()) {
    const auto [u, v] = read_uv_csv(cfg.in_path);
    report = {{"fit", io::to_json(fit_from_sample(u, v))}};
  } else {
    const auto p = resolve_kummer(cfg);
    const auto sample = simulate(cfg, p, 1000000);
    const auto fit = fit_from_sample(sample.u, sample.v);
    report = {{"fit", io::to_json(fit)},
              {"truth", io::to_json(p)},
              {"parameter_map", io::to_json(compare_parameter_maps(sample.u, {p.a, p.b}))}};
  }
  report["kind"] = "fit";
  emit_report(cfg, report, key_value_csv(report));
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kummer/gamma independence and regression-constancy toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool statistical) {
    sub->add_option("--a", cfg.a, "Kummer shape a (X ~ K(a,b,c))");
    sub->add_option("--b", cfg.b, "Kummer b / gamma shape");
    sub->add_option("--c", cfg.c, "common rate c (default 1)");
    sub->add_option("--alpha", cfg.alpha, "E(U|V) constant, alternative to --a/--b");
    sub->add_option("--beta", cfg.beta, "E(1/U|V) constant, alternative to --a/--b");
    sub->add_option("--out", cfg.out_path, "write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "json or csv (default csv for sample, json otherwise)")
        ->check(CLI::IsMember({"json", "csv"}));
    if (statistical) {
      sub->add_option("--n", cfg.n, "sample size")->check(CLI::PositiveNumber);
      sub->add_option("--seed", cfg.seed, "64-bit seed (default 42)");
      sub->add_option("--streams", cfg.streams, "independent RNG streams")
          ->check(CLI::PositiveNumber);
      sub->add_option("--bins", cfg.bins, "rank bins per axis / quantile bins on V")
          ->check(CLI::PositiveNumber);
      sub->add_flag("--control", cfg.control,
                    "negative control: draw X from G(a,c) instead of K(a,b,c)");
    }
  };

  auto* sample = app.add_subcommand("sample", "draw from a law and write CSV/JSON");
  add_common(sample, true);
  sample->add_option("--law", cfg.law, "kummer, gamma, beta or pair")
      ->check(CLI::IsMember({"kummer", "gamma", "beta", "pair"}));
  auto* indep = app.add_subcommand("check-independence", "chi-square and KS checks on (U,V)");
  add_common(indep, true);
  auto* regr = app.add_subcommand("check-regression", "binned constancy of E(U|V), E(1/U|V)");
  add_common(regr, true);
  auto* ident = app.add_subcommand("check-identities", "Laplace-transform identities by quadrature");
  add_common(ident, false);
  auto* ode = app.add_subcommand("check-ode", "gamma, Kummer and confluent ODE residuals");
  add_common(ode, false);
  auto* fit = app.add_subcommand("fit", "recover (a,b,c) from (u,v) data");
  add_common(fit, true);
  fit->add_option("--in", cfg.in_path, "CSV with u and v columns (default: simulate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.command = chosen->get_name();
  apply_defaults(cfg);
  try {
    if (chosen == sample) return cmd_sample(cfg);
    if (chosen == indep) return cmd_check_independence(cfg);
    if (chosen == regr) return cmd_check_regression(cfg);
    if (chosen == ident) return cmd_check_identities(cfg);
    if (chosen == ode) return cmd_check_ode(cfg);
    return cmd_fit(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kExitGateFailed;
  }
}
