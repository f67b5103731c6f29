// evtail: batch front end for the tail-risk library.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evt/data_io.hpp"
#include "evt/diagnostics.hpp"
#include "evt/doa.hpp"
#include "evt/error.hpp"
#include "evt/fit.hpp"
#include "evt/numfmt.hpp"
#include "evt/serialize.hpp"
#include "evt/tail_risk.hpp"
#include "evt/threshold.hpp"

namespace fs = std::filesystem;
using namespace evt;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNonConvergence = 4 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string simulate_config;
  std::string group_by = "none";
  std::vector<double> us;
  std::string u_grid;
  std::vector<double> qs = {0.95, 0.99, 0.995};
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::string format = "csv";
  std::size_t min_exceed = kDefaultMinExceed;
  std::string fit_path;
  std::vector<std::string> specs;
  std::vector<double> periods;
  double obs_per_period = 1.0;
  std::size_t bins = 30;
  double bin_width = 0.0;
  bool suggest = false;
  bool raw = false;
  bool trace = false;
  std::string size_column = "claim_size";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::string name;
  std::vector<double> values;
};

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& file, const std::string& content) {
    write_atomic(dir_ / file, content);
    files_.push_back(file);
  }
  void table(const std::string& stem, const std::string& format, const CsvTable& csv, const Json& json) {
    if (format == "json") {
      write(stem + ".json", json.dump(2) + "\n");
    } else {
      write(stem + ".csv", csv.str());
    }
  }
  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  double lo = 0, hi = 0, steps = 0;
  if (a == std::string::npos || b == std::string::npos || !parse_number(spec.substr(0, a), lo) ||
      !parse_number(spec.substr(a + 1, b - a - 1), hi) || !parse_number(spec.substr(b + 1), steps) ||
      !(hi >= lo) || !(steps >= 1) || steps != std::floor(steps)) {
    throw UsageError("--u-grid expects lo:hi:steps with lo <= hi and an integer steps >= 1");
  }
  const auto n = static_cast<std::size_t>(steps);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

std::vector<double> grid_for(const RunConfig& cfg, const std::vector<double>& values) {
  return cfg.u_grid.empty() ? default_u_grid(values) : parse_grid(cfg.u_grid);
}

Portfolio load_portfolio(const RunConfig& cfg, std::string& name, Json& inputs) {
  const bool have_input = !cfg.input.empty();
  const bool have_sim = !cfg.simulate_config.empty();
  if (have_input == have_sim) throw UsageError("give exactly one of --input or --simulate-config");
  if (have_input) {
    CsvSchema schema;
    schema.size_column = cfg.size_column;
    Portfolio p = load_csv(cfg.input, schema);
    inputs.push_back({{"path", cfg.input}, {"bytes", fs::file_size(cfg.input)},
                      {"records", p.size()}, {"rejected", p.rejected}, {"warnings", p.warnings}});
    if (p.rejected > 0) std::cerr << "warning: " << p.rejected << " malformed row(s) skipped\n";
    if (p.warnings > 0) std::cerr << "warning: " << p.warnings << " unmapped class code(s)\n";
    name = fs::path(cfg.input).stem().string();
    return p;
  }
  SimConfig sc = load_sim_config(cfg.simulate_config);
  if (cfg.seed) sc.seed = *cfg.seed;
  inputs.push_back({{"path", cfg.simulate_config}, {"bytes", fs::file_size(cfg.simulate_config)},
                    {"seed", sc.seed}});
  name = "simulated";
  return simulate_portfolio(sc);
}

std::vector<Dataset> load_datasets(const RunConfig& cfg, Json& inputs) {
  std::string name;
  const Portfolio p = load_portfolio(cfg, name, inputs);
  if (p.size() == 0) throw Error(Errc::insufficient_data, "no usable records");
  std::vector<Dataset> out;
  for (auto& [label, sub] : group(p, parse_group_by(cfg.group_by))) {
    Dataset d;
    d.name = label == "all" ? name : name + "-" + label;
    if (cfg.raw) {
      for (const auto& r : sub.records) d.values.push_back(r.claim_size);
    } else {
      d.values = sub.log_sizes;
    }
    out.push_back(std::move(d));
  }
  return out;
}

GpdFit fit_at(const Dataset& d, double u) {
  const ExcessSample s = exceedances(d.values, u);
  if (s.n_exceed == 0) throw Error(Errc::no_exceedance, d.name + ": no observation exceeds u=" + format_number(u));
  return fit_gpd_mle(s);
}

GpdFit fit_for(const RunConfig& cfg, const Dataset& d, Json& inputs) {
  if (!cfg.fit_path.empty()) {
    std::ifstream in(cfg.fit_path);
    if (!in) throw Error(Errc::io, "cannot read " + cfg.fit_path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::schema, cfg.fit_path + ": " + e.what());
    }
    inputs.push_back({{"path", cfg.fit_path}, {"bytes", fs::file_size(cfg.fit_path)}});
    // A fit file may hold one fit or one per dataset keyed by name.
    const Json& node = j.contains(d.name) ? j.at(d.name) : j;
    return gpd_fit_from_json(node);
  }
  if (cfg.us.size() != 1) throw UsageError("give one threshold with --u, or a fit file with --fit");
  return fit_at(d, cfg.us.front());
}

void cmd_summary(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  for (const auto& d : ds) {
    const auto s = summarize(d.values);
    out.table(d.name + "_summary", cfg.format, to_csv(s), to_json(s));
  }
}

void cmd_mrl(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  for (const auto& d : ds) {
    const auto pts = mrl_curve(d.values, grid_for(cfg, d.values), cfg.min_exceed);
    out.table(d.name + "_mrl", cfg.format, to_csv(std::span<const MrlPoint>(pts)),
              to_json(std::span<const MrlPoint>(pts)));
  }
}

void cmd_stability(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  for (const auto& d : ds) {
    const auto c = stability_curve(d.values, grid_for(cfg, d.values), cfg.min_exceed);
    if (c.skipped > 0) std::cerr << d.name << ": " << c.skipped << " threshold fit(s) skipped\n";
    Json j{{"skipped", c.skipped}, {"points", to_json(std::span<const StabilityPoint>(c.points))}};
    out.table(d.name + "_stability", cfg.format, to_csv(std::span<const StabilityPoint>(c.points)), j);
  }
}

void cmd_lmom(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  for (const auto& d : ds) {
    const auto pts = lmoment_curve(d.values, grid_for(cfg, d.values), cfg.min_exceed);
    out.table(d.name + "_lmom", cfg.format, to_csv(std::span<const LmomPoint>(pts)),
              to_json(std::span<const LmomPoint>(pts)));
  }
}

void cmd_qqexp(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  for (const auto& d : ds) {
    const auto s = qq_exponential(d.values);
    out.table(d.name + "_qqexp", cfg.format, to_csv(s), to_json(s));
  }
}

void cmd_fit(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  if (cfg.us.size() != 1) throw UsageError("fit needs exactly one --u");
  for (const auto& d : ds) {
    const GpdFit f = fit_at(d, cfg.us.front());
    out.write(d.name + "_fit.json", to_json(f).dump(2) + "\n");
  }
}

void cmd_select(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out) {
  if (cfg.us.empty() && !cfg.suggest) throw UsageError("select needs candidate thresholds (--u) or --suggest");
  for (const auto& d : ds) {
    if (!cfg.us.empty()) {
      const auto sel = score_thresholds(d.values, cfg.us, cfg.bin_width);
      out.table(d.name + "_select", cfg.format, to_csv(sel), to_json(sel));
    }
    if (cfg.suggest) {
      SuggestOptions opts;
      opts.min_exceed = cfg.min_exceed;
      const auto s = suggest_threshold(d.values, grid_for(cfg, d.values), opts);
      if (!s.found) std::cerr << d.name << ": no grid threshold passed both checks\n";
      out.table(d.name + "_suggest", cfg.format, to_csv(s), to_json(s));
    }
  }
}

void cmd_var(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out, Json& inputs) {
  for (const auto& d : ds) {
    const GpdFit f = fit_for(cfg, d, inputs);
    const auto rows = risk_table(TailModel::from_fit(f), cfg.qs);
    out.table(d.name + "_var", cfg.format, to_csv(std::span<const RiskEstimates>(rows)),
              to_json(std::span<const RiskEstimates>(rows)));
  }
}

void cmd_diagnose(const RunConfig& cfg, const std::vector<Dataset>& ds, Outputs& out, Json& inputs) {
  for (const auto& d : ds) {
    const GpdFit f = fit_for(cfg, d, inputs);
    const ExcessSample s = exceedances(d.values, f.threshold);
    if (s.n_exceed != f.n_exceed || s.n_total != f.n_total) {
      throw Error(Errc::invalid_input, d.name + ": fit counts do not match the data at u=" +
                                           format_number(f.threshold));
    }
    std::vector<PlotSeries> series{pp_plot(f, s.excesses), qq_gpd(f, s.excesses)};
    if (f.cov) {
      const TailModel m = TailModel::from_fit(f);
      // By default, periods run from one exceedance's worth of observations
      // up to a thousand times the sample size.
      std::vector<double> periods = cfg.periods;
      if (periods.empty()) {
        const double lo = static_cast<double>(f.n_total) / static_cast<double>(f.n_exceed) / cfg.obs_per_period;
        periods = log_spaced(lo, 1000.0 * static_cast<double>(f.n_total) / cfg.obs_per_period, 60);
      }
      series.push_back(return_level_series(m, *f.cov, periods, cfg.obs_per_period));
    }
    const auto dens = density_series(f, s.excesses, cfg.bins);
    series.push_back(dens.histogram);
    series.push_back(dens.fitted);
    Json all = Json::object();
    for (const auto& p : series) {
      const std::string kind(to_string(p.kind));
      if (cfg.format == "json") {
        all[kind] = to_json(p);
      } else {
        out.write(d.name + "_" + kind + ".csv", to_csv(p).str());
      }
    }
    if (cfg.format == "json") out.write(d.name + "_diagnostics.json", all.dump(2) + "\n");
  }
}

void cmd_simulate(const RunConfig& cfg, Outputs& out, Json& inputs) {
  SimConfig sc;
  if (!cfg.simulate_config.empty()) {
    sc = load_sim_config(cfg.simulate_config);
    inputs.push_back({{"path", cfg.simulate_config}, {"bytes", fs::file_size(cfg.simulate_config)}});
  }
  if (cfg.seed) sc.seed = *cfg.seed;
  const Portfolio p = simulate_portfolio(sc);
  out.write("portfolio.csv", to_csv(p).str());
  out.write("portfolio_config.txt", format_sim_config(sc));
}

void cmd_classify(const RunConfig& cfg, Outputs& out) {
  const std::vector<std::string> names = cfg.specs.empty() ? builtin_spec_names() : cfg.specs;
  CsvTable t{{"spec", "domain", "gamma_hat", "criterion", "residual"}, {}};
  Json j = Json::array();
  for (const auto& n : names) {
    const DoaVerdict v = classify_domain(builtin_spec(n));
    t.add({n, std::string(to_string(v.classified_domain)), format_number(v.gamma_hat),
           std::string(to_string(v.criterion_used)), format_number(v.residual)});
    Json e = to_json(v, cfg.trace);
    e["spec"] = n;
    j.push_back(std::move(e));
  }
  out.table("doa", cfg.format, t, j);
}

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::non_convergence: return kNonConvergence;
    case Errc::config:
    case Errc::invalid_parameter:
    case Errc::domain: return kUsage;
    default: return kData;
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool data = true) {
  sub->add_option("--out-dir", cfg.out_dir, "Directory for output files")->capture_default_str();
  sub->add_option("--format", cfg.format, "Output format for tables")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Seed overriding the simulator config");
  if (!data) return;
  sub->add_option("--input", cfg.input, "Claims CSV file");
  sub->add_option("--simulate-config", cfg.simulate_config, "Simulator key=value config");
  sub->add_option("--group-by", cfg.group_by, "Split by policyholder class")
      ->check(CLI::IsMember({"none", "gender", "experience"}))
      ->capture_default_str();
  sub->add_option("--size-column", cfg.size_column, "Claim size column name")->capture_default_str();
  sub->add_flag("--raw", cfg.raw, "Analyse claim sizes instead of their natural logs");
}

void add_grid(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--u-grid", cfg.u_grid, "Threshold grid lo:hi:steps (default: 40 points, 50th-99.5th pct)");
  sub->add_option("--min-exceed", cfg.min_exceed, "Minimum exceedances per threshold")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg;
  CLI::App app{"Peaks-over-threshold tail analysis of claim sizes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* summary = app.add_subcommand("summary", "Summary statistics");
  add_common(summary, cfg);
  auto* mrl = app.add_subcommand("mrl", "Mean residual life curve");
  add_common(mrl, cfg);
  add_grid(mrl, cfg);
  auto* stab = app.add_subcommand("stability", "Parameter stability curve");
  add_common(stab, cfg);
  add_grid(stab, cfg);
  auto* lmom = app.add_subcommand("lmom", "L-moment ratio curve");
  add_common(lmom, cfg);
  add_grid(lmom, cfg);
  auto* qqexp = app.add_subcommand("qqexp", "QQ plot against the standard exponential");
  add_common(qqexp, cfg);
  auto* fit = app.add_subcommand("fit", "Maximum likelihood GPD fit above --u");
  add_common(fit, cfg);
  fit->add_option("--u", cfg.us, "Threshold")->required()->expected(1);
  auto* select = app.add_subcommand("select", "Rank candidate thresholds by AIC");
  add_common(select, cfg);
  add_grid(select, cfg);
  select->add_option("--u", cfg.us, "Candidate thresholds")->expected(1, -1);
  select->add_option("--bin-width", cfg.bin_width, "Histogram bin width below each candidate (default: spacing / 5)");
  select->add_flag("--suggest", cfg.suggest, "Also run the automatic threshold suggestion over the grid");
  auto* var = app.add_subcommand("var", "Value-at-risk and expected shortfall");
  add_common(var, cfg);
  var->add_option("--u", cfg.us, "Threshold to fit above")->expected(1);
  var->add_option("--fit", cfg.fit_path, "Fit JSON written by the fit subcommand");
  var->add_option("--q", cfg.qs, "Probability levels")->expected(1, -1)->check(CLI::Range(0.0, 1.0));
  auto* diag = app.add_subcommand("diagnose", "Probability, quantile, return level and density series");
  add_common(diag, cfg);
  diag->add_option("--u", cfg.us, "Threshold to fit above")->expected(1);
  diag->add_option("--fit", cfg.fit_path, "Fit JSON written by the fit subcommand");
  diag->add_option("--periods", cfg.periods, "Return periods")->expected(1, -1)->check(CLI::PositiveNumber);
  diag->add_option("--obs-per-period", cfg.obs_per_period, "Observations per period")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diag->add_option("--bins", cfg.bins, "Histogram bins")->check(CLI::Range(1, 100000))->capture_default_str();
  auto* sim = app.add_subcommand("simulate", "Write a synthetic spliced portfolio");
  add_common(sim, cfg, false);
  sim->add_option("--simulate-config", cfg.simulate_config, "Simulator key=value config");
  auto* doa = app.add_subcommand("classify-doa", "Domain of attraction of built-in distributions");
  add_common(doa, cfg, false);
  doa->add_option("--spec", cfg.specs, "Spec names, e.g. pareto:2 (default: all built-ins)")->expected(1, -1);
  doa->add_flag("--trace", cfg.trace, "Include probe traces in JSON output");

  int code = kOk;
  std::string status = "ok";
  Json inputs = Json::array();
  std::optional<Outputs> outputs;

  bool parsed = true;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit cleanly without a manifest.
    if (app.exit(e) == 0) return kOk;
    parsed = false;
    code = kUsage;
    status = std::string("usage: ") + e.what();
  }
  for (auto* s : app.get_subcommands()) cfg.command = s->get_name();

  if (parsed) try {
    fs::create_directories(cfg.out_dir);
    outputs.emplace(cfg.out_dir);
    if (cfg.command == "simulate") {
      cmd_simulate(cfg, *outputs, inputs);
    } else if (cfg.command == "classify-doa") {
      cmd_classify(cfg, *outputs);
    } else {
      const auto ds = load_datasets(cfg, inputs);
      if (cfg.command == "summary") cmd_summary(cfg, ds, *outputs);
      else if (cfg.command == "mrl") cmd_mrl(cfg, ds, *outputs);
      else if (cfg.command == "stability") cmd_stability(cfg, ds, *outputs);
      else if (cfg.command == "lmom") cmd_lmom(cfg, ds, *outputs);
      else if (cfg.command == "qqexp") cmd_qqexp(cfg, ds, *outputs);
      else if (cfg.command == "fit") cmd_fit(cfg, ds, *outputs);
      else if (cfg.command == "select") cmd_select(cfg, ds, *outputs);
      else if (cfg.command == "var") cmd_var(cfg, ds, *outputs, inputs);
      else if (cfg.command == "diagnose") cmd_diagnose(cfg, ds, *outputs, inputs);
    }
  } catch (const UsageError& e) {
    code = kUsage;
    status = std::string("usage: ") + e.what();
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    status = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const fs::filesystem_error& e) {
    code = kData;
    status = std::string("io: ") + e.what();
  } catch (const std::exception& e) {
    code = kData;
    status = std::string("error: ") + e.what();
  }
  if (code != kOk && parsed) std::cerr << "evtail " << cfg.command << ": " << status << "\n";

  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  Json manifest;
  manifest["tool"] = "evtail";
  manifest["version"] = kVersion;
  manifest["command"] = cfg.command;
  manifest["argv"] = std::vector<std::string>(argv + 1, argv + argc);
  manifest["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  manifest["inputs"] = inputs;
  manifest["outputs"] = outputs ? outputs->files() : std::vector<std::string>{};
  manifest["exit_code"] = code;
  manifest["status"] = status;
  manifest["started_at"] = utc_now();
  manifest["elapsed_ms"] = ms;
  try {
    fs::create_directories(cfg.out_dir);
    write_atomic(fs::path(cfg.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "evtail: could not write manifest: " << e.what() << "\n";
  }
  return code;
}
