#include "evt/serialize.hpp"

#include <cmath>
#include <fstream>

#include "evt/error.hpp"
#include "evt/numfmt.hpp"

namespace evt {
namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::schema, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::schema, std::string("field '") + key + "' has the wrong type");
  }
}

double number_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::schema, std::string("missing field '") + key + "'");
  return number_from_json(j.at(key));
}

}  // namespace

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(Errc::schema, "expected a number");
}

Json to_json(const GpdFit& f) {
  Json j;
  j["method"] = std::string(to_string(f.method));
  j["threshold"] = json_number(f.threshold);
  j["xi"] = json_number(f.params.xi);
  j["beta"] = json_number(f.params.beta);
  j["se_xi"] = json_number(f.se_xi);
  j["se_beta"] = json_number(f.se_beta);
  if (f.cov) {
    j["cov"] = Json::array({Json::array({json_number(f.cov->xi_xi), json_number(f.cov->xi_beta)}),
                            Json::array({json_number(f.cov->xi_beta), json_number(f.cov->beta_beta)})});
  } else {
    j["cov"] = nullptr;
  }
  j["loglik"] = json_number(f.loglik);
  j["n_total"] = f.n_total;
  j["n_exceed"] = f.n_exceed;
  j["converged"] = f.converged;
  j["reliable"] = f.reliable;
  j["grad_norm"] = json_number(f.grad_norm);
  return j;
}

GpdFit gpd_fit_from_json(const Json& j) {
  GpdFit f;
  const auto method = field<std::string>(j, "method");
  if (method == "MLE") f.method = FitMethod::MLE;
  else if (method == "PWM") f.method = FitMethod::PWM;
  else throw Error(Errc::schema, "unknown fit method '" + method + "'");
  f.threshold = number_field(j, "threshold");
  f.params = {number_field(j, "xi"), number_field(j, "beta")};
  f.se_xi = number_field(j, "se_xi");
  f.se_beta = number_field(j, "se_beta");
  const Json& c = j.contains("cov") ? j.at("cov") : Json();
  if (!c.is_null()) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_array() || c[0].size() != 2 ||
        !c[1].is_array() || c[1].size() != 2) {
      throw Error(Errc::schema, "cov must be a 2x2 array");
    }
    f.cov = Cov2{number_from_json(c[0][0]), number_from_json(c[0][1]), number_from_json(c[1][1])};
  }
  f.loglik = number_field(j, "loglik");
  f.n_total = field<std::size_t>(j, "n_total");
  f.n_exceed = field<std::size_t>(j, "n_exceed");
  f.converged = field<bool>(j, "converged");
  f.reliable = field<bool>(j, "reliable");
  if (j.contains("grad_norm")) f.grad_norm = number_from_json(j.at("grad_norm"));
  return f;
}

Json to_json(const SummaryStats& s) {
  Json j;
  j["n"] = s.n;
  j["mean"] = json_number(s.mean);
  j["sd"] = json_number(s.sd);
  j["min"] = json_number(s.min);
  j["max"] = json_number(s.max);
  j["skewness"] = json_number(s.skewness);
  j["kurtosis"] = json_number(s.kurtosis);
  j["p90"] = json_number(s.p90);
  j["p95"] = json_number(s.p95);
  j["p99"] = json_number(s.p99);
  return j;
}

Json to_json(const DoaVerdict& v, bool with_trace) {
  Json j;
  j["domain"] = std::string(to_string(v.classified_domain));
  j["gamma_hat"] = json_number(v.gamma_hat);
  j["criterion"] = std::string(to_string(v.criterion_used));
  j["residual"] = json_number(v.residual);
  if (with_trace) {
    Json t = Json::array();
    for (const auto& p : v.trace) {
      t.push_back({{"level", json_number(p.level)}, {"x", json_number(p.x)},
                   {"estimate", json_number(p.estimate)}, {"spread", json_number(p.spread)}});
    }
    j["trace"] = std::move(t);
  }
  return j;
}

Json to_json(const PlotSeries& s) {
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  Json m = Json::object();
  for (const auto& [k, v] : s.meta) m[k] = json_number(v);
  j["meta"] = std::move(m);
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back(Json::array({json_number(p.x), json_number(p.y)}));
  j["points"] = std::move(pts);
  if (s.bands) {
    Json b = Json::array();
    for (const auto& x : *s.bands) {
      b.push_back(Json::array({json_number(x.x), json_number(x.lo), json_number(x.hi)}));
    }
    j["bands"] = std::move(b);
  }
  return j;
}

Json to_json(std::span<const MrlPoint> pts) {
  Json a = Json::array();
  for (const auto& p : pts) {
    a.push_back({{"u", json_number(p.u)}, {"mean_excess", json_number(p.mean_excess)},
                 {"se", json_number(p.se)}, {"n_u", p.n_u}});
  }
  return a;
}

Json to_json(std::span<const StabilityPoint> pts) {
  Json a = Json::array();
  for (const auto& p : pts) {
    a.push_back({{"u", json_number(p.u)}, {"sigma_star", json_number(p.sigma_star)},
                 {"se_sigma_star", json_number(p.se_sigma_star)}, {"xi_hat", json_number(p.xi_hat)},
                 {"se_xi", json_number(p.se_xi)}, {"n_u", p.n_u}});
  }
  return a;
}

Json to_json(std::span<const LmomPoint> pts) {
  Json a = Json::array();
  for (const auto& p : pts) {
    a.push_back({{"u", json_number(p.u)}, {"tau3", json_number(p.tau3)}, {"tau4", json_number(p.tau4)},
                 {"tau4_gpd", json_number(p.tau4_gpd)}, {"n_u", p.n_u}});
  }
  return a;
}

Json to_json(std::span<const RiskEstimates> rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"q", json_number(r.q)}, {"var", json_number(r.var_q)}, {"es", json_number(r.es_q)}});
  }
  return a;
}

Json to_json(const ThresholdSelection& sel) {
  Json j;
  j["region_lower"] = json_number(sel.region_lower);
  j["bin_width"] = json_number(sel.bin_width);
  Json fits = Json::array();
  for (const auto& f : sel.fits) {
    fits.push_back({{"label", threshold_label(f.threshold)}, {"bins", f.bins}, {"n_region", f.n_region},
                    {"loglik", json_number(f.loglik)}, {"tail", to_json(f.tail)}});
  }
  j["fits"] = std::move(fits);
  Json rank = Json::array();
  for (const auto& s : sel.ranking) {
    rank.push_back({{"label", s.label}, {"k", s.k}, {"loglik", json_number(s.loglik)},
                    {"aic", json_number(s.aic)}, {"deviance", json_number(s.deviance)}});
  }
  j["ranking"] = std::move(rank);
  return j;
}

Json to_json(const ThresholdSuggestion& s) {
  Json j;
  j["u_star"] = json_number(s.u_star);
  j["found"] = s.found;
  Json a = Json::array();
  for (const auto& sc : s.scores) {
    a.push_back({{"u", json_number(sc.u)}, {"n_u", sc.n_u}, {"linearity", json_number(sc.linearity)},
                 {"stability", json_number(sc.stability)}, {"linear", sc.linear}, {"stable", sc.stable}});
  }
  j["scores"] = std::move(a);
  return j;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

CsvTable to_csv(const SummaryStats& s) {
  CsvTable t{{"n", "mean", "sd", "min", "max", "skewness", "kurtosis", "p90", "p95", "p99"}, {}};
  t.add({num(s.n), num(s.mean), num(s.sd), num(s.min), num(s.max), num(s.skewness), num(s.kurtosis),
         num(s.p90), num(s.p95), num(s.p99)});
  return t;
}

CsvTable to_csv(std::span<const MrlPoint> pts) {
  CsvTable t{{"u", "mean_excess", "se", "n_u"}, {}};
  for (const auto& p : pts) t.add({num(p.u), num(p.mean_excess), num(p.se), num(p.n_u)});
  return t;
}

CsvTable to_csv(std::span<const StabilityPoint> pts) {
  CsvTable t{{"u", "sigma_star", "se_sigma_star", "xi_hat", "se_xi", "n_u"}, {}};
  for (const auto& p : pts) {
    t.add({num(p.u), num(p.sigma_star), num(p.se_sigma_star), num(p.xi_hat), num(p.se_xi), num(p.n_u)});
  }
  return t;
}

CsvTable to_csv(std::span<const LmomPoint> pts) {
  CsvTable t{{"u", "tau3", "tau4", "tau4_gpd", "n_u"}, {}};
  for (const auto& p : pts) t.add({num(p.u), num(p.tau3), num(p.tau4), num(p.tau4_gpd), num(p.n_u)});
  return t;
}

CsvTable to_csv(const PlotSeries& s) {
  CsvTable t{{"x", "y"}, {}};
  if (s.bands) {
    t.header.push_back("lo");
    t.header.push_back("hi");
  }
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    std::vector<std::string> row{num(s.points[i].x), num(s.points[i].y)};
    if (s.bands) {
      row.push_back(num((*s.bands)[i].lo));
      row.push_back(num((*s.bands)[i].hi));
    }
    t.add(std::move(row));
  }
  return t;
}

CsvTable to_csv(std::span<const RiskEstimates> rows) {
  CsvTable t{{"q", "var", "es"}, {}};
  for (const auto& r : rows) t.add({num(r.q), num(r.var_q), num(r.es_q)});
  return t;
}

CsvTable to_csv(const ThresholdSelection& sel) {
  CsvTable t{{"label", "u", "k", "loglik", "aic", "deviance", "xi", "beta", "n_exceed"}, {}};
  for (const auto& s : sel.ranking) {
    for (const auto& f : sel.fits) {
      if (threshold_label(f.threshold) != s.label) continue;
      t.add({s.label, num(f.threshold), std::to_string(s.k), num(s.loglik), num(s.aic), num(s.deviance),
             num(f.tail.params.xi), num(f.tail.params.beta), num(f.tail.n_exceed)});
    }
  }
  return t;
}

CsvTable to_csv(const ThresholdSuggestion& s) {
  CsvTable t{{"u", "n_u", "linearity", "stability", "linear", "stable", "selected"}, {}};
  for (const auto& sc : s.scores) {
    t.add({num(sc.u), num(sc.n_u), num(sc.linearity), num(sc.stability), sc.linear ? "1" : "0",
           sc.stable ? "1" : "0", s.found && sc.u == s.u_star ? "1" : "0"});
  }
  return t;
}

CsvTable to_csv(const Portfolio& p) {
  CsvTable t{{"claim_size", "gender", "experience"}, {}};
  for (const auto& r : p.records) {
    t.add({num(r.claim_size), std::string(to_string(r.gender)), std::string(to_string(r.experience))});
  }
  return t;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(Errc::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io, "cannot rename onto " + path.string());
  }
}

}  // namespace evt
