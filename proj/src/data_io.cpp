#include "evt/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "evt/error.hpp"
#include "evt/numfmt.hpp"
#include "evt/rng.hpp"
#include "evt/threshold.hpp"

namespace evt {
namespace {

std::string lower_trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one record; quoted fields may contain the delimiter and doubled
// quotes. Returns false on an unterminated quote.
bool split_row(std::string_view line, char delim, std::vector<std::string>& cells) {
  cells.clear();
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return !quoted;
}

std::ptrdiff_t column(const std::vector<std::string>& header, const std::string& name) {
  const std::string want = lower_trim(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower_trim(header[i]) == want) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

template <class E>
E map_code(const std::map<std::string, E>& codes, const std::string& raw, std::size_t& warnings) {
  const std::string key = lower_trim(raw);
  if (key.empty()) return E::Unknown;
  if (auto it = codes.find(key); it != codes.end()) return it->second;
  ++warnings;
  return E::Unknown;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(Gender g) noexcept {
  switch (g) {
    case Gender::Male: return "male";
    case Gender::Female: return "female";
    default: return "unknown";
  }
}

std::string_view to_string(Experience e) noexcept {
  switch (e) {
    case Experience::Young: return "young";
    case Experience::Experienced: return "experienced";
    default: return "unknown";
  }
}

std::string_view to_string(GroupBy g) noexcept {
  switch (g) {
    case GroupBy::Gender: return "gender";
    case GroupBy::Experience: return "experience";
    default: return "none";
  }
}

GroupBy parse_group_by(std::string_view s) {
  if (s == "none") return GroupBy::None;
  if (s == "gender") return GroupBy::Gender;
  if (s == "experience") return GroupBy::Experience;
  throw Error(Errc::invalid_input, "group-by must be gender, experience or none");
}

void Portfolio::add(const ClaimRecord& r) {
  if (!(r.claim_size > 0) || !std::isfinite(r.claim_size)) {
    throw Error(Errc::invalid_input, "claim size must be finite and positive");
  }
  records.push_back(r);
  log_sizes.push_back(std::log(r.claim_size));
}

Portfolio parse_csv(std::string_view text, const CsvSchema& schema) {
  std::vector<std::string> header, cells;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    pos = end + 1;
    return true;
  };

  std::string_view line;
  bool have_header = false;
  while (next_line(line)) {
    if (lower_trim(line).empty()) continue;
    if (!split_row(line, schema.delimiter, header)) throw Error(Errc::schema, "malformed header row");
    have_header = true;
    break;
  }
  if (!have_header) throw Error(Errc::schema, "missing header row");
  const auto size_col = column(header, schema.size_column);
  if (size_col < 0) throw Error(Errc::schema, "missing column '" + schema.size_column + "'");
  const auto g_col = column(header, schema.gender_column);
  const auto e_col = column(header, schema.experience_column);

  Portfolio p;
  while (next_line(line)) {
    if (lower_trim(line).empty()) continue;
    if (!split_row(line, schema.delimiter, cells) ||
        cells.size() <= static_cast<std::size_t>(size_col)) {
      ++p.rejected;
      continue;
    }
    double size = 0;
    if (!parse_number(cells[static_cast<std::size_t>(size_col)], size) || !(size > 0) ||
        !std::isfinite(size)) {
      ++p.rejected;
      continue;
    }
    ClaimRecord r{size};
    if (g_col >= 0 && static_cast<std::size_t>(g_col) < cells.size()) {
      r.gender = map_code(schema.gender_codes, cells[static_cast<std::size_t>(g_col)], p.warnings);
    }
    if (e_col >= 0 && static_cast<std::size_t>(e_col) < cells.size()) {
      r.experience = map_code(schema.experience_codes, cells[static_cast<std::size_t>(e_col)], p.warnings);
    }
    p.add(r);
  }
  return p;
}

Portfolio load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  return parse_csv(read_file(path), schema);
}

std::vector<std::pair<std::string, Portfolio>> group(const Portfolio& p, GroupBy by) {
  if (by == GroupBy::None) return {{"all", p}};
  std::vector<std::pair<std::string, Portfolio>> out;
  auto split = [&](auto key_of, auto... classes) {
    for (auto c : {classes...}) {
      Portfolio sub;
      for (const auto& r : p.records) {
        if (key_of(r) == c) sub.add(r);
      }
      if (sub.size() > 0) out.emplace_back(std::string(to_string(c)), std::move(sub));
    }
  };
  if (by == GroupBy::Gender) {
    split([](const ClaimRecord& r) { return r.gender; }, Gender::Male, Gender::Female, Gender::Unknown);
  } else {
    split([](const ClaimRecord& r) { return r.experience; }, Experience::Young,
          Experience::Experienced, Experience::Unknown);
  }
  return out;
}

SummaryStats summarize(std::span<const double> values) {
  if (values.size() < 2) throw Error(Errc::insufficient_data, "summary needs at least 2 values");
  SummaryStats s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.sd = std::sqrt(m2 * n / (n - 1));
  s.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.p90 = percentile(values, 0.90);
  s.p95 = percentile(values, 0.95);
  s.p99 = percentile(values, 0.99);
  return s;
}

void validate(const SimConfig& c) {
  auto fail = [](const std::string& m) { throw Error(Errc::config, m); };
  if (c.n == 0) fail("n must be positive");
  if (!std::isfinite(c.body_mu)) fail("body_mu must be finite");
  if (!(c.body_sigma > 0) || !std::isfinite(c.body_sigma)) fail("body_sigma must be positive");
  if (!(c.splice_u > 0) || !std::isfinite(c.splice_u)) fail("splice_u must be positive");
  if (!(c.tail.beta > 0) || !std::isfinite(c.tail.beta) || !std::isfinite(c.tail.xi)) {
    fail("tail parameters must be finite with tail_beta > 0");
  }
  if (!(c.tail_weight >= 0 && c.tail_weight < 1)) fail("tail_weight must lie in [0, 1)");
  if (!(c.p_male >= 0 && c.p_male <= 1)) fail("p_male must lie in [0, 1]");
  if (!(c.p_young >= 0 && c.p_young <= 1)) fail("p_young must lie in [0, 1]");
  const double z = (std::log(c.splice_u) - c.body_mu) / c.body_sigma;
  if (!(boost::math::cdf(boost::math::normal_distribution<double>(), z) > 1e-12)) {
    fail("lognormal body has no mass below splice_u");
  }
}

Portfolio simulate_portfolio(const SimConfig& c) {
  validate(c);
  const boost::math::normal_distribution<double> std_normal;
  const double below = boost::math::cdf(std_normal, (std::log(c.splice_u) - c.body_mu) / c.body_sigma);
  SplitMix64 rng(c.seed);
  Portfolio p;
  p.records.reserve(c.n);
  p.log_sizes.reserve(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    // Four draws per record keep streams aligned across configurations.
    const double branch = rng.uniform();
    const double v = rng.uniform();
    const double g = rng.uniform();
    const double e = rng.uniform();
    double log_size;
    if (branch < c.tail_weight) {
      log_size = c.splice_u + gpd_quantile(c.tail, v);
    } else {
      const double z = boost::math::quantile(std_normal, v * below);
      log_size = std::min(std::exp(c.body_mu + c.body_sigma * z), std::nextafter(c.splice_u, 0.0));
    }
    ClaimRecord r{std::exp(log_size), g < c.p_male ? Gender::Male : Gender::Female,
                  e < c.p_young ? Experience::Young : Experience::Experienced};
    p.records.push_back(r);
    p.log_sizes.push_back(log_size);
  }
  return p;
}

SimConfig parse_sim_config(std::string_view text) {
  SimConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (lower_trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::config, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower_trim(std::string_view(line).substr(0, eq));
    const std::string val = lower_trim(std::string_view(line).substr(eq + 1));
    auto whole = [&](auto& dst) {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc{} || ptr != val.data() + val.size()) {
        throw Error(Errc::config, "'" + key + "' must be a non-negative integer");
      }
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    };
    double x = 0;
    if (key != "n" && key != "seed" && !parse_number(val, x)) {
      throw Error(Errc::config, "line " + std::to_string(lineno) + ": '" + key + "' needs a number");
    }
    if (key == "n") whole(c.n);
    else if (key == "seed") whole(c.seed);
    else if (key == "body_mu") c.body_mu = x;
    else if (key == "body_sigma") c.body_sigma = x;
    else if (key == "splice_u") c.splice_u = x;
    else if (key == "tail_xi") c.tail.xi = x;
    else if (key == "tail_beta") c.tail.beta = x;
    else if (key == "tail_weight") c.tail_weight = x;
    else if (key == "p_male") c.p_male = x;
    else if (key == "p_young") c.p_young = x;
    else throw Error(Errc::config, "unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  return parse_sim_config(read_file(path));
}

std::string format_sim_config(const SimConfig& c) {
  std::string s;
  auto kv = [&](const char* k, const std::string& v) { s += std::string(k) + " = " + v + "\n"; };
  kv("n", std::to_string(c.n));
  kv("seed", std::to_string(c.seed));
  kv("body_mu", format_number(c.body_mu));
  kv("body_sigma", format_number(c.body_sigma));
  kv("splice_u", format_number(c.splice_u));
  kv("tail_xi", format_number(c.tail.xi));
  kv("tail_beta", format_number(c.tail.beta));
  kv("tail_weight", format_number(c.tail_weight));
  kv("p_male", format_number(c.p_male));
  kv("p_young", format_number(c.p_young));
  return s;
}

}  // namespace evt
