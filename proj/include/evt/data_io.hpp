#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evt/dist.hpp"

namespace evt {

enum class Gender { Male, Female, Unknown };
enum class Experience { Young, Experienced, Unknown };
enum class GroupBy { None, Gender, Experience };

std::string_view to_string(Gender g) noexcept;
std::string_view to_string(Experience e) noexcept;
std::string_view to_string(GroupBy g) noexcept;
GroupBy parse_group_by(std::string_view s);

struct ClaimRecord {
  double claim_size;
  Gender gender = Gender::Unknown;
  Experience experience = Experience::Unknown;
};

// Claims with their natural-log sizes kept in step.
struct Portfolio {
  std::vector<ClaimRecord> records;
  std::vector<double> log_sizes;
  std::size_t rejected = 0;  // malformed or non-positive rows
  std::size_t warnings = 0;  // unmapped class codes

  void add(const ClaimRecord& r);
  std::size_t size() const { return records.size(); }
};

// Column names and class-code mappings for load_csv. Codes are matched
// case-insensitively after trimming; empty cells map to Unknown silently.
struct CsvSchema {
  std::string size_column = "claim_size";
  std::string gender_column = "gender";
  std::string experience_column = "experience";
  std::map<std::string, Gender> gender_codes = {
      {"m", Gender::Male}, {"male", Gender::Male}, {"f", Gender::Female}, {"female", Gender::Female}};
  std::map<std::string, Experience> experience_codes = {
      {"y", Experience::Young}, {"young", Experience::Young},
      {"e", Experience::Experienced}, {"experienced", Experience::Experienced}};
  char delimiter = ',';
};

/// Errc::io when unreadable, Errc::schema when the size column is missing.
Portfolio load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
Portfolio parse_csv(std::string_view text, const CsvSchema& schema = {});

/// Order-preserving partition; only non-empty groups are returned, in enum
/// order. GroupBy::None yields a single group named "all".
std::vector<std::pair<std::string, Portfolio>> group(const Portfolio& p, GroupBy by);

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0, sd = 0, min = 0, max = 0;
  double skewness = 0;  // third standardized central moment
  double kurtosis = 0;  // fourth standardized central moment (normal: 3)
  double p90 = 0, p95 = 0, p99 = 0;
};

SummaryStats summarize(std::span<const double> values);

struct SimConfig {
  std::size_t n = 100000;
  double body_mu = 1.9459101090932196;  // ln 7
  double body_sigma = 0.12;
  double splice_u = 8.5;
  GpdParams tail{-0.1, 0.6};
  double tail_weight = 0.08;
  double p_male = 0.6;
  double p_young = 0.3;
  std::uint64_t seed = 42;
};

/// Errc::config unless the parameters are usable.
void validate(const SimConfig& cfg);

/// Log-sizes come from a lognormal body truncated to (0, splice_u) with
/// probability 1 - tail_weight and from splice_u + GPD(tail) otherwise.
Portfolio simulate_portfolio(const SimConfig& cfg);

/// `key = value` lines; '#' starts a comment. Keys mirror SimConfig fields,
/// with tail_xi and tail_beta for the tail parameters.
SimConfig parse_sim_config(std::string_view text);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string format_sim_config(const SimConfig& cfg);

}  // namespace evt
