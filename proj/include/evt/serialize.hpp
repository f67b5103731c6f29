#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evt/data_io.hpp"
#include "evt/diagnostics.hpp"
#include "evt/doa.hpp"
#include "evt/fit.hpp"
#include "evt/tail_risk.hpp"
#include "evt/threshold.hpp"

namespace evt {

using Json = nlohmann::ordered_json;

/// Finite values become JSON numbers; inf, -inf and nan become the strings
/// "inf", "-inf" and "nan" (JSON has no literals for them).
Json json_number(double v);
double number_from_json(const Json& j);

Json to_json(const GpdFit& fit);
/// Errc::schema when a required field is missing or mistyped.
GpdFit gpd_fit_from_json(const Json& j);

Json to_json(const SummaryStats& s);
Json to_json(const DoaVerdict& v, bool with_trace);
Json to_json(const PlotSeries& s);
Json to_json(std::span<const MrlPoint> pts);
Json to_json(std::span<const StabilityPoint> pts);
Json to_json(std::span<const LmomPoint> pts);
Json to_json(std::span<const RiskEstimates> rows);
Json to_json(const ThresholdSelection& sel);
Json to_json(const ThresholdSuggestion& s);

// Comma-separated table with a header row; every number is written in the
// shortest form that reads back to the same double.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

CsvTable to_csv(const SummaryStats& s);
CsvTable to_csv(std::span<const MrlPoint> pts);
CsvTable to_csv(std::span<const StabilityPoint> pts);
CsvTable to_csv(std::span<const LmomPoint> pts);
CsvTable to_csv(const PlotSeries& s);
CsvTable to_csv(std::span<const RiskEstimates> rows);
CsvTable to_csv(const ThresholdSelection& sel);
CsvTable to_csv(const ThresholdSuggestion& s);
CsvTable to_csv(const Portfolio& p);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace evt
