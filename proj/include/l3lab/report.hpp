#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace l3lab {

inline constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<double, std::string>;

/// Column-major description of a result table with one header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// %.17g, which round-trips every finite double.
[[nodiscard]] std::string format_g17(double x);

/// Comma separated, header row, numbers at 17 significant digits. Strings
/// containing commas or quotes are quoted.
[[nodiscard]] std::string to_csv(const Table& t);
/// Inverse of to_csv; cells that parse completely as numbers become doubles.
[[nodiscard]] Table parse_csv(const std::string& text);

/// One JSON object per row, keyed by column.
[[nodiscard]] nlohmann::json to_json(const Table& t);
[[nodiscard]] Table table_from_json(const nlohmann::json& rows, const std::vector<std::string>& columns);

/// Serialized output of one run. `meta` carries the wall time and version and
/// is the only part that varies between identical runs.
struct ResultRecord {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
  double wall_time = 0.0;
  std::string version = kVersion;
};

[[nodiscard]] nlohmann::json to_json(const ResultRecord& r);
[[nodiscard]] ResultRecord record_from_json(const nlohmann::json& j);

}  // namespace l3lab
