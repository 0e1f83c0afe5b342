#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace rkindex {

using Json = nlohmann::ordered_json;

/// One report cell. monostate renders as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

/// Tabular report with a metadata block. All exports (rank tables,
/// indicator tables, experiment reports, assessment tables) go through this.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json meta = Json::object();

  void add_row(std::vector<Cell> row);
  std::size_t column_index(std::string_view column) const;

  /// Plain RFC-4180 CSV, header first. When `with_comments` is set the
  /// metadata is prepended as `# key=value` lines.
  std::string to_csv(bool with_comments = false) const;

  /// {"metadata": {...}, "columns": [...], "rows": [{col: value, ...}, ...]}
  std::string to_json() const;

  /// Metadata plus row count, for the sidecar written next to a CSV file.
  std::string sidecar_json() const;
};

/// Shortest round-trip decimal representation.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view data) noexcept;
std::string hex64(std::uint64_t value);

std::string tool_version();

/// Seconds since the epoch taken from SOURCE_DATE_EPOCH when set, otherwise
/// the wall clock; rendered as ISO-8601 UTC.
std::string provenance_timestamp();

}  // namespace rkindex
