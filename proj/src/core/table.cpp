#include "rkindex/table.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>

#include "rkindex/error.hpp"

namespace rkindex {

namespace {

bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\n\r") != std::string_view::npos;
}

void append_csv_field(std::string& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

Json cell_json(const Cell& cell) {
  struct Visitor {
    Json operator()(std::monostate) const { return nullptr; }
    Json operator()(std::int64_t v) const { return v; }
    Json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      return v;
    }
    Json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

std::string meta_value_text(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  require(row.size() == columns.size(),
          "row has " + std::to_string(row.size()) + " cells, table '" + name +
              "' has " + std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) return i;
  fail(Errc::unknown_label, "no column '" + std::string(column) + "' in table '" + name + "'");
}

std::string Table::to_csv(bool with_comments) const {
  std::string out;
  if (with_comments) {
    for (const auto& [key, value] : meta.items()) {
      out += "# ";
      out += key;
      out += '=';
      out += meta_value_text(value);
      out += '\n';
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    append_csv_field(out, columns[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_csv_field(out, cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  Json doc = Json::object();
  doc["metadata"] = meta;
  doc["metadata"]["generated_at"] = provenance_timestamp();
  doc["columns"] = columns;
  Json rows_json = Json::array();
  for (const auto& row : rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[columns[i]] = cell_json(row[i]);
    rows_json.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows_json);
  return doc.dump(2) + "\n";
}

std::string Table::sidecar_json() const {
  Json doc = Json::object();
  doc["name"] = name;
  doc["metadata"] = meta;
  doc["metadata"]["generated_at"] = provenance_timestamp();
  doc["columns"] = columns;
  doc["row_count"] = rows.size();
  return doc.dump(2) + "\n";
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) fail(Errc::invalid_argument, "cannot format double");
  return std::string(buf, end);
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string tool_version() {
#ifdef RKINDEX_VERSION_STRING
  return RKINDEX_VERSION_STRING;
#else
  return "0.0.0";
#endif
}

std::string provenance_timestamp() {
  std::time_t seconds = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    long long parsed = 0;
    std::string_view sv(env);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), parsed);
    if (ec == std::errc{} && ptr == sv.data() + sv.size()) seconds = static_cast<std::time_t>(parsed);
    else seconds = std::time(nullptr);
  } else {
    seconds = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm utc{};
  gmtime_r(&seconds, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace rkindex
