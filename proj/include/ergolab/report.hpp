#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ergolab/version.hpp"

// Machine-readable experiment reports. Emission is byte-deterministic:
// numbers are printed in shortest round-trip form, key order is fixed, and
// nothing wall-clock dependent is written.

namespace ergolab::expcli {

using Value = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

enum class RunStatus { ok, budget_exceeded, degenerate };

struct ExperimentReport {
  std::string experiment;
  std::map<std::string, std::string> config_echo;  // sorted by key
  std::vector<Table> tables;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::string version = ERGOLAB_VERSION;
  RunStatus status = RunStatus::ok;
};

namespace detail {

/// Shortest round-trip decimal form; '.' decimal separator, locale-free.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_value(const Value& v) {
  if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return std::get<std::string>(v);
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_field(table.columns[c]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += detail::csv_field(detail::format_value(row[c]));
    }
    out += "\r\n";
  }
  return out;
}

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["status"] = report.status == RunStatus::ok              ? "ok"
                : report.status == RunStatus::budget_exceeded ? "budget_exceeded"
                                                              : "degenerate";
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config_echo) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json tables = nlohmann::ordered_json::object();
  for (const auto& t : report.tables) {
    nlohmann::ordered_json jt;
    jt["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (const auto& v : row) {
        if (std::holds_alternative<double>(v)) {
          jr.push_back(std::get<double>(v));
        } else if (std::holds_alternative<std::int64_t>(v)) {
          jr.push_back(std::get<std::int64_t>(v));
        } else if (std::holds_alternative<bool>(v)) {
          jr.push_back(std::get<bool>(v));
        } else {
          jr.push_back(std::get<std::string>(v));
        }
      }
      rows.push_back(jr);
    }
    jt["rows"] = rows;
    tables[t.name] = jt;
  }
  j["tables"] = tables;
  j["warnings"] = report.warnings;
  return j;
}

enum class EmitFormat { csv, json };

/// Writes the report under `dir`: one JSON file, or one CSV per table.
/// Returns the written paths (sorted emission order).
inline std::vector<std::filesystem::path> emit(const ExperimentReport& report,
                                               EmitFormat format,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto write_file = [&](const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("emit: write failed for " + p.string());
    written.push_back(p);
  };
  if (format == EmitFormat::json) {
    write_file(dir / (report.experiment + ".json"), to_json(report).dump(2) + "\n");
    return written;
  }
  for (const auto& t : report.tables) {
    const std::string stem =
        t.name == report.experiment ? t.name : report.experiment + "_" + t.name;
    write_file(dir / (stem + ".csv"), to_csv(t));
  }
  if (!report.warnings.empty()) {
    std::string w;
    w += "warning\r\n";
    for (const auto& s : report.warnings) w += detail::csv_field(s) + "\r\n";
    write_file(dir / (report.experiment + "_warnings.csv"), w);
  }
  return written;
}

}  // namespace ergolab::expcli
