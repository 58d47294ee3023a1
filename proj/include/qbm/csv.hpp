#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

/// Shortest exact round-trip decimal for a double (17 significant digits),
/// so emitted files are byte-stable across runs.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> comments;  // emitted as leading "# ..." lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline void atomic_write_text(const std::filesystem::path& path,
                              const std::string& body) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path dir = path.parent_path();
  if (!dir.empty()) {
    fs::create_directories(dir, ec);
    if (ec) {
      throw io_error("cannot create directory " + dir.string() + ": " +
                     ec.message());
    }
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
    out << body;
    out.flush();
    if (!out) throw io_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw io_error("cannot move " + tmp.string() + " into place: " +
                   ec.message());
  }
}

}  // namespace detail

inline std::string render_csv(const CsvTable& table) {
  std::string body;
  for (const auto& c : table.comments) {
    body += "# ";
    body += c;
    body += '\n';
  }
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    if (k) body += ',';
    body += table.columns[k];
  }
  body += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw io_error("csv row width does not match header");
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) body += ',';
      body += format_double(row[k]);
    }
    body += '\n';
  }
  return body;
}

/// Writes via a temporary file and rename so readers never see a partial
/// table.
inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  detail::atomic_write_text(path, render_csv(table));
}

}  // namespace qbm
