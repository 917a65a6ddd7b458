#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "alignkit/core_geometry.hpp"
#include "alignkit/experiments.hpp"
#include "alignkit/metrics.hpp"

namespace alignkit {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits: parses back to the identical double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline Error parse_error(std::size_t line, std::size_t column, const std::string& msg) {
  return Error(ErrorKind::Parse,
               "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

}  // namespace detail

/// Dense text matrix: one row per line, values separated by single spaces
/// or commas (tabs and repeated blanks are tolerated). An optional first
/// line "# n d" declares the shape and is checked. Blank lines are skipped;
/// CRLF line endings are accepted. Errors carry 1-based line and column.
inline EmbeddingMatrix parse_matrix(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  long declared_n = -1;
  long declared_d = -1;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);

    const auto first = sv.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (sv[first] == '#') {
      if (rows > 0 || declared_n >= 0) {
        throw detail::parse_error(lineno, first + 1, "header must precede all data rows");
      }
      std::istringstream hs{std::string(sv.substr(first + 1))};
      std::string extra;
      if (!(hs >> declared_n >> declared_d) || (hs >> extra) || declared_n < 1 || declared_d < 1) {
        throw detail::parse_error(lineno, first + 1, "malformed header, expected '# n d'");
      }
      continue;
    }

    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t')) ++pos;
      if (pos >= sv.size()) break;
      const std::size_t column = pos + 1;
      std::size_t end = pos;
      while (end < sv.size() && sv[end] != ' ' && sv[end] != '\t' && sv[end] != ',') ++end;
      const std::string_view token = sv.substr(pos, end - pos);
      if (token.empty()) throw detail::parse_error(lineno, column, "empty field");
      // from_chars does not accept a leading '+'.
      const std::string_view digits = token.front() == '+' ? token.substr(1) : token;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
        throw detail::parse_error(lineno, column, "invalid number '" + std::string(token) + "'");
      }
      if (!std::isfinite(v)) {
        throw detail::parse_error(lineno, column, "non-finite value '" + std::string(token) + "'");
      }
      values.push_back(v);
      ++count;
      pos = end;
      while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t')) ++pos;
      if (pos < sv.size() && sv[pos] == ',') {
        ++pos;
        std::size_t look = pos;
        while (look < sv.size() && (sv[look] == ' ' || sv[look] == '\t')) ++look;
        if (look >= sv.size() || sv[look] == ',') {
          throw detail::parse_error(lineno, look + 1, "empty field");
        }
      }
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw detail::parse_error(lineno, 1,
                                "row has " + std::to_string(count) + " values, expected " + std::to_string(cols));
    }
    ++rows;
  }

  if (rows == 0) throw detail::parse_error(lineno + 1, 1, "no data rows");
  if (declared_n >= 0 && (static_cast<std::size_t>(declared_n) != rows ||
                          static_cast<std::size_t>(declared_d) != cols)) {
    throw detail::parse_error(1, 1,
                              "header declares " + shape_string(declared_n, declared_d) +
                                  " but data is " + shape_string(static_cast<long>(rows), static_cast<long>(cols)));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
  return EmbeddingMatrix(std::move(m));
}

inline EmbeddingMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  try {
    return parse_matrix(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

/// Writes the "# n d" header followed by space-separated rows.
inline void write_matrix(std::ostream& out, const EmbeddingMatrix& e) {
  out << "# " << e.n() << ' ' << e.d() << '\n';
  for (Eigen::Index i = 0; i < e.n(); ++i) {
    for (Eigen::Index j = 0; j < e.d(); ++j) {
      if (j) out << ' ';
      out << format_double(e.data()(i, j));
    }
    out << '\n';
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

inline void write_matrix(const std::filesystem::path& path, const EmbeddingMatrix& e) {
  std::ostringstream os;
  write_matrix(os, e);
  write_text_file(path, os.str());
}

// ---------------------------------------------------------------------------
// Reports. Numbers are written by hand with 17 significant digits; reading
// goes through nlohmann::json.

inline std::string report_to_json(const AlignmentReport& r, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  std::ostringstream os;
  auto field = [&](const char* key, const std::string& value, bool last = false) {
    os << pad << "  \"" << key << "\": " << value << (last ? "\n" : ",\n");
  };
  os << "{\n";
  field("version", std::string("\"") + kVersion + "\"");
  field("n", std::to_string(r.n));
  field("d", std::to_string(r.d));
  field("xi_tr", format_double(r.xi_tr));
  field("xi_rot", format_double(r.xi_rot));
  field("xi_sc", format_double(r.xi_sc));
  field("xi_st", format_double(r.xi_st));
  field("t_glob", format_double(r.t_glob));
  field("t_norm", format_double(r.t_norm));
  field("radius_s", format_double(r.radius_s));
  field("radius_t", format_double(r.radius_t));
  field("det_sign", std::to_string(r.det_sign));
  std::string angles = "[";
  for (std::size_t i = 0; i < r.angles.size(); ++i) {
    if (i) angles += ", ";
    angles += format_double(r.angles[i]);
  }
  angles += "]";
  field("angles", angles, true);
  os << pad << "}";
  return os.str();
}

inline std::string reports_to_json(std::span<const AlignmentReport> reports) {
  std::string s = "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    s += "  " + report_to_json(reports[i], 2);
    s += i + 1 < reports.size() ? ",\n" : "\n";
  }
  s += "]\n";
  return s;
}

inline AlignmentReport report_from_json(const nlohmann::json& j) {
  try {
    AlignmentReport r;
    r.n = j.at("n").get<Eigen::Index>();
    r.d = j.at("d").get<Eigen::Index>();
    r.xi_tr = j.at("xi_tr").get<double>();
    r.xi_rot = j.at("xi_rot").get<double>();
    r.xi_sc = j.at("xi_sc").get<double>();
    r.xi_st = j.at("xi_st").get<double>();
    r.t_glob = j.at("t_glob").get<double>();
    r.t_norm = j.at("t_norm").get<double>();
    r.radius_s = j.at("radius_s").get<double>();
    r.radius_t = j.at("radius_t").get<double>();
    r.det_sign = j.at("det_sign").get<int>();
    r.angles = j.at("angles").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed report: ") + e.what());
  }
}

inline AlignmentReport parse_report(std::string_view text) {
  try {
    return report_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("malformed report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV tables. NaN coordinates (axes that do not apply to a cell) are empty.

namespace detail {

inline std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace detail

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  for (const auto& axis : result.axes) out << axis << ',';
  for (const auto& m : result.metrics) out << m << "_mean," << m << "_std,";
  out << "trials\n";
  for (const auto& cell : result.cells) {
    for (double c : cell.coords) out << detail::csv_number(c) << ',';
    for (const auto& s : cell.stats) out << format_double(s.mean) << ',' << format_double(s.std) << ',';
    out << result.trials << '\n';
  }
}

inline void write_demo_csv(std::ostream& out, std::span<const DemoRow> rows) {
  out << "rot_factor,trans_factor,acc_misaligned,acc_aligned\n";
  for (const auto& r : rows) {
    out << format_double(r.rotation_factor) << ',' << format_double(r.translation_factor) << ','
        << format_double(r.accuracy_misaligned) << ',' << format_double(r.accuracy_aligned) << '\n';
  }
}

}  // namespace alignkit
