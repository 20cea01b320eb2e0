#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairrep/joint_io.hpp"

namespace fairrep {

/// Parsed bounds CSV: comment lines, column names, numeric rows (nan for
/// missing cells).
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::invalid_argument("CSV has no column '" + name + "'");
  }
};

inline CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
      continue;
    }
    std::vector<std::string> toks;
    std::string tok;
    std::istringstream iss(line);
    while (std::getline(iss, tok, ',')) toks.push_back(tok);
    if (!have_header) {
      t.columns = toks;
      have_header = true;
      continue;
    }
    if (toks.size() != t.columns.size()) {
      throw ParseError("row has " + std::to_string(toks.size()) +
                           " fields, header has " +
                           std::to_string(t.columns.size()),
                       lineno);
    }
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& s : toks) {
      if (s == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        row.push_back(parse_double(s, lineno));
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("CSV has no header row", 0);
  return t;
}

inline CsvTable parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_csv(in);
}

/// Gnuplot-compatible companion file: '#'-prefixed column list, then
/// whitespace-separated values (shortest round-trip formatting, so the file
/// re-parses to identical doubles).
inline void write_gnuplot_dat(const CsvTable& t, std::ostream& out) {
  out << '#';
  for (const auto& c : t.columns) out << ' ' << c;
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << (std::isnan(row[i]) ? std::string("nan") : format_double(row[i]));
    }
    out << '\n';
  }
}

namespace detail {

inline const std::vector<std::pair<std::string, std::string>>&
plot_series() {
  // column -> stroke color; clamped lower bounds plus the ceilings.
  static const std::vector<std::pair<std::string, std::string>> s = {
      {"L0_plus", "#888888"},   {"L1_plus", "#1f77b4"},
      {"L2_plus", "#2ca02c"},   {"L1p_plus", "#9467bd"},
      {"L3_plus", "#ff7f0e"},   {"L4_plus", "#8c564b"},
      {"L3p_plus", "#e377c2"},  {"best_lower_plus", "#17becf"},
      {"UB_parity", "#d62728"}, {"UB_rate", "#000000"},
      {"U0", "#bcbd22"}};
  return s;
}

}  // namespace detail

/// Renders the bound curves of a 1-D sweep (whichever of r/epsilon varies)
/// as an SVG; a single-point sweep degenerates to markers.
inline void write_svg_plot(const CsvTable& t, std::ostream& out) {
  const std::size_t rc = t.column("r");
  const std::size_t ec = t.column("epsilon");
  auto varies = [&](std::size_t col) {
    for (const auto& row : t.rows) {
      if (row[col] != t.rows.front()[col]) return true;
    }
    return false;
  };
  if (t.rows.empty()) throw std::invalid_argument("CSV has no data rows");
  std::size_t axis_col;
  if (varies(rc) && varies(ec)) {
    throw std::invalid_argument(
        "CSV sweeps both r and epsilon; plot needs a 1-D sweep");
  }
  axis_col = varies(ec) ? ec : rc;
  const std::string axis_name = t.columns[axis_col];

  const double w = 880, h = 560, ml = 70, mr = 190, mt = 30, mb = 55;
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& row : t.rows) {
    x_min = std::min(x_min, row[axis_col]);
    x_max = std::max(x_max, row[axis_col]);
  }
  std::vector<std::pair<std::size_t, std::string>> series;
  for (const auto& [name, color] : detail::plot_series()) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (t.columns[i] == name) {
        bool any = false;
        for (const auto& row : t.rows) {
          if (!std::isnan(row[i])) {
            any = true;
            y_min = std::min(y_min, row[i]);
            y_max = std::max(y_max, row[i]);
          }
        }
        if (any) series.emplace_back(i, color);
      }
    }
  }
  if (series.empty()) throw std::invalid_argument("CSV has no plottable columns");
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double pad = 0.04 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;
  auto sx = [&](double v) {
    return ml + (v - x_min) / (x_max - x_min) * (w - ml - mr);
  };
  auto sy = [&](double v) {
    return h - mb - (v - y_min) / (y_max - y_min) * (h - mt - mb);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 4.0;
    const double fy = y_min + (y_max - y_min) * i / 4.0;
    out << "<text x=\"" << sx(fx) << "\" y=\"" << h - mb + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(fx)
        << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">" << axis_name
      << "</text>\n";

  std::size_t legend_row = 0;
  for (const auto& [col, color] : series) {
    if (t.rows.size() == 1) {
      const auto& row = t.rows.front();
      if (!std::isnan(row[col])) {
        out << "<circle cx=\"" << sx(row[axis_col]) << "\" cy=\""
            << sy(row[col]) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& row : t.rows) {
        if (std::isnan(row[col])) continue;
        out << sx(row[axis_col]) << ',' << sy(row[col]) << ' ';
      }
      out << "\"/>\n";
    }
    const double ly = mt + 16.0 * static_cast<double>(legend_row++);
    out << "<line x1=\"" << w - mr + 12 << "\" y1=\"" << ly + 8 << "\" x2=\""
        << w - mr + 34 << "\" y2=\"" << ly + 8 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << w - mr + 40 << "\" y=\"" << ly + 12
        << "\" font-size=\"12\">" << t.columns[col] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace fairrep
