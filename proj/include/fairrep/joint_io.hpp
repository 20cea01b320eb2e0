#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairrep/channel.hpp"
#include "fairrep/joint.hpp"

namespace fairrep {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError("bad number '" + tok + "'", line);
  }
  return v;
}

inline std::size_t parse_index(const std::string& tok, std::size_t limit,
                               std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError("bad index '" + tok + "'", line);
  }
  if (v >= limit) {
    throw ParseError("index " + tok + " out of range (alphabet size " +
                         std::to_string(limit) + ")",
                     line);
  }
  return v;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Sparse line-oriented joint format: a `vars:` header declaring variable
/// names and alphabet sizes, optional `labels` lines, then one `<indices...>
/// <probability>` line per nonzero cell. '#' starts a comment; indices are
/// 0-based; unlisted cells are zero.
inline JointDistribution load_joint(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  std::map<std::string, std::vector<std::string>> labels;
  std::vector<double> cells;
  bool have_vars = false;

  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> toks = detail::split_ws(line);
    if (toks.empty()) continue;

    if (toks[0] == "vars:") {
      if (have_vars) throw ParseError("duplicate vars: header", lineno);
      if (toks.size() < 3 || toks.size() % 2 == 0) {
        throw ParseError("vars: expects name/size pairs", lineno);
      }
      for (std::size_t i = 1; i + 1 < toks.size(); i += 2) {
        names.push_back(toks[i]);
        std::size_t sz = 0;
        auto res = std::from_chars(toks[i + 1].data(),
                                   toks[i + 1].data() + toks[i + 1].size(), sz);
        if (res.ec != std::errc() || sz == 0) {
          throw ParseError("bad alphabet size '" + toks[i + 1] + "'", lineno);
        }
        sizes.push_back(sz);
      }
      std::size_t total = 1;
      for (std::size_t sz : sizes) total *= sz;
      cells.assign(total, 0.0);
      have_vars = true;
      continue;
    }
    if (!have_vars) throw ParseError("expected vars: header first", lineno);

    if (toks[0] == "labels") {
      if (toks.size() < 3) throw ParseError("labels expects a variable name "
                                            "and symbols", lineno);
      labels[toks[1]] = std::vector<std::string>(toks.begin() + 2, toks.end());
      continue;
    }

    if (toks.size() != names.size() + 1) {
      throw ParseError("expected " + std::to_string(names.size()) +
                           " indices and a probability",
                       lineno);
    }
    std::size_t lin = 0;
    for (std::size_t a = 0; a < names.size(); ++a) {
      lin = lin * sizes[a] + parse_index(toks[a], sizes[a], lineno);
    }
    const double p = parse_double(toks.back(), lineno);
    if (p < 0.0) throw ParseError("negative probability", lineno);
    cells[lin] += p;
  }
  if (!have_vars) throw ParseError("missing vars: header", 0);

  std::vector<Variable> vars;
  for (std::size_t a = 0; a < names.size(); ++a) {
    auto it = labels.find(names[a]);
    if (it != labels.end()) {
      if (it->second.size() != sizes[a]) {
        throw ParseError("labels for '" + names[a] +
                             "' do not match the declared size",
                         0);
      }
      vars.push_back(Variable{names[a], Alphabet(names[a], it->second)});
    } else {
      vars.push_back(Variable{names[a], Alphabet::indexed(names[a], sizes[a])});
    }
  }
  return JointDistribution(std::move(vars), std::move(cells));
}

inline JointDistribution load_joint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_joint(in);
}

inline void save_joint(const JointDistribution& j, std::ostream& out) {
  out << "vars:";
  for (const auto& v : j.variables()) {
    out << ' ' << v.name << ' ' << v.alphabet.size();
  }
  out << '\n';
  const std::size_t n_axes = j.variables().size();
  std::vector<std::size_t> coord(n_axes, 0);
  std::span<const double> src = j.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    if (src[lin] > 0.0) {
      for (std::size_t a = 0; a < n_axes; ++a) out << coord[a] << ' ';
      out << format_double(src[lin]) << '\n';
    }
    for (std::size_t a = n_axes; a-- > 0;) {
      if (++coord[a] < j.variables()[a].alphabet.size()) break;
      coord[a] = 0;
    }
  }
}

inline void save_joint(const JointDistribution& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  save_joint(j, out);
}

/// Conditional-table export in the same line-oriented family: a `channel:`
/// header naming inputs and output, a labels line for the output alphabet,
/// then `<input indices...> <output index> <probability>` rows.
inline void save_channel(const Channel& c, std::ostream& out) {
  out << "channel:";
  for (const auto& v : c.inputs()) out << ' ' << v.name << ' '
                                       << v.alphabet.size();
  out << " -> " << c.output().name << ' ' << c.cols() << '\n';
  out << "labels " << c.output().name;
  for (const auto& s : c.output().alphabet.symbols()) out << ' ' << s;
  out << '\n';
  std::vector<std::size_t> coord(c.inputs().size(), 0);
  for (std::size_t row = 0; row < c.rows(); ++row) {
    for (std::size_t y = 0; y < c.cols(); ++y) {
      if (c(row, y) > 0.0) {
        for (std::size_t a = 0; a < c.inputs().size(); ++a) {
          out << coord[a] << ' ';
        }
        out << y << ' ' << format_double(c(row, y)) << '\n';
      }
    }
    for (std::size_t a = c.inputs().size(); a-- > 0;) {
      if (++coord[a] < c.inputs()[a].alphabet.size()) break;
      coord[a] = 0;
    }
  }
}

inline void save_channel(const Channel& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  save_channel(c, out);
}

}  // namespace fairrep
