#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairrep/joint.hpp"

namespace fairrep {

/// Conditional distribution table P(output | inputs), row-major over the
/// input variables (in order) with the output symbol as the fastest axis.
///
/// Rows conditioned on a zero-probability context are undefined; they are
/// filled uniformly and flagged, and carry zero weight in every measure
/// derived from a joint.
class Channel {
 public:
  static constexpr double kRowTolerance = 1e-9;

  Channel(std::vector<Variable> inputs, Variable output,
          std::vector<double> table, std::vector<bool> undefined_rows = {})
      : inputs_(std::move(inputs)),
        output_(std::move(output)),
        table_(std::move(table)),
        undefined_(std::move(undefined_rows)) {
    rows_ = 1;
    for (const auto& v : inputs_) rows_ *= v.alphabet.size();
    cols_ = output_.alphabet.size();
    if (table_.size() != rows_ * cols_) {
      throw std::invalid_argument("channel table has " +
                                  std::to_string(table_.size()) +
                                  " cells, expected " +
                                  std::to_string(rows_ * cols_));
    }
    if (undefined_.empty()) undefined_.assign(rows_, false);
    if (undefined_.size() != rows_) {
      throw std::invalid_argument("undefined-row flags size mismatch");
    }
    for (std::size_t rw = 0; rw < rows_; ++rw) {
      KahanSum sum;
      for (std::size_t y = 0; y < cols_; ++y) {
        double p = table_[rw * cols_ + y];
        if (p < 0.0) throw std::invalid_argument("negative channel entry");
        sum.add(p);
      }
      double s = sum.value();
      if (std::abs(s - 1.0) > kRowTolerance) {
        throw std::invalid_argument("channel row " + std::to_string(rw) +
                                    " sums to " + std::to_string(s));
      }
      if (s != 1.0) {
        for (std::size_t y = 0; y < cols_; ++y) table_[rw * cols_ + y] /= s;
      }
    }
  }

  const std::vector<Variable>& inputs() const { return inputs_; }
  const Variable& output() const { return output_; }
  std::span<const double> table() const { return table_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool row_undefined(std::size_t row) const { return undefined_[row]; }
  const std::vector<bool>& undefined_rows() const { return undefined_; }

  double operator()(std::size_t row, std::size_t out_symbol) const {
    return table_[row * cols_ + out_symbol];
  }

 private:
  std::vector<Variable> inputs_;
  Variable output_;
  std::vector<double> table_;
  std::vector<bool> undefined_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// P(target | given) extracted from a joint. Zero-probability contexts are
/// flagged and uniformly filled. Input variables keep the joint's order.
inline Channel condition(const JointDistribution& j, const std::string& target,
                         std::span<const std::string> given) {
  for (const auto& g : given) {
    if (g == target) {
      throw std::invalid_argument("condition: target '" + target +
                                  "' also listed as given");
    }
  }
  std::vector<std::string> all(given.begin(), given.end());
  all.push_back(target);
  JointDistribution sub = marginalize(j, std::span<const std::string>(all));

  // In `sub`, axes follow j's order; the target may sit anywhere.
  std::size_t t_axis = sub.axis_of(target);
  const std::size_t n_axes = sub.variables().size();
  std::vector<Variable> in_vars;
  std::vector<std::size_t> in_axes;
  for (std::size_t a = 0; a < n_axes; ++a) {
    if (a != t_axis) {
      in_vars.push_back(sub.variables()[a]);
      in_axes.push_back(a);
    }
  }
  const std::size_t cols = sub.variables()[t_axis].alphabet.size();
  std::size_t rows = 1;
  for (const auto& v : in_vars) rows *= v.alphabet.size();

  std::vector<double> table(rows * cols, 0.0);
  std::vector<double> row_mass(rows, 0.0);
  std::vector<std::size_t> coord(n_axes, 0);
  std::span<const double> src = sub.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    std::size_t row = 0;
    for (std::size_t i = 0; i < in_axes.size(); ++i) {
      row = row * sub.variables()[in_axes[i]].alphabet.size() +
            coord[in_axes[i]];
    }
    table[row * cols + coord[t_axis]] += src[lin];
    row_mass[row] += src[lin];
    for (std::size_t a = n_axes; a-- > 0;) {
      if (++coord[a] < sub.variables()[a].alphabet.size()) break;
      coord[a] = 0;
    }
  }
  std::vector<bool> undefined(rows, false);
  for (std::size_t rw = 0; rw < rows; ++rw) {
    if (row_mass[rw] > 0.0) {
      for (std::size_t y = 0; y < cols; ++y) table[rw * cols + y] /= row_mass[rw];
    } else {
      undefined[rw] = true;
      for (std::size_t y = 0; y < cols; ++y) {
        table[rw * cols + y] = 1.0 / static_cast<double>(cols);
      }
    }
  }
  return Channel(std::move(in_vars), sub.variables()[t_axis], std::move(table),
                 std::move(undefined));
}

inline Channel condition(const JointDistribution& j, const std::string& target,
                         std::initializer_list<std::string> given) {
  std::vector<std::string> names(given);
  return condition(j, target, std::span<const std::string>(names));
}

/// Extends a joint with the channel's output variable:
/// P(vars, out) = P(vars) * c(out | inputs). The channel's inputs must be
/// variables of `j` (same alphabets); the output name must be fresh.
inline JointDistribution compose(const JointDistribution& j, const Channel& c) {
  if (j.has_variable(c.output().name)) {
    throw std::invalid_argument("compose: name collision on '" +
                                c.output().name + "'");
  }
  std::vector<std::size_t> in_axes;
  in_axes.reserve(c.inputs().size());
  for (const auto& v : c.inputs()) {
    std::size_t a = j.axis_of(v.name);
    if (!(j.variables()[a] == v)) {
      throw std::invalid_argument("compose: alphabet mismatch on '" + v.name +
                                  "'");
    }
    in_axes.push_back(a);
  }
  const std::size_t cols = c.cols();
  std::vector<Variable> vars = j.variables();
  vars.push_back(c.output());

  const std::size_t n_axes = j.variables().size();
  std::vector<double> out(j.cell_count() * cols);
  std::vector<std::size_t> coord(n_axes, 0);
  std::span<const double> src = j.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    std::size_t row = 0;
    for (std::size_t i = 0; i < in_axes.size(); ++i) {
      row = row * c.inputs()[i].alphabet.size() + coord[in_axes[i]];
    }
    const double p = src[lin];
    for (std::size_t y = 0; y < cols; ++y) {
      out[lin * cols + y] = p * c(row, y);
    }
    for (std::size_t a = n_axes; a-- > 0;) {
      if (++coord[a] < j.variables()[a].alphabet.size()) break;
      coord[a] = 0;
    }
  }
  return JointDistribution(std::move(vars), std::move(out));
}

}  // namespace fairrep
