#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairrep/alphabet.hpp"
#include "fairrep/common.hpp"

namespace fairrep {

/// Dense joint probability tensor over named finite variables, row-major in
/// declaration order. The single source of truth for all information
/// measures. Immutable after construction.
///
/// Construction renormalizes when the total mass is within 1e-9 of 1 and
/// rejects otherwise; negative cells are always rejected.
class JointDistribution {
 public:
  static constexpr double kNormalizationTolerance = 1e-9;

  JointDistribution(std::vector<Variable> variables, std::vector<double> probs)
      : variables_(std::move(variables)), probs_(std::move(probs)) {
    if (variables_.empty()) {
      throw std::invalid_argument("joint distribution needs >= 1 variable");
    }
    std::size_t cells = 1;
    for (const auto& v : variables_) cells *= v.alphabet.size();
    if (probs_.size() != cells) {
      throw std::invalid_argument(
          "probability tensor has " + std::to_string(probs_.size()) +
          " cells, expected " + std::to_string(cells));
    }
    for (std::size_t i = 0; i + 1 < variables_.size(); ++i) {
      for (std::size_t k = i + 1; k < variables_.size(); ++k) {
        if (variables_[i].name == variables_[k].name) {
          throw std::invalid_argument("duplicate variable name '" +
                                      variables_[i].name + "'");
        }
      }
    }
    KahanSum total;
    for (double p : probs_) {
      if (p < 0.0) {
        throw std::invalid_argument("negative probability cell");
      }
      total.add(p);
    }
    double sum = total.value();
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      throw std::invalid_argument("probabilities sum to " +
                                  std::to_string(sum) + ", not 1");
    }
    if (sum != 1.0) {
      for (double& p : probs_) p /= sum;
    }
    strides_.assign(variables_.size(), 1);
    for (std::size_t a = variables_.size(); a-- > 1;) {
      strides_[a - 1] = strides_[a] * variables_[a].alphabet.size();
    }
  }

  const std::vector<Variable>& variables() const { return variables_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t cell_count() const { return probs_.size(); }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  bool has_variable(std::string_view name) const {
    return std::any_of(variables_.begin(), variables_.end(),
                       [&](const Variable& v) { return v.name == name; });
  }

  std::size_t axis_of(std::string_view name) const {
    for (std::size_t a = 0; a < variables_.size(); ++a) {
      if (variables_[a].name == name) return a;
    }
    throw std::invalid_argument("unknown variable '" + std::string(name) +
                                "'");
  }

  const Variable& variable(std::string_view name) const {
    return variables_[axis_of(name)];
  }

  /// Axis indices of the given variable names, in tensor (declaration)
  /// order. Rejects unknown or duplicated names.
  std::vector<std::size_t> axes_of(std::span<const std::string> names) const {
    std::vector<bool> pick(variables_.size(), false);
    for (const auto& n : names) {
      std::size_t a = axis_of(n);
      if (pick[a]) {
        throw std::invalid_argument("variable '" + n + "' listed twice");
      }
      pick[a] = true;
    }
    std::vector<std::size_t> axes;
    for (std::size_t a = 0; a < variables_.size(); ++a) {
      if (pick[a]) axes.push_back(a);
    }
    return axes;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

/// Sums out every variable not in `keep`. Kept variables stay in their
/// original relative order; normalization is preserved.
inline JointDistribution marginalize(const JointDistribution& j,
                                     std::span<const std::string> keep) {
  if (keep.empty()) {
    throw std::invalid_argument("marginalize: keep set is empty");
  }
  std::vector<std::size_t> axes = j.axes_of(keep);
  if (axes.size() == j.variables().size()) return j;

  std::vector<Variable> vars;
  vars.reserve(axes.size());
  std::size_t out_cells = 1;
  for (std::size_t a : axes) {
    vars.push_back(j.variables()[a]);
    out_cells *= j.variables()[a].alphabet.size();
  }
  std::vector<std::size_t> out_strides(axes.size(), 1);
  for (std::size_t i = axes.size(); i-- > 1;) {
    out_strides[i - 1] = out_strides[i] * j.variables()[axes[i]].alphabet.size();
  }

  const std::size_t n_axes = j.variables().size();
  std::vector<std::size_t> sizes(n_axes);
  for (std::size_t a = 0; a < n_axes; ++a) {
    sizes[a] = j.variables()[a].alphabet.size();
  }
  // Map each source axis to its contribution to the output linear index.
  std::vector<std::size_t> contrib(n_axes, 0);
  for (std::size_t i = 0; i < axes.size(); ++i) contrib[axes[i]] = out_strides[i];

  std::vector<double> out(out_cells, 0.0);
  std::vector<std::size_t> coord(n_axes, 0);
  std::size_t out_idx = 0;
  std::span<const double> src = j.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    out[out_idx] += src[lin];
    // Odometer increment over the last axis first.
    for (std::size_t a = n_axes; a-- > 0;) {
      out_idx += contrib[a];
      if (++coord[a] < sizes[a]) break;
      coord[a] = 0;
      out_idx -= contrib[a] * sizes[a];
    }
  }
  return JointDistribution(std::move(vars), std::move(out));
}

inline JointDistribution marginalize(const JointDistribution& j,
                                     std::initializer_list<std::string> keep) {
  std::vector<std::string> names(keep);
  return marginalize(j, std::span<const std::string>(names));
}

}  // namespace fairrep
