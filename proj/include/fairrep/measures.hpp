#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "fairrep/channel.hpp"
#include "fairrep/joint.hpp"

namespace fairrep {

namespace detail {

inline double entropy_of_cells(std::span<const double> cells, LogBase base) {
  KahanSum h;
  for (double p : cells) h.add(-xlogx(p, base));
  return h.value();
}

inline std::vector<std::string> to_names(std::initializer_list<std::string> l) {
  return std::vector<std::string>(l);
}

}  // namespace detail

/// H(vars): exact plug-in entropy of the marginal over `vars`.
inline double entropy(const JointDistribution& j,
                      std::span<const std::string> vars,
                      LogBase base = LogBase::bits) {
  if (vars.size() == j.variables().size()) {
    j.axes_of(vars);  // validate names
    return detail::entropy_of_cells(j.probs(), base);
  }
  return detail::entropy_of_cells(marginalize(j, vars).probs(), base);
}

inline double entropy(const JointDistribution& j,
                      std::initializer_list<std::string> vars,
                      LogBase base = LogBase::bits) {
  auto v = detail::to_names(vars);
  return entropy(j, std::span<const std::string>(v), base);
}

/// H(targets | given) = H(targets, given) - H(given).
inline double conditional_entropy(const JointDistribution& j,
                                  std::span<const std::string> targets,
                                  std::span<const std::string> given,
                                  LogBase base = LogBase::bits) {
  if (given.empty()) return entropy(j, targets, base);
  std::vector<std::string> both(targets.begin(), targets.end());
  both.insert(both.end(), given.begin(), given.end());
  return entropy(j, std::span<const std::string>(both), base) -
         entropy(j, given, base);
}

inline double conditional_entropy(const JointDistribution& j,
                                  std::initializer_list<std::string> targets,
                                  std::initializer_list<std::string> given,
                                  LogBase base = LogBase::bits) {
  auto t = detail::to_names(targets);
  auto g = detail::to_names(given);
  return conditional_entropy(j, std::span<const std::string>(t),
                             std::span<const std::string>(g), base);
}

/// I(a ; b) = H(a) + H(b) - H(a, b). The sets must be disjoint.
inline double mutual_information(const JointDistribution& j,
                                 std::span<const std::string> a,
                                 std::span<const std::string> b,
                                 LogBase base = LogBase::bits) {
  std::vector<std::string> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  // axes_of rejects duplicates, which also enforces disjointness.
  return entropy(j, a, base) + entropy(j, b, base) -
         entropy(j, std::span<const std::string>(both), base);
}

inline double mutual_information(const JointDistribution& j,
                                 std::initializer_list<std::string> a,
                                 std::initializer_list<std::string> b,
                                 LogBase base = LogBase::bits) {
  auto av = detail::to_names(a);
  auto bv = detail::to_names(b);
  return mutual_information(j, std::span<const std::string>(av),
                            std::span<const std::string>(bv), base);
}

/// I(a ; b | c) = H(a,c) + H(b,c) - H(c) - H(a,b,c).
inline double conditional_mutual_information(const JointDistribution& j,
                                             std::span<const std::string> a,
                                             std::span<const std::string> b,
                                             std::span<const std::string> c,
                                             LogBase base = LogBase::bits) {
  if (c.empty()) return mutual_information(j, a, b, base);
  std::vector<std::string> ac(a.begin(), a.end());
  ac.insert(ac.end(), c.begin(), c.end());
  std::vector<std::string> bc(b.begin(), b.end());
  bc.insert(bc.end(), c.begin(), c.end());
  std::vector<std::string> abc(a.begin(), a.end());
  abc.insert(abc.end(), b.begin(), b.end());
  abc.insert(abc.end(), c.begin(), c.end());
  return entropy(j, std::span<const std::string>(ac), base) +
         entropy(j, std::span<const std::string>(bc), base) -
         entropy(j, c, base) -
         entropy(j, std::span<const std::string>(abc), base);
}

inline double conditional_mutual_information(
    const JointDistribution& j, std::initializer_list<std::string> a,
    std::initializer_list<std::string> b, std::initializer_list<std::string> c,
    LogBase base = LogBase::bits) {
  auto av = detail::to_names(a);
  auto bv = detail::to_names(b);
  auto cv = detail::to_names(c);
  return conditional_mutual_information(j, std::span<const std::string>(av),
                                        std::span<const std::string>(bv),
                                        std::span<const std::string>(cv),
                                        base);
}

}  // namespace fairrep
