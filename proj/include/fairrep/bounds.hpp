#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "fairrep/measures.hpp"

namespace fairrep {

/// Names of the three roles a trade-off joint provides.
struct RoleNames {
  std::string s = "S";  // sensitive attribute
  std::string x = "X";  // useful data
  std::string t = "T";  // task
};

/// Every base information quantity the bound formulas draw on, computed
/// once per joint.
struct InfoSummary {
  LogBase unit = LogBase::bits;
  double h_s = 0, h_x = 0, h_t = 0;
  double h_sx = 0, h_st = 0, h_xt = 0, h_sxt = 0;
  double h_t_given_xs = 0, h_xs_given_t = 0;
  double h_t_given_s = 0, h_s_given_t = 0;
  double h_t_given_x = 0, h_x_given_t = 0;
  double h_x_given_s = 0, h_s_given_x = 0;
  double i_xs_t = 0;
};

inline InfoSummary summarize(const JointDistribution& j,
                             const RoleNames& roles = {},
                             LogBase unit = LogBase::bits) {
  InfoSummary m;
  m.unit = unit;
  m.h_s = entropy(j, {roles.s}, unit);
  m.h_x = entropy(j, {roles.x}, unit);
  m.h_t = entropy(j, {roles.t}, unit);
  m.h_sx = entropy(j, {roles.s, roles.x}, unit);
  m.h_st = entropy(j, {roles.s, roles.t}, unit);
  m.h_xt = entropy(j, {roles.x, roles.t}, unit);
  m.h_sxt = entropy(j, {roles.s, roles.x, roles.t}, unit);
  m.h_t_given_xs = m.h_sxt - m.h_sx;
  m.h_xs_given_t = m.h_sxt - m.h_t;
  m.h_t_given_s = m.h_st - m.h_s;
  m.h_s_given_t = m.h_st - m.h_t;
  m.h_t_given_x = m.h_xt - m.h_x;
  m.h_x_given_t = m.h_xt - m.h_t;
  m.h_x_given_s = m.h_sx - m.h_s;
  m.h_s_given_x = m.h_sx - m.h_x;
  m.i_xs_t = m.h_sx + m.h_t - m.h_sxt;
  return m;
}

/// One bound evaluation. Values are computed at every grid point; the
/// applicable flag records whether the stated regime condition holds, and
/// only applicable entries enter the aggregates.
struct BoundEntry {
  std::string name;
  double value = 0.0;
  bool applicable = false;
  bool is_upper = false;
  std::string regime;
};

struct BoundReport {
  double r = 0.0;
  double epsilon = 0.0;
  LogBase unit = LogBase::bits;
  InfoSummary info;
  std::vector<BoundEntry> entries;
  double best_lower = 0.0;
  double best_upper = 0.0;
  std::vector<std::string> warnings;

  const BoundEntry& entry(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return e;
    }
    throw std::invalid_argument("no bound named '" + name + "'");
  }
  double value(const std::string& name) const { return entry(name).value; }
};

namespace detail {

inline void aggregate(BoundReport& rep) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& e : rep.entries) {
    if (!e.applicable) continue;
    if (e.is_upper) {
      hi = std::min(hi, e.value);
    } else {
      lo = std::max(lo, e.value);
    }
  }
  rep.best_lower = lo;
  rep.best_upper = hi;
}

/// Shared log term of the strong-lemma composite bounds:
/// log((1-a) I(X,S;T) + a min{H(T), H(X,S)} + 5.51) + 1.06.
inline double composite_log_term(const InfoSummary& m, double a) {
  const double cap = std::min(m.h_t, m.h_sx);
  return log_base((1.0 - a) * m.i_xs_t + a * cap + 5.51, m.unit) + 1.06;
}

}  // namespace detail

/// Perfect-parity ceiling: H(T) plus, for every task symbol, the exact
/// integral over m of g_t(m) log g_t(m), where g_t(m) is the S-probability
/// that P(T=t|S) is at least m. g_t is a right-continuous step function, so
/// the integral is summed piecewise over the distinct conditional values.
inline double u0(const JointDistribution& j, const RoleNames& roles = {},
                 LogBase unit = LogBase::bits) {
  JointDistribution st = marginalize(j, {roles.s, roles.t});
  const std::size_t s_axis = st.axis_of(roles.s);
  const std::size_t t_axis = st.axis_of(roles.t);
  const std::size_t ns = st.variables()[s_axis].alphabet.size();
  const std::size_t nt = st.variables()[t_axis].alphabet.size();

  std::vector<double> p_s(ns, 0.0);
  std::vector<double> p_t(nt, 0.0);
  std::vector<double> cell(ns * nt, 0.0);
  std::span<const double> src = st.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    std::size_t si, ti;
    if (s_axis < t_axis) {
      si = lin / nt;
      ti = lin % nt;
    } else {
      ti = lin / ns;
      si = lin % ns;
    }
    cell[si * nt + ti] += src[lin];
    p_s[si] += src[lin];
    p_t[ti] += src[lin];
  }

  KahanSum total;
  for (double p : p_t) total.add(-xlogx(p, unit));  // H(T)

  for (std::size_t t = 0; t < nt; ++t) {
    // (value, weight) pairs: value = P(t|s), weight = P(s).
    std::vector<std::pair<double, double>> pts;
    for (std::size_t s = 0; s < ns; ++s) {
      if (p_s[s] <= 0.0) continue;
      double v = cell[s * nt + t] / p_s[s];
      if (v > 0.0) pts.emplace_back(v, p_s[s]);
    }
    if (pts.empty()) continue;
    std::sort(pts.begin(), pts.end());
    // Suffix sums give g_t on each interval (w_{j-1}, w_j].
    double g = 0.0;
    for (auto& pr : pts) g += pr.second;
    double prev = 0.0;
    for (std::size_t i = 0; i < pts.size();) {
      std::size_t k = i;
      double w = pts[i].first;
      double drop = 0.0;
      while (k < pts.size() && pts[k].first == w) drop += pts[k++].second;
      total.add((w - prev) * xlogx(g, unit));
      g -= drop;
      prev = w;
      i = k;
    }
  }
  return total.value();
}

/// All bounds of the bounded-leakage trade-off at one (r, epsilon) point,
/// evaluated from precomputed base quantities. Regimes overlap; every bound
/// whose stated condition holds is marked applicable, and values are
/// reported even outside their regime.
inline BoundReport theorem2_bounds_from(const InfoSummary& info, double r,
                                        double epsilon) {
  if (r < 0.0) throw std::invalid_argument("theorem2_bounds: r < 0");
  if (epsilon < 0.0) throw std::invalid_argument("theorem2_bounds: epsilon < 0");
  BoundReport rep;
  rep.r = r;
  rep.epsilon = epsilon;
  rep.unit = info.unit;
  rep.info = info;
  const InfoSummary& m = rep.info;
  const LogBase unit = info.unit;

  if (r >= m.h_x) {
    rep.warnings.push_back("r >= H(X): outside the assumed compression regime");
  }
  if (epsilon >= m.h_s) {
    rep.warnings.push_back(
        "epsilon >= H(S): outside the assumed leakage regime");
  }

  const double d1 = m.h_x_given_s + epsilon;
  const double a1 = d1 > 0.0 ? std::min(r / d1, 1.0) : 0.0;  // 0/0 -> 0
  const double d3 = m.h_s_given_x + r;
  const double a3 = d3 > 0.0 ? std::min(epsilon / d3, 1.0) : 0.0;

  const bool in_r1 = r <= d1;
  const bool in_r2 = d1 <= r && r < m.h_x;
  const bool in_r3 = r <= epsilon && epsilon <= d3;
  const bool in_r4 = d3 <= epsilon && epsilon < m.h_s;

  rep.entries.push_back(
      {"L0", m.h_t_given_xs - sfrl_bound(std::max(m.i_xs_t, 0.0), unit), true,
       false, "all"});
  rep.entries.push_back({"L1", m.h_t_given_xs + r - m.h_xs_given_t, in_r1,
                         false, "0 <= r <= H(X|S)+eps"});
  rep.entries.push_back({"L2",
                         m.h_t_given_xs + r - a1 * m.h_xs_given_t -
                             detail::composite_log_term(m, a1),
                         in_r1, false, "0 <= r <= H(X|S)+eps"});
  rep.entries.push_back({"L1p", m.h_t_given_s - m.h_s_given_t + epsilon, in_r2,
                         false, "H(X|S)+eps <= r < H(X)"});
  rep.entries.push_back({"L3", m.h_t_given_xs + epsilon - m.h_xs_given_t, in_r3,
                         false, "r <= eps <= H(S|X)+r"});
  rep.entries.push_back({"L4",
                         m.h_t_given_xs + epsilon - a3 * m.h_xs_given_t -
                             detail::composite_log_term(m, a3),
                         in_r3, false, "r <= eps <= H(S|X)+r"});
  rep.entries.push_back({"L3p", m.h_t_given_x - m.h_x_given_t + r, in_r4, false,
                         "H(S|X)+r <= eps < H(S)"});
  rep.entries.push_back(
      {"UB_parity", m.h_t_given_s + epsilon, true, true, "all"});
  rep.entries.push_back({"UB_rate", m.h_t_given_x + r, true, true, "all"});

  detail::aggregate(rep);
  return rep;
}

inline BoundReport theorem2_bounds(const JointDistribution& j, double r,
                                   double epsilon, const RoleNames& roles = {},
                                   LogBase unit = LogBase::bits) {
  return theorem2_bounds_from(summarize(j, roles, unit), r, epsilon);
}

/// Perfect-parity bounds (epsilon = 0), including the integral ceiling U0.
/// Shared bounds agree with theorem2_bounds(j, r, 0) by construction.
inline BoundReport theorem1_bounds_from(const InfoSummary& info,
                                        double u0_value, double r) {
  if (r < 0.0) throw std::invalid_argument("theorem1_bounds: r < 0");
  BoundReport rep;
  rep.r = r;
  rep.epsilon = 0.0;
  rep.unit = info.unit;
  rep.info = info;
  const InfoSummary& m = rep.info;
  const LogBase unit = info.unit;
  if (r >= m.h_x) {
    rep.warnings.push_back("r >= H(X): outside the assumed compression regime");
  }

  const double a = m.h_x_given_s > 0.0 ? std::min(r / m.h_x_given_s, 1.0) : 0.0;
  const bool low_rate = r <= m.h_x_given_s;
  const bool high_rate = m.h_x_given_s <= r && r < m.h_x;

  rep.entries.push_back({"L1r", m.h_t_given_xs + r - m.h_xs_given_t, low_rate,
                         false, "0 <= r <= H(X|S)"});
  rep.entries.push_back(
      {"L2", m.h_t_given_xs - sfrl_bound(std::max(m.i_xs_t, 0.0), unit), true,
       false, "all"});
  rep.entries.push_back({"L3r",
                         m.h_t_given_xs + r - a * m.h_xs_given_t -
                             detail::composite_log_term(m, a),
                         low_rate, false, "0 <= r <= H(X|S)"});
  rep.entries.push_back({"L1pr", m.h_t_given_s - m.h_s_given_t, high_rate,
                         false, "H(X|S) <= r < H(X)"});
  rep.entries.push_back({"UB_rate", m.h_t_given_x + r, true, true, "all"});
  rep.entries.push_back({"UB_parity", m.h_t_given_s, true, true, "all"});
  rep.entries.push_back({"U0", u0_value, true, true, "all"});

  detail::aggregate(rep);
  return rep;
}

inline BoundReport theorem1_bounds(const JointDistribution& j, double r,
                                   const RoleNames& roles = {},
                                   LogBase unit = LogBase::bits) {
  return theorem1_bounds_from(summarize(j, roles, unit), u0(j, roles, unit),
                              r);
}

/// max{0, v}: the clamped form reported alongside raw bound values.
inline double clamp_positive(double v) { return std::max(0.0, v); }

}  // namespace fairrep
