#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fairrep/bounds.hpp"
#include "fairrep/joint_io.hpp"

namespace fairrep {

/// One sweep axis: `steps` evenly spaced values from start to stop
/// inclusive (a single step pins the axis at start).
struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  std::vector<double> values() const {
    if (steps < 1) throw std::invalid_argument("sweep needs >= 1 step");
    if (stop < start) throw std::invalid_argument("sweep has stop < start");
    std::vector<double> v;
    v.reserve(steps);
    if (steps == 1) {
      v.push_back(start);
      return v;
    }
    for (std::size_t i = 0; i < steps; ++i) {
      v.push_back(start + (stop - start) * static_cast<double>(i) /
                              static_cast<double>(steps - 1));
    }
    return v;
  }
};

/// Fixed column order of the bounds CSV. Raw bound values are accompanied
/// by clamped max{0, .} columns and applicability flags; U0 is populated
/// only on perfect-parity rows and is nan elsewhere.
inline const std::vector<std::string>& bounds_csv_columns() {
  static const std::vector<std::string> cols = {
      "r",        "epsilon",  "L0",       "L0_plus",  "L1",
      "L1_plus",  "L1_app",   "L2",       "L2_plus",  "L2_app",
      "L1p",      "L1p_plus", "L1p_app",  "L3",       "L3_plus",
      "L3_app",   "L4",       "L4_plus",  "L4_app",   "L3p",
      "L3p_plus", "L3p_app",  "UB_parity", "UB_rate", "U0",
      "best_lower", "best_lower_plus", "best_upper"};
  return cols;
}

inline std::string bounds_csv_row(const BoundReport& rep, double u0_value) {
  std::ostringstream os;
  auto put = [&](double v) { os << ',' << format_double(v); };
  auto put_flag = [&](bool b) { os << ',' << (b ? 1 : 0); };
  os << format_double(rep.r);
  os << ',' << format_double(rep.epsilon);
  for (const char* name : {"L0", "L1", "L2", "L1p", "L3", "L4", "L3p"}) {
    const BoundEntry& e = rep.entry(name);
    put(e.value);
    put(clamp_positive(e.value));
    if (std::string(name) != "L0") put_flag(e.applicable);
  }
  put(rep.value("UB_parity"));
  put(rep.value("UB_rate"));
  os << ',' << (std::isnan(u0_value) ? "nan" : format_double(u0_value));
  double hi = rep.best_upper;
  if (!std::isnan(u0_value)) hi = std::min(hi, u0_value);
  put(rep.best_lower);
  put(clamp_positive(rep.best_lower));
  put(hi);
  return os.str();
}

/// Sweeps the bound report over the (r, epsilon) grid. Perfect-parity rows
/// additionally carry the U0 ceiling, which then joins the upper aggregate.
inline std::string bounds_sweep_csv(const JointDistribution& j,
                                    const SweepSpec& r_spec,
                                    const SweepSpec& eps_spec,
                                    const RoleNames& roles = {},
                                    LogBase unit = LogBase::bits,
                                    const std::vector<std::string>& notes = {}) {
  std::ostringstream os;
  os << "# fairrep bounds sweep\n";
  os << "# base: " << base_name(unit) << '\n';
  for (const auto& n : notes) os << "# " << n << '\n';
  const std::vector<std::string>& cols = bounds_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    os << (i ? "," : "") << cols[i];
  }
  os << '\n';
  const InfoSummary info = summarize(j, roles, unit);
  const double u0_cache = u0(j, roles, unit);
  for (double r : r_spec.values()) {
    for (double eps : eps_spec.values()) {
      BoundReport rep = theorem2_bounds_from(info, r, eps);
      const double u0_val =
          eps == 0.0 ? u0_cache : std::numeric_limits<double>::quiet_NaN();
      os << bounds_csv_row(rep, u0_val) << '\n';
    }
  }
  return os.str();
}

/// r at which the two utility ceilings cross: H(T|X) + r = H(T|S) + eps.
inline double upper_crossover_r(const InfoSummary& m, double eps) {
  return m.h_t_given_s + eps - m.h_t_given_x;
}

/// r at which the composite lower bound overtakes the direct one, found by
/// bisection on their gap over the shared regime; NaN when they do not
/// cross there. The gap is monotone in the mixing ratio.
inline double composite_crossover_r(const InfoSummary& m, double eps) {
  const double d1 = m.h_x_given_s + eps;
  if (d1 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  auto gap = [&](double r) {
    const double a = std::min(r / d1, 1.0);
    return (1.0 - a) * m.h_xs_given_t - detail::composite_log_term(m, a);
  };
  double lo = 0.0, hi = d1;
  double glo = gap(lo), ghi = gap(hi);
  if (glo <= 0.0 || ghi >= 0.0) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fairrep
