#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fairrep/bounds.hpp"
#include "fairrep/channel.hpp"

namespace fairrep {

struct OracleOptions {
  std::size_t y_card = 0;  // 0 -> |S||X||T| + 2
  int restarts = 64;
  int iters = 500;
  std::uint64_t seed = 1;
  double step = 0.1;
  /// A candidate is feasible when both measured constraints are within this
  /// slack of their limits.
  double feasibility_tol = 1e-9;
  double cell_budget = 1e6;
  LogBase unit = LogBase::bits;
  RoleNames roles;
  /// Variables the channel may read; empty means all three roles. The
  /// representation is restricted to P(Y | these), e.g. {X} enforces the
  /// Markov chain (S,T) - X - Y.
  std::vector<std::string> channel_inputs;
  /// Known-feasible channels (e.g. realized mechanisms) used as additional
  /// ascent starting points.
  std::vector<Channel> warm_starts;
};

struct OracleResult {
  Channel channel;
  double utility = 0.0;
  bool feasible = false;
  double leak_s = 0.0;  // measured I(Y;S)
  double leak_x = 0.0;  // measured I(Y;X)
  std::string source;   // which candidate family won
};

namespace detail {

/// Flattened instance: per joint cell, its probability, role symbols, and
/// the channel context it maps to.
struct OracleInstance {
  std::vector<double> p;
  std::vector<std::uint32_t> s_idx, x_idx, t_idx, ctx;
  std::size_t ns = 0, nx = 0, nt = 0, n_ctx = 0;
  std::vector<double> p_s, p_x, p_t;
  LogBase unit = LogBase::bits;
};

inline OracleInstance make_instance(const JointDistribution& j,
                                    const RoleNames& roles,
                                    std::span<const std::string> inputs,
                                    LogBase unit) {
  OracleInstance inst;
  inst.unit = unit;
  const std::size_t s_axis = j.axis_of(roles.s);
  const std::size_t x_axis = j.axis_of(roles.x);
  const std::size_t t_axis = j.axis_of(roles.t);
  inst.ns = j.variables()[s_axis].alphabet.size();
  inst.nx = j.variables()[x_axis].alphabet.size();
  inst.nt = j.variables()[t_axis].alphabet.size();
  inst.p_s.assign(inst.ns, 0.0);
  inst.p_x.assign(inst.nx, 0.0);
  inst.p_t.assign(inst.nt, 0.0);

  std::vector<std::size_t> in_axes;
  for (const auto& n : inputs) in_axes.push_back(j.axis_of(n));
  inst.n_ctx = 1;
  for (std::size_t a : in_axes) inst.n_ctx *= j.variables()[a].alphabet.size();

  const std::size_t n_axes = j.variables().size();
  std::vector<std::size_t> coord(n_axes, 0);
  std::span<const double> src = j.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    std::size_t c = 0;
    for (std::size_t a : in_axes) {
      c = c * j.variables()[a].alphabet.size() + coord[a];
    }
    inst.p.push_back(src[lin]);
    inst.s_idx.push_back(static_cast<std::uint32_t>(coord[s_axis]));
    inst.x_idx.push_back(static_cast<std::uint32_t>(coord[x_axis]));
    inst.t_idx.push_back(static_cast<std::uint32_t>(coord[t_axis]));
    inst.ctx.push_back(static_cast<std::uint32_t>(c));
    inst.p_s[coord[s_axis]] += src[lin];
    inst.p_x[coord[x_axis]] += src[lin];
    inst.p_t[coord[t_axis]] += src[lin];
    for (std::size_t a = n_axes; a-- > 0;) {
      if (++coord[a] < j.variables()[a].alphabet.size()) break;
      coord[a] = 0;
    }
  }
  return inst;
}

struct OracleEval {
  double i_t = 0, i_s = 0, i_x = 0;
  std::vector<double> a_ty, d_sy, e_xy, b_y;  // output joints/marginal
};

inline OracleEval evaluate(const OracleInstance& in,
                           const std::vector<double>& q, std::size_t k) {
  OracleEval ev;
  ev.a_ty.assign(in.nt * k, 0.0);
  ev.d_sy.assign(in.ns * k, 0.0);
  ev.e_xy.assign(in.nx * k, 0.0);
  ev.b_y.assign(k, 0.0);
  for (std::size_t i = 0; i < in.p.size(); ++i) {
    const double p = in.p[i];
    if (p <= 0.0) continue;
    const double* row = &q[in.ctx[i] * k];
    double* at = &ev.a_ty[in.t_idx[i] * k];
    double* ds = &ev.d_sy[in.s_idx[i] * k];
    double* ex = &ev.e_xy[in.x_idx[i] * k];
    for (std::size_t y = 0; y < k; ++y) {
      const double m = p * row[y];
      at[y] += m;
      ds[y] += m;
      ex[y] += m;
    }
  }
  for (std::size_t t = 0; t < in.nt; ++t) {
    for (std::size_t y = 0; y < k; ++y) ev.b_y[y] += ev.a_ty[t * k + y];
  }
  auto mi = [&](const std::vector<double>& joint,
                const std::vector<double>& marg, std::size_t n) {
    double s = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t y = 0; y < k; ++y) {
        const double a = joint[v * k + y];
        if (a > 0.0 && marg[v] > 0.0 && ev.b_y[y] > 0.0) {
          s += a * log_base(a / (marg[v] * ev.b_y[y]), in.unit);
        }
      }
    }
    return std::max(s, 0.0);
  };
  ev.i_t = mi(ev.a_ty, in.p_t, in.nt);
  ev.i_s = mi(ev.d_sy, in.p_s, in.ns);
  ev.i_x = mi(ev.e_xy, in.p_x, in.nx);
  return ev;
}

/// Euclidean projection of each row onto the probability simplex.
inline void project_rows(std::vector<double>& q, std::size_t k) {
  std::vector<double> u(k);
  for (std::size_t r = 0; r < q.size() / k; ++r) {
    double* row = &q[r * k];
    std::copy(row, row + k, u.begin());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    std::size_t rho = 0;
    for (std::size_t i = 0; i < k; ++i) {
      css += u[i];
      const double t = (css - 1.0) / static_cast<double>(i + 1);
      if (u[i] - t > 0.0) {
        rho = i + 1;
        theta = t;
      }
    }
    for (std::size_t y = 0; y < k; ++y) {
      row[y] = std::max(0.0, row[y] - theta);
    }
  }
}

}  // namespace detail

/// Certified lower-bound generator for the constrained maximum of I(Y;T):
/// penalized projected gradient ascent over channel tables, restarted from
/// random stochastic and random deterministic channels (plus any warm
/// starts), keeping the best iterate whose measured constraints hold.
/// Deterministic for a fixed seed.
inline OracleResult oracle_optimize(const JointDistribution& j, double r,
                                    double epsilon,
                                    const OracleOptions& opt = {}) {
  OracleResult result;
  result.feasible = false;
  if (r < 0.0 || epsilon < 0.0) {
    result.source = "infeasible limits";
    result.channel = Channel({}, Variable{"Y", Alphabet("Y", {"0"})}, {1.0});
    return result;
  }
  std::vector<std::string> inputs = opt.channel_inputs;
  if (inputs.empty()) inputs = {opt.roles.s, opt.roles.x, opt.roles.t};
  detail::OracleInstance inst =
      detail::make_instance(j, opt.roles, inputs, opt.unit);

  std::size_t k = opt.y_card;
  if (k == 0) k = inst.ns * inst.nx * inst.nt + 2;
  if (static_cast<double>(j.cell_count()) * static_cast<double>(k) >
      opt.cell_budget) {
    throw SizeGuardError("oracle table exceeds the cell budget");
  }

  struct Best {
    std::vector<double> q;
    std::size_t k = 0;
    double utility = -1.0;
    double leak_s = 0.0, leak_x = 0.0;
    std::string source;
  } best;

  auto consider = [&](const std::vector<double>& q, std::size_t kk,
                      const std::string& source) {
    detail::OracleEval ev = detail::evaluate(inst, q, kk);
    if (ev.i_s <= epsilon + opt.feasibility_tol &&
        ev.i_x <= r + opt.feasibility_tol && ev.i_t > best.utility) {
      best = {q, kk, ev.i_t, ev.i_s, ev.i_x, source};
    }
    return ev;
  };

  /// Output-side constant mixing: scales every mutual information by beta
  /// exactly, pulling near-feasible iterates inside the constraint set.
  auto repaired = [&](const std::vector<double>& q, std::size_t kk,
                      const detail::OracleEval& ev, const std::string& src) {
    double beta = 1.0;
    if (ev.i_s > epsilon) beta = std::min(beta, epsilon / ev.i_s);
    if (ev.i_x > r) beta = std::min(beta, r / ev.i_x);
    if (beta >= 1.0 || beta <= 0.0) return;
    const std::size_t k2 = kk + 1;
    std::vector<double> q2(inst.n_ctx * k2, 0.0);
    for (std::size_t c = 0; c < inst.n_ctx; ++c) {
      for (std::size_t y = 0; y < kk; ++y) {
        q2[c * k2 + y] = beta * q[c * kk + y];
      }
      q2[c * k2 + kk] = 1.0 - beta;
    }
    consider(q2, k2, src + "+repair");
  };

  // Constant channel: the always-feasible baseline.
  {
    std::vector<double> q(inst.n_ctx, 1.0);
    consider(q, 1, "constant");
  }

  auto ascend = [&](std::vector<double> q, const std::string& source) {
    double lam_s = 4.0, lam_x = 4.0;
    detail::OracleEval ev = consider(q, k, source);
    auto penalized = [&](const detail::OracleEval& e) {
      return e.i_t - lam_s * std::max(0.0, e.i_s - epsilon) -
             lam_x * std::max(0.0, e.i_x - r);
    };
    std::vector<double> grad(inst.n_ctx * k);
    std::vector<double> cand;
    for (int it = 0; it < opt.iters; ++it) {
      // Pointwise log-ratio tables for the active terms.
      std::fill(grad.begin(), grad.end(), 0.0);
      const bool pen_s = ev.i_s > epsilon;
      const bool pen_x = ev.i_x > r;
      auto ratio = [&](const std::vector<double>& joint, std::size_t v,
                       std::size_t y) {
        const double a = joint[v * k + y];
        return (a > 0.0 && ev.b_y[y] > 0.0)
                   ? log_base(a / ev.b_y[y], opt.unit)
                   : 0.0;
      };
      for (std::size_t i = 0; i < inst.p.size(); ++i) {
        const double p = inst.p[i];
        if (p <= 0.0) continue;
        double* g = &grad[inst.ctx[i] * k];
        for (std::size_t y = 0; y < k; ++y) {
          double d = ratio(ev.a_ty, inst.t_idx[i], y);
          if (pen_s) d -= lam_s * ratio(ev.d_sy, inst.s_idx[i], y);
          if (pen_x) d -= lam_x * ratio(ev.e_xy, inst.x_idx[i], y);
          g[y] += p * d;
        }
      }
      double eta = opt.step;
      const double cur = penalized(ev);
      bool moved = false;
      for (int bt = 0; bt < 12; ++bt) {
        cand = q;
        for (std::size_t i = 0; i < cand.size(); ++i) {
          cand[i] += eta * grad[i];
        }
        detail::project_rows(cand, k);
        detail::OracleEval ev2 = consider(cand, k, source);
        if (penalized(ev2) > cur + 1e-15) {
          q.swap(cand);
          ev = ev2;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if ((it + 1) % 20 == 0) {
        if (ev.i_s > epsilon + opt.feasibility_tol) lam_s *= 2.0;
        if (ev.i_x > r + opt.feasibility_tol) lam_x *= 2.0;
        if (!moved && lam_s > 1e12 && lam_x > 1e12) break;
      }
    }
    repaired(q, k, ev, source);
  };

  // Warm starts ascend on their own output width.
  for (std::size_t w = 0; w < opt.warm_starts.size(); ++w) {
    const Channel& c = opt.warm_starts[w];
    if (c.inputs().size() != inputs.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (c.inputs()[i].name != inputs[i]) match = false;
    }
    if (!match || c.rows() != inst.n_ctx) continue;
    std::vector<double> q(c.table().begin(), c.table().end());
    const std::string src = "warm" + std::to_string(w);
    detail::OracleEval ev = consider(q, c.cols(), src);
    repaired(q, c.cols(), ev, src);
  }

  for (int restart = 0; restart < opt.restarts; ++restart) {
    std::mt19937_64 rng(opt.seed ^
                        (0x9E3779B97F4A7C15ULL * (std::uint64_t(restart) + 1)));
    std::vector<double> q(inst.n_ctx * k, 0.0);
    if (restart % 2 == 1) {
      // Random deterministic channel: constrained optima sit at extreme
      // points of the feasible region.
      std::uniform_int_distribution<std::size_t> pick(0, k - 1);
      for (std::size_t c = 0; c < inst.n_ctx; ++c) q[c * k + pick(rng)] = 1.0;
    } else {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t c = 0; c < inst.n_ctx; ++c) {
        double sum = 0.0;
        for (std::size_t y = 0; y < k; ++y) {
          const double e = -std::log(std::max(u(rng), 1e-300));
          q[c * k + y] = e;
          sum += e;
        }
        for (std::size_t y = 0; y < k; ++y) q[c * k + y] /= sum;
      }
    }
    ascend(std::move(q), "restart" + std::to_string(restart));
  }

  result.utility = std::max(best.utility, 0.0);
  result.leak_s = best.leak_s;
  result.leak_x = best.leak_x;
  result.feasible = best.utility >= 0.0;
  result.source = best.source;

  std::vector<Variable> in_vars;
  for (const auto& n : inputs) in_vars.push_back(j.variable(n));
  result.channel =
      Channel(std::move(in_vars),
              Variable{"Y", Alphabet::indexed("Y", std::max<std::size_t>(
                                                       best.k, 1))},
              best.k > 0 ? best.q
                         : std::vector<double>(inst.n_ctx, 1.0));
  return result;
}

}  // namespace fairrep
