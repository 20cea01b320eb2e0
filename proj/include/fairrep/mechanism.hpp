#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fairrep/bounds.hpp"
#include "fairrep/frl.hpp"

namespace fairrep {

enum class Recipe { L1, L2, L3, L4, Theorem1 };

inline const char* recipe_name(Recipe r) {
  switch (r) {
    case Recipe::L1: return "L1";
    case Recipe::L2: return "L2";
    case Recipe::L3: return "L3";
    case Recipe::L4: return "L4";
    case Recipe::Theorem1: return "thm1";
  }
  return "?";
}

struct MechanismOptions {
  RoleNames roles;
  LogBase unit = LogBase::bits;
  /// Construction refuses instances whose staged joints or channel tables
  /// exceed this many cells.
  double cell_budget = 1e6;
  std::string y_name = "Y";
};

/// Composed representation recipe: a leakage-calibrated seed U for one of
/// the two constrained variables, a constant-mixing stage U', and a
/// conditional functional representation Y' of the task given (S, X, U').
/// The released representation is Y = (U', Y'). Decision tables and atom
/// lists are stored; dense joints and the realized channel are
/// materialized only on demand.
struct Mechanism {
  Recipe recipe = Recipe::L1;
  double r = 0.0;
  double epsilon = 0.0;
  RoleNames roles;
  LogBase unit = LogBase::bits;

  ExtendedDecomposition seed;  // U
  double mix_alpha = 0.0;      // U' keeps U with this probability
  Alphabet uprime_alphabet{"U'", {"_"}};
  FrlDecomposition y_prime;  // task representation given (S, X, U')

  std::string claimed_name;      // bound this recipe targets
  double claimed_bound = 0.0;    // its closed-form value
  bool sfrl_checked = false;     // strong-lemma variants measure the check
  SfrlCheck sfrl;                // populated when checked
  bool sfrl_holds = false;       // closed-form value certified when true

  std::string y_name = "Y";
  std::vector<std::string> log;  // construction trace

  std::string uprime_name() const { return uprime_alphabet.name(); }
  std::string yprime_name() const { return y_prime.u_alphabet.name(); }
};

/// Every quantity checked against a mechanism's claims, each recomputed by
/// exact measurement on a composed joint, never taken from algebra.
struct AuditResult {
  double i_yt = 0, i_yx = 0, i_ys = 0;  // measured, Y = (U', Y')
  double r_target = 0, eps_target = 0;
  std::string claimed_name;
  double claimed_bound = 0;
  double parity_slack = 0, rate_slack = 0, bound_slack = 0;
  bool parity_ok = false, rate_ok = false, bound_ok = false;

  double i_seed_leakage = 0;        // I(U; constrained input role)
  double seed_leakage_target = 0;   // epsilon (L1 family) or r (L3 family)
  double h_seed_out_given_seed = 0; // H(output role | U, input role); 0
  double i_uprime_xs = 0;           // I(U'; X,S)
  double i_uprime_xs_target = 0;    // r (L1 family) or epsilon (L3 family)
  double mix_measured = 0;          // I(constrained var; U')
  double mix_expected = 0;          // alpha * measured seed leakage
  double h_t_given_rest = 0;        // H(T | Y', S, X, U'); 0

  // Utility measured through the decomposition identities.
  double eq5_direct = 0;            // I(Y; T)
  double eq5_total_minus_cond = 0;  // I(X,S,T;Y) - I(X,S;Y|T)
  double eq5_expanded = 0;  // I(X,S;Y) + H(T|X,S) - H(T|Y,X,S) - I(X,S;Y|T)

  bool sfrl_checked = false;
  SfrlCheck sfrl;
};

namespace detail {

inline void guard_cells(double cells, double budget, const std::string& what) {
  if (cells > budget) {
    throw SizeGuardError(what + " needs " + std::to_string(cells) +
                         " cells, over the budget of " +
                         std::to_string(budget));
  }
}

/// P(U | seed input, seed output) with the reveal folded in cellwise:
/// P((w, z) | in, out) = P(w | in, out) * P(z | in). Arithmetically equal
/// to materializing the reveal coin and summing it out.
inline Channel seed_channel(const ExtendedDecomposition& d) {
  Channel wpost = posterior_channel(d.base);
  const std::size_t ctxs = d.base.num_contexts();
  const std::size_t cols = d.base.output.alphabet.size();
  const std::size_t atoms = d.base.num_atoms();
  const std::size_t us = d.u_pairs.size();
  std::vector<double> table(wpost.rows() * us, 0.0);
  std::vector<bool> undefined(wpost.rows(), false);
  for (std::size_t c = 0; c < ctxs; ++c) {
    const bool dead = d.base.input_marginal[c] <= 0.0;
    for (std::size_t y = 0; y < cols; ++y) {
      const std::size_t row = c * cols + y;
      if (dead) {
        undefined[row] = true;
        for (std::size_t u = 0; u < us; ++u) {
          table[row * us + u] = 1.0 / static_cast<double>(us);
        }
        continue;
      }
      undefined[row] = wpost.row_undefined(row);
      for (std::size_t u = 0; u < us; ++u) {
        const auto [w, z] = d.u_pairs[u];
        double pz;
        if (z == ctxs) {
          pz = 1.0 - d.reveal_prob;
        } else {
          pz = (z == c) ? d.reveal_prob : 0.0;
        }
        table[row * us + u] = wpost(row, w) * pz;
      }
    }
  }
  return Channel(wpost.inputs(), d.u_variable(), std::move(table),
                 std::move(undefined));
}

inline Alphabet make_mixed_alphabet(const ExtendedDecomposition& d,
                                    double alpha, const std::string& name) {
  std::vector<std::string> syms;
  if (alpha > 0.0) syms = d.u_alphabet.symbols();
  if (alpha < 1.0) syms.push_back(fresh_filler(syms));
  return Alphabet(name, std::move(syms));
}

/// P(U' | seed input, seed output): the seed channel scaled by the mixing
/// probability, with the leftover mass on the mixing constant.
inline Channel mixed_seed_channel(const ExtendedDecomposition& d, double alpha,
                                  const Alphabet& out) {
  Channel sc = seed_channel(d);
  const std::size_t us = sc.cols();
  const std::size_t os = out.size();
  std::vector<double> table(sc.rows() * os, 0.0);
  std::vector<bool> undefined(sc.undefined_rows());
  for (std::size_t row = 0; row < sc.rows(); ++row) {
    if (alpha > 0.0) {
      for (std::size_t u = 0; u < us; ++u) {
        table[row * os + u] = alpha * sc(row, u);
      }
    }
    if (alpha < 1.0) table[row * os + (os - 1)] = 1.0 - alpha;
  }
  return Channel(sc.inputs(), Variable{out.name(), out}, std::move(table),
                 std::move(undefined));
}

inline JointDistribution attach_uprime(const JointDistribution& j,
                                       const Mechanism& m) {
  return compose(j, mixed_seed_channel(m.seed, m.mix_alpha, m.uprime_alphabet));
}

struct RecipePlan {
  Recipe recipe;
  bool strong_variant;      // run the conditional strong-lemma check
  bool seed_on_sensitive;   // seed pair is (S -> X); else (X -> S)
};

inline Mechanism construct_impl(const JointDistribution& j, double r,
                                double epsilon, const MechanismOptions& opt,
                                const RecipePlan& plan) {
  if (j.variables().size() != 3 || !j.has_variable(opt.roles.s) ||
      !j.has_variable(opt.roles.x) || !j.has_variable(opt.roles.t)) {
    throw std::invalid_argument(
        "mechanism construction expects a joint over exactly the three role "
        "variables");
  }
  if (r < 0.0) throw RegimeError("regime violation: r >= 0 required");
  if (epsilon < 0.0) {
    throw RegimeError("regime violation: epsilon >= 0 required");
  }
  InfoSummary m = summarize(j, opt.roles, opt.unit);
  constexpr double kEdge = 1e-12;

  Mechanism mech;
  mech.recipe = plan.recipe;
  mech.r = r;
  mech.epsilon = epsilon;
  mech.roles = opt.roles;
  mech.unit = opt.unit;
  mech.y_name = opt.y_name;

  double mix_alpha;
  if (plan.seed_on_sensitive) {
    if (epsilon > 0.0 && epsilon >= m.h_s) {
      throw RegimeError("regime violation: epsilon < H(S) required");
    }
    const double d1 = m.h_x_given_s + epsilon;
    if (r > d1 + kEdge) {
      throw RegimeError("regime violation: r <= H(X|S) + epsilon required");
    }
    mix_alpha = d1 > 0.0 ? std::min(r / d1, 1.0) : 0.0;
  } else {
    if (epsilon < r - kEdge) {
      throw RegimeError("regime violation: r <= epsilon required");
    }
    const double d3 = m.h_s_given_x + r;
    if (epsilon > d3 + kEdge) {
      throw RegimeError("regime violation: epsilon <= H(S|X) + r required");
    }
    if (r > 0.0 && r >= m.h_x) {
      throw RegimeError("regime violation: r < H(X) required");
    }
    mix_alpha = d3 > 0.0 ? std::min(epsilon / d3, 1.0) : 0.0;
  }
  mech.mix_alpha = mix_alpha;

  const std::string in_role =
      plan.seed_on_sensitive ? opt.roles.s : opt.roles.x;
  const std::string out_role =
      plan.seed_on_sensitive ? opt.roles.x : opt.roles.s;
  const double seed_leakage = plan.seed_on_sensitive ? epsilon : r;

  JointDistribution in_marg = marginalize(j, {in_role});
  Channel pair_chan = condition(j, out_role, {in_role});
  mech.seed =
      efrl_construct(in_marg, pair_chan, seed_leakage, opt.unit, "U", "W");
  mech.log.push_back("seed pair (" + in_role + " -> " + out_role + "): |W| = " +
                     std::to_string(mech.seed.base.num_atoms()) +
                     ", reveal prob = " + std::to_string(mech.seed.reveal_prob) +
                     ", |U| = " + std::to_string(mech.seed.u_pairs.size()));
  if (mech.seed.exceeds_source_mi) {
    mech.log.push_back(
        "note: requested seed leakage is at or above I(" + in_role + ";" +
        out_role + "); wider-regime construction used");
  }

  mech.uprime_alphabet = make_mixed_alphabet(mech.seed, mix_alpha, "U'");
  mech.log.push_back("mixing: alpha = " + std::to_string(mix_alpha) +
                     ", |U'| = " + std::to_string(mech.uprime_alphabet.size()));

  const double nu = static_cast<double>(mech.uprime_alphabet.size());
  const double ns = static_cast<double>(j.variable(opt.roles.s).alphabet.size());
  const double nx = static_cast<double>(j.variable(opt.roles.x).alphabet.size());
  const double nt = static_cast<double>(j.variable(opt.roles.t).alphabet.size());
  guard_cells(ns * nx * nu * nt, opt.cell_budget,
              "task conditional over (S, X, U')");

  JointDistribution j_up = attach_uprime(j, mech);
  std::vector<std::string> ctx_vars;
  for (const auto& v : j.variables()) {
    if (v.name != opt.roles.t) ctx_vars.push_back(v.name);
  }
  ctx_vars.push_back(mech.uprime_name());
  JointDistribution ctx_marg =
      marginalize(j_up, std::span<const std::string>(ctx_vars));
  Channel task_chan =
      condition(j_up, opt.roles.t, std::span<const std::string>(ctx_vars));
  mech.y_prime = frl_construct(ctx_marg, task_chan, "Y'", "v");
  mech.log.push_back("task representation: |Y'| = " +
                     std::to_string(mech.y_prime.num_atoms()));

  guard_cells(ns * nx * nt * nu *
                  static_cast<double>(mech.y_prime.num_atoms()),
              opt.cell_budget, "audit joint over (S, X, T, U', Y')");

  BoundReport rep = theorem2_bounds(j, r, epsilon, opt.roles, opt.unit);
  switch (plan.recipe) {
    case Recipe::L1: mech.claimed_name = "L1"; break;
    case Recipe::L2: mech.claimed_name = "L2"; break;
    case Recipe::L3: mech.claimed_name = "L3"; break;
    case Recipe::L4: mech.claimed_name = "L4"; break;
    case Recipe::Theorem1: mech.claimed_name = "L1"; break;
  }
  mech.claimed_bound = rep.value(mech.claimed_name);

  if (plan.strong_variant) {
    JointDistribution full = compose(j_up, posterior_channel(mech.y_prime));
    std::vector<std::string> xs{opt.roles.s, opt.roles.x};
    std::vector<std::string> ys{opt.roles.t};
    std::vector<std::string> given{mech.uprime_name()};
    mech.sfrl_checked = true;
    mech.sfrl = sfrl_check(full, xs, mech.yprime_name(), ys, given, opt.unit);
    mech.sfrl_holds = mech.sfrl.holds;
    mech.log.push_back(std::string("conditional strong-lemma check: ") +
                       (mech.sfrl_holds ? "holds" : "fails") + " (slack " +
                       std::to_string(mech.sfrl.slack) + ")");
  }
  return mech;
}

}  // namespace detail

/// Seed on the sensitive attribute at leakage epsilon, mix to meet the rate
/// constraint. Regime: 0 <= r <= H(X|S) + epsilon, epsilon < H(S).
inline Mechanism construct_l1(const JointDistribution& j, double r,
                              double epsilon,
                              const MechanismOptions& opt = {}) {
  return detail::construct_impl(j, r, epsilon, opt,
                                {Recipe::L1, false, true});
}

/// Same pipeline as construct_l1 with the conditional strong-lemma check on
/// the task representation; the closed-form composite value is certified
/// constructively when the check holds.
inline Mechanism construct_l2(const JointDistribution& j, double r,
                              double epsilon,
                              const MechanismOptions& opt = {}) {
  return detail::construct_impl(j, r, epsilon, opt, {Recipe::L2, true, true});
}

/// Dual recipe: seed on the useful data at leakage r, mix to meet the
/// parity constraint. Regime: r <= epsilon <= H(S|X) + r, r < H(X).
inline Mechanism construct_l3(const JointDistribution& j, double r,
                              double epsilon,
                              const MechanismOptions& opt = {}) {
  return detail::construct_impl(j, r, epsilon, opt,
                                {Recipe::L3, false, false});
}

inline Mechanism construct_l4(const JointDistribution& j, double r,
                              double epsilon,
                              const MechanismOptions& opt = {}) {
  return detail::construct_impl(j, r, epsilon, opt, {Recipe::L4, true, false});
}

/// Perfect-parity construction (epsilon = 0). Regime: 0 <= r <= H(X|S).
inline Mechanism construct_theorem1(const JointDistribution& j, double r,
                                    const MechanismOptions& opt = {}) {
  Mechanism m = detail::construct_impl(j, r, 0.0, opt,
                                       {Recipe::Theorem1, false, true});
  return m;
}

inline Mechanism construct_mechanism(const JointDistribution& j, Recipe recipe,
                                     double r, double epsilon,
                                     const MechanismOptions& opt = {}) {
  switch (recipe) {
    case Recipe::L1: return construct_l1(j, r, epsilon, opt);
    case Recipe::L2: return construct_l2(j, r, epsilon, opt);
    case Recipe::L3: return construct_l3(j, r, epsilon, opt);
    case Recipe::L4: return construct_l4(j, r, epsilon, opt);
    case Recipe::Theorem1: return construct_theorem1(j, r, opt);
  }
  throw std::invalid_argument("unknown recipe");
}

/// Composes the mechanism's staged joints on `j` and measures every claimed
/// identity and constraint.
inline AuditResult audit(const Mechanism& m, const JointDistribution& j) {
  const RoleNames& roles = m.roles;
  const LogBase unit = m.unit;
  const std::string in_role =
      (m.recipe == Recipe::L3 || m.recipe == Recipe::L4) ? roles.x : roles.s;
  const std::string out_role = in_role == roles.s ? roles.x : roles.s;

  AuditResult a;
  a.r_target = m.r;
  a.eps_target = m.epsilon;
  a.claimed_name = m.claimed_name;
  a.claimed_bound = m.claimed_bound;
  a.seed_leakage_target = in_role == roles.s ? m.epsilon : m.r;
  a.i_uprime_xs_target = in_role == roles.s ? m.r : m.epsilon;

  // Seed stage, pre-mixing.
  JointDistribution j_u = compose(j, detail::seed_channel(m.seed));
  const std::string u = m.seed.u_alphabet.name();
  a.i_seed_leakage = mutual_information(j_u, {u}, {in_role}, unit);
  a.h_seed_out_given_seed =
      conditional_entropy(j_u, {out_role}, {u, in_role}, unit);

  // Mixing stage.
  JointDistribution j_up = detail::attach_uprime(j, m);
  const std::string up = m.uprime_name();
  a.i_uprime_xs =
      mutual_information(j_up, {up}, {roles.x, roles.s}, unit);
  a.mix_measured = mutual_information(j_up, {up}, {in_role}, unit);
  a.mix_expected = m.mix_alpha * a.i_seed_leakage;

  // Full composed joint (S, X, T, U', Y').
  JointDistribution full = compose(j_up, posterior_channel(m.y_prime));
  const std::string yp = m.yprime_name();
  a.i_yt = mutual_information(full, {up, yp}, {roles.t}, unit);
  a.i_yx = mutual_information(full, {up, yp}, {roles.x}, unit);
  a.i_ys = mutual_information(full, {up, yp}, {roles.s}, unit);
  a.h_t_given_rest = conditional_entropy(
      full, {roles.t}, {yp, roles.s, roles.x, up}, unit);

  a.eq5_direct = a.i_yt;
  const double i_total =
      mutual_information(full, {roles.x, roles.s, roles.t}, {up, yp}, unit);
  const double i_cond = conditional_mutual_information(
      full, {roles.x, roles.s}, {up, yp}, {roles.t}, unit);
  a.eq5_total_minus_cond = i_total - i_cond;
  const double i_xs_y =
      mutual_information(full, {roles.x, roles.s}, {up, yp}, unit);
  const double h_t_xs = conditional_entropy(full, {roles.t},
                                            {roles.x, roles.s}, unit);
  const double h_t_yxs = conditional_entropy(
      full, {roles.t}, {up, yp, roles.x, roles.s}, unit);
  a.eq5_expanded = i_xs_y + h_t_xs - h_t_yxs - i_cond;

  a.parity_slack = m.epsilon - a.i_ys;
  a.rate_slack = m.r - a.i_yx;
  a.bound_slack = a.i_yt - m.claimed_bound;
  constexpr double kTol = 1e-9;
  a.parity_ok = a.parity_slack >= -kTol;
  a.rate_ok = a.rate_slack >= -kTol;
  a.bound_ok = a.bound_slack >= -kTol;

  if (m.sfrl_checked) {
    a.sfrl_checked = true;
    std::vector<std::string> xs{roles.s, roles.x};
    std::vector<std::string> ys{roles.t};
    std::vector<std::string> given{up};
    a.sfrl = sfrl_check(full, xs, yp, ys, given, unit);
  }
  return a;
}

/// Materializes the mechanism as a dense channel P(Y | S, X, T) with
/// Y = (U', Y'), the output alphabet pruned of zero-probability pairs.
inline Channel realize(const Mechanism& m, const JointDistribution& j) {
  Channel mixed =
      detail::mixed_seed_channel(m.seed, m.mix_alpha, m.uprime_alphabet);
  Channel ypost = posterior_channel(m.y_prime);

  // Row index helpers into the two stage channels.
  const std::size_t nu = m.uprime_alphabet.size();
  const std::size_t ny = m.y_prime.num_atoms();
  std::vector<std::size_t> mixed_axes, ypost_axes;
  for (const auto& v : mixed.inputs()) mixed_axes.push_back(j.axis_of(v.name));
  // ypost inputs are (context vars..., task); the context vars include U',
  // which is not in j, so resolve per variable below.
  std::vector<int> ypost_from_j;  // axis in j, or -1 for U'
  for (const auto& v : ypost.inputs()) {
    ypost_from_j.push_back(v.name == m.uprime_name()
                               ? -1
                               : static_cast<int>(j.axis_of(v.name)));
  }

  const std::size_t n_axes = j.variables().size();
  std::vector<std::size_t> sizes(n_axes);
  for (std::size_t a = 0; a < n_axes; ++a) {
    sizes[a] = j.variables()[a].alphabet.size();
  }

  // First pass: joint mass of every (u', y') pair, to prune.
  std::vector<double> pair_mass(nu * ny, 0.0);
  std::vector<double> dense(j.cell_count() * nu * ny, 0.0);
  std::vector<std::size_t> coord(n_axes, 0);
  std::span<const double> src = j.probs();
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    std::size_t mrow = 0;
    for (std::size_t i = 0; i < mixed_axes.size(); ++i) {
      mrow = mrow * sizes[mixed_axes[i]] + coord[mixed_axes[i]];
    }
    for (std::size_t u = 0; u < nu; ++u) {
      std::size_t yrow = 0;
      for (std::size_t i = 0; i < ypost.inputs().size(); ++i) {
        const std::size_t width = ypost.inputs()[i].alphabet.size();
        const std::size_t c =
            ypost_from_j[i] < 0 ? u : coord[ypost_from_j[i]];
        yrow = yrow * width + c;
      }
      const double pu = mixed(mrow, u);
      for (std::size_t y = 0; y < ny; ++y) {
        const double p = pu * ypost(yrow, y);
        dense[(lin * nu + u) * ny + y] = p;
        pair_mass[u * ny + y] += src[lin] * p;
      }
    }
    for (std::size_t a = n_axes; a-- > 0;) {
      if (++coord[a] < sizes[a]) break;
      coord[a] = 0;
    }
  }

  std::vector<std::size_t> keep;
  std::vector<std::string> labels;
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t y = 0; y < ny; ++y) {
      if (pair_mass[u * ny + y] > 0.0) {
        keep.push_back(u * ny + y);
        labels.push_back(m.uprime_alphabet.symbols()[u] + "&" +
                         m.y_prime.u_alphabet.symbols()[y]);
      }
    }
  }
  const std::size_t cols = keep.size();
  std::vector<double> table(j.cell_count() * cols, 0.0);
  std::vector<bool> undefined(j.cell_count(), false);
  for (std::size_t lin = 0; lin < src.size(); ++lin) {
    double row_sum = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double p = dense[lin * nu * ny + keep[k]];
      table[lin * cols + k] = p;
      row_sum += p;
    }
    if (src[lin] <= 0.0) undefined[lin] = true;
    if (row_sum <= 0.0) {
      for (std::size_t k = 0; k < cols; ++k) {
        table[lin * cols + k] = 1.0 / static_cast<double>(cols);
      }
      undefined[lin] = true;
    } else if (std::abs(row_sum - 1.0) > 1e-12) {
      // Mass aimed at pruned pairs can only come from undefined contexts.
      for (std::size_t k = 0; k < cols; ++k) table[lin * cols + k] /= row_sum;
    }
  }
  return Channel(j.variables(), Variable{m.y_name, Alphabet(m.y_name, labels)},
                 std::move(table), std::move(undefined));
}

}  // namespace fairrep
