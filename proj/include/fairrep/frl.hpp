#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairrep/channel.hpp"
#include "fairrep/measures.hpp"

namespace fairrep {

/// Functional representation of a channel P(Y|X): a seed variable U,
/// independent of X, plus a deterministic decision table f(u, x) -> y that
/// reproduces P(Y|X) exactly.
///
/// Built by interval superposition: each input context lays the CDF of its
/// output row on [0,1); the atoms of U are the common refinement of all
/// breakpoints, so |U| <= |X|(|Y|-1)+1 and P(U = atom) = interval length.
struct FrlDecomposition {
  Alphabet u_alphabet;
  std::vector<double> u_probs;
  /// Row-major [atom][input context] -> output symbol index. Total: defined
  /// for every (atom, context) pair, including zero-probability contexts.
  std::vector<std::uint32_t> decision;
  std::vector<Variable> inputs;
  Variable output;
  /// Source pair the decomposition was built from.
  std::vector<double> input_marginal;  // row-major over inputs
  Channel source;                      // P(output | inputs)

  std::size_t num_atoms() const { return u_probs.size(); }
  std::size_t num_contexts() const { return source.rows(); }
  std::uint32_t f(std::size_t atom, std::size_t ctx) const {
    return decision[atom * num_contexts() + ctx];
  }
  Variable u_variable() const { return Variable{u_alphabet.name(), u_alphabet}; }
};

/// Breakpoints closer than this merge, preventing zero-length atoms born
/// from float noise.
inline constexpr double kBreakpointTolerance = 1e-12;

inline FrlDecomposition frl_construct(const JointDistribution& input_marginal,
                                      const Channel& chan,
                                      const std::string& u_name = "U",
                                      const std::string& atom_prefix = "u") {
  if (!(input_marginal.variables() == chan.inputs())) {
    throw std::invalid_argument(
        "frl_construct: marginal variables and channel inputs differ");
  }
  const std::size_t ctxs = chan.rows();
  const std::size_t cols = chan.cols();

  // Per-context CDF over output symbols; final entry pinned to 1.
  std::vector<double> cdf(ctxs * (cols + 1), 0.0);
  for (std::size_t c = 0; c < ctxs; ++c) {
    double acc = 0.0;
    for (std::size_t y = 0; y < cols; ++y) {
      acc += chan(c, y);
      cdf[c * (cols + 1) + y + 1] = acc;
    }
    cdf[c * (cols + 1) + cols] = 1.0;
  }

  std::vector<double> breaks;
  breaks.reserve(ctxs * (cols - 1) + 2);
  for (std::size_t c = 0; c < ctxs; ++c) {
    for (std::size_t y = 1; y < cols; ++y) {
      breaks.push_back(cdf[c * (cols + 1) + y]);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts{0.0};
  for (double b : breaks) {
    if (b - cuts.back() > kBreakpointTolerance && 1.0 - b > kBreakpointTolerance) {
      cuts.push_back(b);
    }
  }
  cuts.push_back(1.0);

  const std::size_t atoms = cuts.size() - 1;
  std::vector<double> u_probs(atoms);
  std::vector<std::string> labels(atoms);
  for (std::size_t a = 0; a < atoms; ++a) {
    u_probs[a] = cuts[a + 1] - cuts[a];
    labels[a] = atom_prefix + std::to_string(a);
  }

  std::vector<std::uint32_t> decision(atoms * ctxs);
  for (std::size_t a = 0; a < atoms; ++a) {
    const double mid = 0.5 * (cuts[a] + cuts[a + 1]);
    for (std::size_t c = 0; c < ctxs; ++c) {
      const double* row = &cdf[c * (cols + 1)];
      // First y whose CDF exceeds the midpoint; zero-length segments are
      // skipped because the comparison is strict.
      std::size_t y = std::upper_bound(row + 1, row + cols + 1, mid) - (row + 1);
      decision[a * ctxs + c] = static_cast<std::uint32_t>(std::min(y, cols - 1));
    }
  }

  std::vector<double> marg(input_marginal.probs().begin(),
                           input_marginal.probs().end());
  return FrlDecomposition{Alphabet(u_name, std::move(labels)),
                          std::move(u_probs),
                          std::move(decision),
                          input_marginal.variables(),
                          chan.output(),
                          std::move(marg),
                          chan};
}

/// P(y | x) as reproduced by the decomposition: sum of atom masses routed
/// to y under context x.
inline std::vector<double> reconstructed_row(const FrlDecomposition& d,
                                             std::size_t ctx) {
  std::vector<double> row(d.output.alphabet.size(), 0.0);
  for (std::size_t a = 0; a < d.num_atoms(); ++a) {
    row[d.f(a, ctx)] += d.u_probs[a];
  }
  return row;
}

/// Max cell error between the reconstructed conditional and the source.
inline double reconstruction_error(const FrlDecomposition& d) {
  double worst = 0.0;
  for (std::size_t c = 0; c < d.num_contexts(); ++c) {
    std::vector<double> row = reconstructed_row(d, c);
    for (std::size_t y = 0; y < row.size(); ++y) {
      worst = std::max(worst, std::abs(row[y] - d.source(c, y)));
    }
  }
  return worst;
}

/// Joint over (inputs..., U, output) generated by the decomposition:
/// P(x, u, y) = P(x) * P(u) * 1[f(u, x) = y].
inline JointDistribution decomposition_joint(const FrlDecomposition& d) {
  const std::size_t ctxs = d.num_contexts();
  const std::size_t atoms = d.num_atoms();
  const std::size_t cols = d.output.alphabet.size();
  std::vector<double> cells(ctxs * atoms * cols, 0.0);
  for (std::size_t c = 0; c < ctxs; ++c) {
    for (std::size_t a = 0; a < atoms; ++a) {
      cells[(c * atoms + a) * cols + d.f(a, c)] =
          d.input_marginal[c] * d.u_probs[a];
    }
  }
  std::vector<Variable> vars = d.inputs;
  vars.push_back(d.u_variable());
  vars.push_back(d.output);
  return JointDistribution(std::move(vars), std::move(cells));
}

/// Posterior channel P(U | inputs..., output); attaches the seed to any
/// joint that already carries the decomposition's input and output
/// variables (conditionally independent of everything else given them).
inline Channel posterior_channel(const FrlDecomposition& d) {
  const std::size_t ctxs = d.num_contexts();
  const std::size_t cols = d.output.alphabet.size();
  const std::size_t atoms = d.num_atoms();
  std::vector<double> table(ctxs * cols * atoms, 0.0);
  std::vector<bool> undefined(ctxs * cols, false);
  for (std::size_t c = 0; c < ctxs; ++c) {
    std::vector<double> mass = reconstructed_row(d, c);
    for (std::size_t y = 0; y < cols; ++y) {
      const std::size_t row = c * cols + y;
      if (mass[y] > 0.0) {
        for (std::size_t a = 0; a < atoms; ++a) {
          if (d.f(a, c) == y) table[row * atoms + a] = d.u_probs[a] / mass[y];
        }
      } else {
        undefined[row] = true;
        for (std::size_t a = 0; a < atoms; ++a) {
          table[row * atoms + a] = 1.0 / static_cast<double>(atoms);
        }
      }
    }
  }
  std::vector<Variable> in_vars = d.inputs;
  in_vars.push_back(d.output);
  return Channel(std::move(in_vars), d.u_variable(), std::move(table),
                 std::move(undefined));
}

/// Extended functional representation: U = (W, Z) where W is the FRL seed
/// and Z reveals the input with probability reveal_prob (else a filler
/// constant), so that I(U; input) equals the requested leakage exactly.
struct ExtendedDecomposition {
  FrlDecomposition base;  // W
  double reveal_prob;     // epsilon / H(input)
  double epsilon;         // requested leakage, in `unit`
  LogBase unit;
  std::string filler;
  Alphabet u_alphabet;  // (W x (revealed input or filler)), pruned
  /// Per U symbol: (atom index, context index) with context == num_contexts
  /// standing for the filler.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> u_pairs;
  /// Set when the requested leakage is at or above I(input; output); the
  /// construction still works in the wider regime epsilon < H(input).
  bool exceeds_source_mi;

  Variable u_variable() const { return Variable{u_alphabet.name(), u_alphabet}; }
};

namespace detail {

inline std::string context_label(const std::vector<Variable>& vars,
                                 std::size_t ctx) {
  std::vector<std::size_t> coord(vars.size());
  for (std::size_t i = vars.size(); i-- > 0;) {
    coord[i] = ctx % vars[i].alphabet.size();
    ctx /= vars[i].alphabet.size();
  }
  std::string label;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) label += ',';
    label += vars[i].alphabet.symbols()[coord[i]];
  }
  return label;
}

inline std::string fresh_filler(const std::vector<std::string>& taken) {
  std::string f = "_";
  while (std::find(taken.begin(), taken.end(), f) != taken.end()) f += "_";
  return f;
}

}  // namespace detail

/// Lemma-level leakage calibration: 0 <= epsilon < H(input) is required;
/// epsilon at or above I(input;output) is accepted but flagged.
inline ExtendedDecomposition efrl_construct(
    const JointDistribution& input_marginal, const Channel& chan,
    double epsilon, LogBase unit = LogBase::bits,
    const std::string& u_name = "U", const std::string& w_name = "W") {
  if (epsilon < 0.0) {
    throw std::invalid_argument("efrl_construct: epsilon < 0");
  }
  const double h_in = detail::entropy_of_cells(input_marginal.probs(), unit);
  if (epsilon > 0.0 && h_in == 0.0) {
    throw RegimeError("efrl_construct: epsilon > 0 with H(input) = 0");
  }
  if (epsilon > 0.0 && epsilon >= h_in) {
    throw RegimeError("efrl_construct: epsilon >= H(input) (got " +
                      std::to_string(epsilon) + " >= " + std::to_string(h_in) +
                      ")");
  }
  const double alpha = h_in > 0.0 ? epsilon / h_in : 0.0;

  FrlDecomposition w = frl_construct(input_marginal, chan, w_name, "w");

  double i_source = 0.0;
  {
    JointDistribution pair_joint = compose(input_marginal, chan);
    std::vector<std::string> in_names;
    for (const auto& v : input_marginal.variables()) in_names.push_back(v.name);
    std::vector<std::string> out_names{chan.output().name};
    i_source = mutual_information(pair_joint,
                                  std::span<const std::string>(in_names),
                                  std::span<const std::string>(out_names), unit);
  }

  const std::size_t ctxs = w.num_contexts();
  std::vector<std::string> ctx_labels(ctxs);
  for (std::size_t c = 0; c < ctxs; ++c) {
    ctx_labels[c] = detail::context_label(w.inputs, c);
  }
  const std::string filler = detail::fresh_filler(ctx_labels);

  std::vector<std::string> labels;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t a = 0; a < w.num_atoms(); ++a) {
    if (alpha > 0.0) {
      for (std::size_t c = 0; c < ctxs; ++c) {
        if (w.input_marginal[c] > 0.0) {
          labels.push_back(w.u_alphabet.symbols()[a] + ":" + ctx_labels[c]);
          pairs.emplace_back(static_cast<std::uint32_t>(a),
                             static_cast<std::uint32_t>(c));
        }
      }
    }
    labels.push_back(w.u_alphabet.symbols()[a] + ":" + filler);
    pairs.emplace_back(static_cast<std::uint32_t>(a),
                       static_cast<std::uint32_t>(ctxs));
  }

  return ExtendedDecomposition{std::move(w),
                               alpha,
                               epsilon,
                               unit,
                               filler,
                               Alphabet(u_name, std::move(labels)),
                               std::move(pairs),
                               epsilon >= i_source};
}

/// Joint extended with the materialized internals of an EFRL seed: the FRL
/// atom W, the fresh reveal coin B, the randomized response Z, and the
/// packed seed U = (W, Z). Nothing is folded algebraically; every identity
/// can be measured on the result.
struct ExtendedAttachment {
  JointDistribution joint;
  std::string w_name;
  std::string b_name;
  std::string z_name;
  std::string u_name;
};

inline ExtendedAttachment attach_extended(const JointDistribution& j,
                                          const ExtendedDecomposition& d) {
  const std::size_t ctxs = d.base.num_contexts();
  const std::string w_name = d.base.u_alphabet.name();
  const std::string b_name = w_name + "_coin";
  const std::string z_name = w_name + "_reveal";
  const std::string u_name = d.u_alphabet.name();

  JointDistribution jw = compose(j, posterior_channel(d.base));

  Channel coin({}, Variable{b_name, Alphabet(b_name, {"0", "1"})},
               {1.0 - d.reveal_prob, d.reveal_prob});
  JointDistribution jb = compose(jw, coin);

  // Z = input context when the coin shows 1, the filler otherwise.
  std::vector<std::string> z_syms;
  for (std::size_t c = 0; c < ctxs; ++c) {
    z_syms.push_back(detail::context_label(d.base.inputs, c));
  }
  z_syms.push_back(d.filler);
  Alphabet z_alpha(z_name, std::move(z_syms));
  std::vector<Variable> z_ins{jb.variable(b_name)};
  for (const auto& v : d.base.inputs) z_ins.push_back(v);
  std::vector<double> z_table(2 * ctxs * (ctxs + 1), 0.0);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t c = 0; c < ctxs; ++c) {
      std::size_t row = b * ctxs + c;
      z_table[row * (ctxs + 1) + (b == 1 ? c : ctxs)] = 1.0;
    }
  }
  JointDistribution jz =
      compose(jb, Channel(std::move(z_ins), Variable{z_name, z_alpha},
                          std::move(z_table)));

  // U packs (W, Z) into the pruned pair alphabet.
  const std::size_t atoms = d.base.num_atoms();
  const std::size_t zs = ctxs + 1;
  const std::size_t us = d.u_pairs.size();
  std::vector<std::uint32_t> pair_to_u(atoms * zs, 0);
  for (std::size_t u = 0; u < us; ++u) {
    pair_to_u[d.u_pairs[u].first * zs + d.u_pairs[u].second] =
        static_cast<std::uint32_t>(u);
  }
  std::vector<double> u_table(atoms * zs * us, 0.0);
  for (std::size_t a = 0; a < atoms; ++a) {
    for (std::size_t z = 0; z < zs; ++z) {
      u_table[(a * zs + z) * us + pair_to_u[a * zs + z]] = 1.0;
    }
  }
  JointDistribution ju = compose(
      jz, Channel({jz.variable(w_name), jz.variable(z_name)},
                  d.u_variable(), std::move(u_table)));

  return ExtendedAttachment{std::move(ju), w_name, b_name, z_name, u_name};
}

/// Constant-mixing randomization: adds out_name = u_var with probability
/// alpha, a fresh filler constant otherwise (coin independent of all
/// variables). Scales every mutual information with the mixed variable by
/// exactly alpha. The internal coin is materialized and summed back out.
inline JointDistribution mix_with_constant(const JointDistribution& j,
                                           const std::string& u_var,
                                           double alpha,
                                           std::string out_name = "") {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("mix_with_constant: alpha outside [0, 1]");
  }
  if (out_name.empty()) out_name = u_var + "'";
  const Alphabet& u_alpha = j.variable(u_var).alphabet;

  std::vector<std::string> taken;
  for (const auto& v : j.variables()) {
    for (const auto& s : v.alphabet.symbols()) taken.push_back(s);
  }
  const std::string filler = detail::fresh_filler(taken);

  std::vector<std::string> out_syms;
  if (alpha > 0.0) out_syms = u_alpha.symbols();
  if (alpha < 1.0) out_syms.push_back(filler);
  Alphabet out_alpha(out_name, std::move(out_syms));
  const std::size_t us = u_alpha.size();
  const std::size_t os = out_alpha.size();

  const std::string coin_name = out_name + "_coin";
  Channel coin({}, Variable{coin_name, Alphabet(coin_name, {"0", "1"})},
               {1.0 - alpha, alpha});
  JointDistribution jm = compose(j, coin);

  std::vector<double> table(2 * us * os, 0.0);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t u = 0; u < us; ++u) {
      std::size_t tgt;
      if (m == 1) {
        tgt = alpha > 0.0 ? u : os - 1;
      } else {
        tgt = alpha < 1.0 ? os - 1 : u;
      }
      table[(m * us + u) * os + tgt] = 1.0;
    }
  }
  JointDistribution jo = compose(
      jm, Channel({jm.variable(coin_name), jm.variable(u_var)},
                  Variable{out_name, out_alpha}, std::move(table)));

  std::vector<std::string> keep;
  for (const auto& v : j.variables()) keep.push_back(v.name);
  keep.push_back(out_name);
  return marginalize(jo, std::span<const std::string>(keep));
}

/// Ceiling on I(X; U | Y) guaranteed by the strong lemma for a seed built
/// from a pair with mutual information i_xy (constants fixed per unit).
inline double sfrl_bound(double i_xy, LogBase unit = LogBase::bits) {
  if (i_xy < -1e-12) {
    throw std::invalid_argument("sfrl_bound: negative mutual information");
  }
  return log_base(std::max(i_xy, 0.0) + 5.51, unit) + 1.06;
}

/// Leakage-calibrated counterpart: alpha * H(X|Y) + (1-alpha) * ceiling,
/// with alpha = epsilon / H(X).
inline double esfrl_bound(double epsilon, double h_x, double h_x_given_y,
                          double i_xy, LogBase unit = LogBase::bits) {
  if (epsilon < 0.0) throw std::invalid_argument("esfrl_bound: epsilon < 0");
  if (epsilon > 0.0 && epsilon >= h_x) {
    throw RegimeError("esfrl_bound: epsilon >= H(X)");
  }
  const double alpha = h_x > 0.0 ? epsilon / h_x : 0.0;
  return alpha * h_x_given_y + (1.0 - alpha) * sfrl_bound(i_xy, unit);
}

struct SfrlCheck {
  bool holds = false;
  double slack = 0.0;     // ceiling - measured
  double measured = 0.0;  // I(x_vars; u | y_vars, given)
  double ceiling = 0.0;   // sfrl_bound(I(x_vars; y_vars | given))
  double i_xy = 0.0;
};

/// Measures whether a seed variable satisfies the strong-lemma inequality
/// on a composed joint; `given` empty gives the plain form, non-empty the
/// conditional form used for the composite constructions.
inline SfrlCheck sfrl_check(const JointDistribution& j,
                            std::span<const std::string> x_vars,
                            const std::string& u_var,
                            std::span<const std::string> y_vars,
                            std::span<const std::string> given = {},
                            LogBase unit = LogBase::bits) {
  std::vector<std::string> u{u_var};
  std::vector<std::string> cond(y_vars.begin(), y_vars.end());
  cond.insert(cond.end(), given.begin(), given.end());
  SfrlCheck out;
  out.i_xy = std::max(
      0.0, conditional_mutual_information(j, x_vars, y_vars, given, unit));
  out.measured = conditional_mutual_information(
      j, x_vars, std::span<const std::string>(u),
      std::span<const std::string>(cond), unit);
  out.ceiling = sfrl_bound(out.i_xy, unit);
  out.slack = out.ceiling - out.measured;
  out.holds = out.slack >= -1e-12;
  return out;
}

/// Plain check for a decomposition audited on a joint carrying its
/// variables.
inline SfrlCheck sfrl_check(const FrlDecomposition& d,
                            const JointDistribution& j,
                            LogBase unit = LogBase::bits) {
  std::vector<std::string> xs;
  for (const auto& v : d.inputs) xs.push_back(v.name);
  std::vector<std::string> ys{d.output.name};
  return sfrl_check(j, std::span<const std::string>(xs), d.u_alphabet.name(),
                    std::span<const std::string>(ys), {}, unit);
}

}  // namespace fairrep
