// fairrep command-line tool: joint generation and loading, bound sweeps,
// mechanism construction with audits, the optimization oracle, and plot
// emission.
//
// Exit codes: 0 success, 2 parse/input error, 3 regime violation,
// 4 size-guard refusal.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairrep/fairrep.hpp"

namespace {

using namespace fairrep;

constexpr int kExitParse = 2;
constexpr int kExitRegime = 3;
constexpr int kExitSizeGuard = 4;

SweepSpec parse_sweep(const std::string& s) {
  // a:b:n
  std::istringstream iss(s);
  std::string a, b, n;
  if (!std::getline(iss, a, ':') || !std::getline(iss, b, ':') ||
      !std::getline(iss, n)) {
    throw ParseError("sweep expects start:stop:steps, got '" + s + "'", 0);
  }
  SweepSpec spec;
  spec.start = parse_double(a, 0);
  spec.stop = parse_double(b, 0);
  spec.steps = parse_index(n, static_cast<std::size_t>(-1), 0);
  if (spec.steps < 1) throw ParseError("sweep needs >= 1 step", 0);
  return spec;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  out << content;
}

std::string audit_summary(const Mechanism& m, const AuditResult& a,
                          LogBase unit) {
  std::ostringstream os;
  os << "mechanism " << recipe_name(m.recipe) << " (r = " << format_double(m.r)
     << ", epsilon = " << format_double(m.epsilon) << ", base "
     << base_name(unit) << ")\n";
  for (const auto& line : m.log) os << "  " << line << '\n';
  os << "measured:\n";
  os << "  I(Y;T) = " << format_double(a.i_yt) << "  (claimed "
     << a.claimed_name << " = " << format_double(a.claimed_bound)
     << ", slack " << format_double(a.bound_slack) << ", "
     << (a.bound_ok ? "certified" : "below claim") << ")\n";
  os << "  I(Y;S) = " << format_double(a.i_ys) << "  (limit "
     << format_double(a.eps_target) << ", slack "
     << format_double(a.parity_slack) << ", "
     << (a.parity_ok ? "ok" : "violated") << ")\n";
  os << "  I(Y;X) = " << format_double(a.i_yx) << "  (limit "
     << format_double(a.r_target) << ", slack "
     << format_double(a.rate_slack) << ", " << (a.rate_ok ? "ok" : "violated")
     << ")\n";
  os << "  I(U;" << (m.recipe == Recipe::L3 || m.recipe == Recipe::L4 ? "X" : "S")
     << ") = " << format_double(a.i_seed_leakage) << "  (target "
     << format_double(a.seed_leakage_target) << ")\n";
  os << "  I(U';X,S) = " << format_double(a.i_uprime_xs) << "  (target "
     << format_double(a.i_uprime_xs_target) << ")\n";
  os << "  H(T|Y',S,X,U') = " << format_double(a.h_t_given_rest) << '\n';
  os << "  utility decomposition: direct = " << format_double(a.eq5_direct)
     << ", via total-minus-conditional = "
     << format_double(a.eq5_total_minus_cond)
     << ", expanded = " << format_double(a.eq5_expanded) << '\n';
  if (a.sfrl_checked) {
    os << "  conditional strong-lemma check: "
       << (a.sfrl.holds ? "holds" : "fails")
       << " (measured " << format_double(a.sfrl.measured) << ", ceiling "
       << format_double(a.sfrl.ceiling) << ")\n";
  }
  return os.str();
}

struct CommonArgs {
  std::string joint_path;
  bool nats = false;
  std::optional<double> r;
  std::optional<std::string> r_sweep;
  std::optional<double> epsilon;
  std::optional<std::string> eps_sweep;
  std::string out;
  double cell_budget = 1e6;

  LogBase unit() const { return nats ? LogBase::nats : LogBase::bits; }
};

int run(int argc, char** argv) {
  CLI::App app{"fair/private representation bounds and mechanisms"};
  app.require_subcommand(1);
  CommonArgs c;

  // --- typewriter ---
  auto* tw = app.add_subcommand(
      "typewriter", "generate the noisy-typewriter joint and sweep bounds");
  std::size_t tw_n = 1000;
  double tw_hit = 1.0 / 3.0;
  double tw_eps = 0.1;
  std::string tw_rsweep = "0:10:101";
  std::string tw_out_joint;
  tw->add_option("--n", tw_n, "symbol count (>= 10)");
  tw->add_option("--hit-prob", tw_hit, "probability of echoing the input");
  tw->add_option("--epsilon", tw_eps, "leakage limit for the sweep");
  tw->add_option("--r-sweep", tw_rsweep, "rate sweep start:stop:steps");
  tw->add_option("--out", c.out, "CSV output path");
  tw->add_option("--out-joint", tw_out_joint, "also write the joint file");
  tw->add_flag("--nats", c.nats, "report in nats instead of bits");

  // --- bounds ---
  auto* bd = app.add_subcommand("bounds", "evaluate bound curves on a joint");
  bd->add_option("--joint", c.joint_path, "joint file")->required();
  bd->add_option("--r", c.r, "fixed rate limit");
  bd->add_option("--r-sweep", c.r_sweep, "rate sweep start:stop:steps");
  bd->add_option("--epsilon", c.epsilon, "fixed leakage limit");
  bd->add_option("--eps-sweep", c.eps_sweep, "leakage sweep start:stop:steps");
  bd->add_option("--out", c.out, "CSV output path");
  bd->add_flag("--nats", c.nats, "report in nats instead of bits");

  // --- mechanism ---
  auto* mc = app.add_subcommand("mechanism",
                                "construct a representation channel and audit it");
  std::string mc_recipe = "L1";
  double mc_r = 0.0, mc_eps = 0.0;
  mc->add_option("--joint", c.joint_path, "joint file")->required();
  mc->add_option("--recipe", mc_recipe, "L1 | L2 | L3 | L4 | thm1");
  mc->add_option("--r", mc_r, "rate limit")->required();
  mc->add_option("--epsilon", mc_eps, "leakage limit");
  mc->add_option("--out", c.out, "channel export path");
  mc->add_option("--cell-budget", c.cell_budget, "size-guard cell budget");
  mc->add_flag("--nats", c.nats, "report in nats instead of bits");

  // --- oracle ---
  auto* oc = app.add_subcommand("oracle",
                                "search for a good feasible channel directly");
  double oc_r = 0.0, oc_eps = 0.0;
  std::size_t oc_ycard = 0;
  int oc_restarts = 64, oc_iters = 500;
  std::uint64_t oc_seed = 1;
  bool oc_markov = false;
  oc->add_option("--joint", c.joint_path, "joint file")->required();
  oc->add_option("--r", oc_r, "rate limit")->required();
  oc->add_option("--epsilon", oc_eps, "leakage limit");
  oc->add_option("--y-card", oc_ycard, "output cardinality (0 = |S||X||T|+2)");
  oc->add_option("--restarts", oc_restarts, "ascent restarts");
  oc->add_option("--iters", oc_iters, "iterations per restart");
  oc->add_option("--seed", oc_seed, "random seed");
  oc->add_flag("--markov", oc_markov, "restrict the channel to read X only");
  oc->add_option("--out", c.out, "channel export path");
  oc->add_option("--cell-budget", c.cell_budget, "size-guard cell budget");
  oc->add_flag("--nats", c.nats, "report in nats instead of bits");

  // --- plot ---
  auto* pl = app.add_subcommand("plot", "render a bounds CSV as SVG + dat");
  std::string pl_csv;
  pl->add_option("--csv", pl_csv, "bounds CSV produced by this tool")
      ->required();
  pl->add_option("--out", c.out, "output path stem (.svg/.dat appended)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  const LogBase unit = c.unit();
  if (tw->parsed()) {
    JointDistribution j = make_typewriter_joint(tw_n, tw_hit);
    InfoSummary m = summarize(j, {}, unit);
    std::vector<std::string> notes;
    notes.push_back("typewriter n=" + std::to_string(tw_n) +
                    " hit_prob=" + format_double(tw_hit));
    notes.push_back("H(T)=" + format_double(m.h_t) +
                    " H(S)=" + format_double(m.h_s) +
                    " H(T|S)=" + format_double(m.h_t_given_s) +
                    " H(T|X)=" + format_double(m.h_t_given_x));
    const double cross_ub = upper_crossover_r(m, tw_eps);
    const double cross_l2 = composite_crossover_r(m, tw_eps);
    notes.push_back("crossover_upper_bounds_r=" + format_double(cross_ub));
    notes.push_back("crossover_L2_over_L1_r=" + format_double(cross_l2));
    SweepSpec rs = parse_sweep(tw_rsweep);
    std::string csv = bounds_sweep_csv(j, rs, SweepSpec{tw_eps, tw_eps, 1},
                                       {}, unit, notes);
    if (!c.out.empty()) {
      write_file(c.out, csv);
    } else {
      std::cout << csv;
    }
    for (const auto& n : notes) std::cout << "# " << n << '\n';
    if (!tw_out_joint.empty()) save_joint(j, tw_out_joint);
    return 0;
  }

  if (bd->parsed()) {
    JointDistribution j = load_joint(c.joint_path);
    SweepSpec rs = c.r_sweep ? parse_sweep(*c.r_sweep)
                             : SweepSpec{c.r.value_or(0.0), c.r.value_or(0.0), 1};
    SweepSpec es = c.eps_sweep
                       ? parse_sweep(*c.eps_sweep)
                       : SweepSpec{c.epsilon.value_or(0.0),
                                   c.epsilon.value_or(0.0), 1};
    std::vector<std::string> notes{"joint: " + c.joint_path};
    std::string csv = bounds_sweep_csv(j, rs, es, {}, unit, notes);
    if (!c.out.empty()) {
      write_file(c.out, csv);
    } else {
      std::cout << csv;
    }
    return 0;
  }

  if (mc->parsed()) {
    JointDistribution j = load_joint(c.joint_path);
    Recipe recipe;
    if (mc_recipe == "L1") {
      recipe = Recipe::L1;
    } else if (mc_recipe == "L2") {
      recipe = Recipe::L2;
    } else if (mc_recipe == "L3") {
      recipe = Recipe::L3;
    } else if (mc_recipe == "L4") {
      recipe = Recipe::L4;
    } else if (mc_recipe == "thm1") {
      recipe = Recipe::Theorem1;
    } else {
      throw ParseError("unknown recipe '" + mc_recipe + "'", 0);
    }
    MechanismOptions opt;
    opt.unit = unit;
    opt.cell_budget = c.cell_budget;
    Mechanism m = construct_mechanism(j, recipe, mc_r, mc_eps, opt);
    AuditResult a = audit(m, j);
    std::string summary = audit_summary(m, a, unit);
    std::cout << summary;
    if (!c.out.empty()) {
      Channel ch = realize(m, j);
      std::ofstream out(c.out);
      if (!out) throw std::runtime_error("cannot open '" + c.out + "'");
      out << "# mechanism " << recipe_name(m.recipe)
          << " r=" << format_double(m.r)
          << " epsilon=" << format_double(m.epsilon) << " base "
          << base_name(unit) << '\n';
      save_channel(ch, out);
      write_file(c.out + ".audit.txt", summary);
    }
    return 0;
  }

  if (oc->parsed()) {
    JointDistribution j = load_joint(c.joint_path);
    OracleOptions opt;
    opt.unit = unit;
    opt.y_card = oc_ycard;
    opt.restarts = oc_restarts;
    opt.iters = oc_iters;
    opt.seed = oc_seed;
    opt.cell_budget = c.cell_budget;
    if (oc_markov) opt.channel_inputs = {opt.roles.x};
    OracleResult res = oracle_optimize(j, oc_r, oc_eps, opt);
    BoundReport rep = theorem2_bounds(j, oc_r, oc_eps, {}, unit);
    std::ostringstream os;
    os << "oracle (r = " << format_double(oc_r)
       << ", epsilon = " << format_double(oc_eps) << ", base "
       << base_name(unit) << ", seed " << oc_seed << ")\n";
    os << "  utility I(Y;T) = " << format_double(res.utility) << "  ["
       << res.source << "]\n";
    os << "  I(Y;S) = " << format_double(res.leak_s)
       << "  I(Y;X) = " << format_double(res.leak_x) << '\n';
    os << "  sandwich: best_lower = " << format_double(rep.best_lower)
       << " <= oracle = " << format_double(res.utility)
       << " <= best_upper = " << format_double(rep.best_upper) << '\n';
    std::cout << os.str();
    if (!c.out.empty()) {
      std::ofstream out(c.out);
      if (!out) throw std::runtime_error("cannot open '" + c.out + "'");
      save_channel(res.channel, out);
      write_file(c.out + ".report.txt", os.str());
    }
    return 0;
  }

  if (pl->parsed()) {
    CsvTable t = parse_csv(pl_csv);
    {
      std::ofstream svg(c.out + ".svg");
      if (!svg) throw std::runtime_error("cannot open '" + c.out + ".svg'");
      write_svg_plot(t, svg);
    }
    {
      std::ofstream dat(c.out + ".dat");
      if (!dat) throw std::runtime_error("cannot open '" + c.out + ".dat'");
      write_gnuplot_dat(t, dat);
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fairrep::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const fairrep::RegimeError& e) {
    std::cerr << "regime violation: " << e.what() << '\n';
    return kExitRegime;
  } catch (const fairrep::SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << '\n';
    return kExitSizeGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
}
