#include "fairrep/oracle.hpp"

#include <gtest/gtest.h>

#include "fairrep/mechanism.hpp"
#include "test_util.hpp"

namespace fairrep {
namespace {

using testutil::random_joint;

JointDistribution independent_sensitive_identity_task(std::mt19937_64& rng) {
  JointDistribution s = random_joint(rng, {{"S", 2}}, 0.2);
  JointDistribution x = random_joint(rng, {{"X", 3}}, 0.2);
  std::vector<double> cells(2 * 3 * 3, 0.0);
  for (std::size_t si = 0; si < 2; ++si) {
    for (std::size_t xi = 0; xi < 3; ++xi) {
      cells[(si * 3 + xi) * 3 + xi] = s.probs()[si] * x.probs()[xi];
    }
  }
  return JointDistribution({s.variables()[0], x.variables()[0],
                            Variable{"T", Alphabet::indexed("T", 3)}},
                           cells);
}

TEST(Oracle, RecoversFullUtilityWhenUnconstrained) {
  std::mt19937_64 rng(201);
  JointDistribution j = independent_sensitive_identity_task(rng);
  const double h_t = entropy(j, {"T"});
  OracleOptions opt;
  opt.seed = 5;
  OracleResult res = oracle_optimize(j, h_t + 0.5, 0.0, opt);
  EXPECT_TRUE(res.feasible);
  EXPECT_GE(res.utility, h_t - 1e-3);
  EXPECT_LE(res.leak_s, 1e-9);
}

TEST(Oracle, DeterministicGivenSeed) {
  std::mt19937_64 rng(203);
  JointDistribution j = random_joint(rng, {{"S", 2}, {"X", 2}, {"T", 2}});
  OracleOptions opt;
  opt.restarts = 8;
  opt.iters = 60;
  opt.seed = 42;
  OracleResult a = oracle_optimize(j, 0.4, 0.2, opt);
  OracleResult b = oracle_optimize(j, 0.4, 0.2, opt);
  EXPECT_EQ(a.utility, b.utility);
  ASSERT_EQ(a.channel.table().size(), b.channel.table().size());
  for (std::size_t i = 0; i < a.channel.table().size(); ++i) {
    EXPECT_EQ(a.channel.table()[i], b.channel.table()[i]);
  }
}

TEST(Oracle, BeatsExhaustiveDeterministicEnumeration) {
  std::mt19937_64 rng(207);
  for (int rep = 0; rep < 3; ++rep) {
    JointDistribution j = random_joint(rng, {{"S", 2}, {"X", 2}, {"T", 2}}, 0.1);
    const double r = 0.35, eps = 0.25;
    // All deterministic maps from the 8 contexts onto 2 symbols.
    double best_det = 0.0;
    for (std::size_t code = 0; code < 256; ++code) {
      std::vector<double> q(8 * 2, 0.0);
      for (std::size_t c = 0; c < 8; ++c) q[c * 2 + ((code >> c) & 1)] = 1.0;
      Channel ch(j.variables(), Variable{"Y", Alphabet::indexed("Y", 2)}, q);
      JointDistribution with_y = compose(j, ch);
      if (mutual_information(with_y, {"Y"}, {"S"}) <= eps + 1e-9 &&
          mutual_information(with_y, {"Y"}, {"X"}) <= r + 1e-9) {
        best_det =
            std::max(best_det, mutual_information(with_y, {"Y"}, {"T"}));
      }
    }
    OracleOptions opt;
    opt.y_card = 2;
    opt.restarts = 24;
    opt.iters = 200;
    opt.seed = 11 + rep;
    OracleResult res = oracle_optimize(j, r, eps, opt);
    EXPECT_GE(res.utility, best_det - 1e-3);
    BoundReport rep2 = theorem2_bounds(j, r, eps);
    EXPECT_LE(res.utility, rep2.best_upper + 1e-6);
  }
}

JointDistribution invertible_leakage_joint(std::mt19937_64& rng,
                                           std::size_t n) {
  // P(S|X) diagonally dominant (hence invertible), X floored away from
  // zero, T drawn from a random per-x row.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  JointDistribution x = random_joint(rng, {{"X", n}}, 0.3);
  std::vector<double> m(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      m[s * n + c] = (s == c ? 3.0 : 0.0) + u(rng);
      sum += m[s * n + c];
    }
    for (std::size_t s = 0; s < n; ++s) m[s * n + c] /= sum;
  }
  const std::size_t nt = 3;
  std::vector<double> rows(n * nt);
  for (std::size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      rows[c * nt + t] = u(rng) + 0.1;
      sum += rows[c * nt + t];
    }
    for (std::size_t t = 0; t < nt; ++t) rows[c * nt + t] /= sum;
  }
  std::vector<double> cells(n * n * nt);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t xi = 0; xi < n; ++xi) {
      for (std::size_t t = 0; t < nt; ++t) {
        cells[(s * n + xi) * nt + t] =
            x.probs()[xi] * m[s * n + xi] * rows[xi * nt + t];
      }
    }
  }
  return JointDistribution({Variable{"S", Alphabet::indexed("S", n)},
                            Variable{"X", Alphabet::indexed("X", n)},
                            Variable{"T", Alphabet::indexed("T", nt)}},
                           cells);
}

TEST(Oracle, PerfectParityWithInvertibleLeakageKillsUtility) {
  std::mt19937_64 rng(211);
  for (int rep = 0; rep < 4; ++rep) {
    JointDistribution j = invertible_leakage_joint(rng, 2 + (rep % 2));
    OracleOptions opt;
    opt.channel_inputs = {"X"};  // Markov restriction
    opt.y_card = 6;
    opt.restarts = 16;
    opt.iters = 150;
    opt.seed = 300 + rep;
    OracleResult res = oracle_optimize(j, 10.0, 0.0, opt);
    EXPECT_TRUE(res.feasible);
    EXPECT_LE(res.utility, 1e-3);
  }
}

TEST(Oracle, NegativeLimitsReportInfeasible) {
  std::mt19937_64 rng(213);
  JointDistribution j = random_joint(rng, {{"S", 2}, {"X", 2}, {"T", 2}});
  OracleResult res = oracle_optimize(j, -0.5, 0.1);
  EXPECT_FALSE(res.feasible);
}

TEST(Oracle, SizeGuardOnTableCells) {
  std::mt19937_64 rng(217);
  JointDistribution j = random_joint(rng, {{"S", 2}, {"X", 2}, {"T", 2}});
  OracleOptions opt;
  opt.y_card = 1000;
  opt.cell_budget = 100;
  EXPECT_THROW(oracle_optimize(j, 0.1, 0.1, opt), SizeGuardError);
}

TEST(Oracle, WarmStartNeverLosesToItsSource) {
  std::mt19937_64 rng(219);
  JointDistribution j = random_joint(rng, {{"S", 2}, {"X", 2}, {"T", 2}});
  InfoSummary info = summarize(j);
  const double eps = 0.4 * info.h_s;
  const double r = 0.6 * (info.h_x_given_s + eps);
  Mechanism m = construct_l1(j, r, eps);
  AuditResult a = audit(m, j);
  OracleOptions opt;
  opt.restarts = 4;
  opt.iters = 50;
  opt.seed = 9;
  opt.warm_starts.push_back(realize(m, j));
  OracleResult res = oracle_optimize(j, r, eps, opt);
  EXPECT_GE(res.utility, a.i_yt - 1e-9);
  BoundReport rep = theorem2_bounds(j, r, eps);
  EXPECT_LE(res.utility, rep.best_upper + 1e-6);
}

}  // namespace
}  // namespace fairrep
