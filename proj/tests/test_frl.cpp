#include "fairrep/frl.hpp"

#include <gtest/gtest.h>

#include "fairrep/mechanism.hpp"
#include "test_util.hpp"

namespace fairrep {
namespace {

using testutil::bsc;
using testutil::random_channel;
using testutil::random_joint;
using testutil::random_marginal;

JointDistribution uniform_x(std::size_t n) {
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  return JointDistribution({Variable{"X", Alphabet::indexed("X", n)}}, p);
}

double max_tv_u_given_x(const FrlDecomposition& d) {
  JointDistribution dj = decomposition_joint(d);
  std::vector<std::string> in_names;
  for (const auto& v : d.inputs) in_names.push_back(v.name);
  Channel u_given_x =
      condition(dj, d.u_alphabet.name(), std::span<const std::string>(in_names));
  double worst = 0.0;
  for (std::size_t r = 0; r < u_given_x.rows(); ++r) {
    if (u_given_x.row_undefined(r)) continue;
    double tv = 0.0;
    for (std::size_t a = 0; a < d.num_atoms(); ++a) {
      tv += std::abs(u_given_x(r, a) - d.u_probs[a]);
    }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

TEST(FrlConstruct, IdentityChannelNeedsOneAtom) {
  JointDistribution x = uniform_x(3);
  std::vector<double> table(9, 0.0);
  for (std::size_t i = 0; i < 3; ++i) table[i * 3 + i] = 1.0;
  Channel c({x.variables()[0]}, Variable{"Y", Alphabet::indexed("Y", 3)},
            table);
  FrlDecomposition d = frl_construct(x, c);
  EXPECT_EQ(d.num_atoms(), 1u);
  for (std::size_t ctx = 0; ctx < 3; ++ctx) EXPECT_EQ(d.f(0, ctx), ctx);
}

TEST(FrlConstruct, InputIndependentOutputCarriesItInU) {
  // Y ~ Bern(0.3) regardless of X: one shared breakpoint, two atoms.
  JointDistribution x = uniform_x(3);
  std::vector<double> table(6);
  for (std::size_t i = 0; i < 3; ++i) {
    table[i * 2 + 0] = 0.7;
    table[i * 2 + 1] = 0.3;
  }
  Channel c({x.variables()[0]}, Variable{"Y", Alphabet::indexed("Y", 2)},
            table);
  FrlDecomposition d = frl_construct(x, c);
  ASSERT_EQ(d.num_atoms(), 2u);
  EXPECT_NEAR(d.u_probs[0], 0.7, 1e-12);
  EXPECT_NEAR(d.u_probs[1], 0.3, 1e-12);
  for (std::size_t ctx = 0; ctx < 3; ++ctx) {
    EXPECT_EQ(d.f(0, ctx), 0u);
    EXPECT_EQ(d.f(1, ctx), 1u);
  }
}

TEST(FrlConstruct, BinarySymmetricChannelMeetsCardinalityBound) {
  JointDistribution x = uniform_x(2);
  FrlDecomposition d = frl_construct(x, bsc(0.25, x.variables()[0]));
  ASSERT_EQ(d.num_atoms(), 3u);  // |X|(|Y|-1)+1 with equality
  EXPECT_NEAR(d.u_probs[0], 0.25, 1e-12);
  EXPECT_NEAR(d.u_probs[1], 0.5, 1e-12);
  EXPECT_NEAR(d.u_probs[2], 0.25, 1e-12);
  EXPECT_LE(reconstruction_error(d), 1e-12);
}

TEST(FrlConstruct, MismatchedAlphabetsRejected) {
  JointDistribution x = uniform_x(2);
  JointDistribution z({Variable{"Z", Alphabet::indexed("Z", 2)}}, {0.5, 0.5});
  EXPECT_THROW(frl_construct(z, bsc(0.1, x.variables()[0])),
               std::invalid_argument);
}

TEST(FrlConstruct, InvariantsOnRandomChannels) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t nx = size(rng);
    const std::size_t ny = size(rng);
    JointDistribution x = random_marginal(rng, "X", nx);
    Channel c = random_channel(rng, x.variables()[0], "Y", ny);
    FrlDecomposition d = frl_construct(x, c);

    EXPECT_LE(d.num_atoms(), nx * (ny - 1) + 1);
    EXPECT_EQ(d.decision.size(), d.num_atoms() * nx);  // totality
    EXPECT_LE(reconstruction_error(d), 1e-9);
    EXPECT_LE(max_tv_u_given_x(d), 1e-9);

    JointDistribution dj = decomposition_joint(d);
    EXPECT_NEAR(conditional_entropy(dj, {"Y"}, {"U", "X"}), 0.0, 1e-9);
    double total = 0.0;
    for (double p : d.u_probs) total += p;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(PosteriorChannel, ReattachesSeedConsistently) {
  std::mt19937_64 rng(23);
  JointDistribution x = random_marginal(rng, "X", 4);
  Channel c = random_channel(rng, x.variables()[0], "Y", 3);
  FrlDecomposition d = frl_construct(x, c);
  JointDistribution pair = compose(x, c);
  JointDistribution withU = compose(pair, posterior_channel(d));
  EXPECT_NEAR(mutual_information(withU, {"U"}, {"X"}), 0.0, 1e-9);
  EXPECT_NEAR(conditional_entropy(withU, {"Y"}, {"U", "X"}), 0.0, 1e-9);
}

TEST(EfrlConstruct, ZeroLeakageDegeneratesToPlainSeed) {
  std::mt19937_64 rng(25);
  JointDistribution x = random_marginal(rng, "X", 3);
  Channel c = random_channel(rng, x.variables()[0], "Y", 3);
  ExtendedDecomposition d = efrl_construct(x, c, 0.0);
  EXPECT_EQ(d.reveal_prob, 0.0);
  EXPECT_EQ(d.u_pairs.size(), d.base.num_atoms());
  ExtendedAttachment att = attach_extended(compose(x, c), d);
  EXPECT_NEAR(mutual_information(att.joint, {"U"}, {"X"}), 0.0, 1e-9);
}

TEST(EfrlConstruct, HalfEntropyLeakageMeasuresExactly) {
  std::mt19937_64 rng(26);
  JointDistribution x = random_marginal(rng, "X", 4);
  Channel c = random_channel(rng, x.variables()[0], "Y", 3);
  const double h = entropy(x, {"X"});
  ExtendedDecomposition d = efrl_construct(x, c, h / 2.0);
  EXPECT_NEAR(d.reveal_prob, 0.5, 1e-12);
  ExtendedAttachment att = attach_extended(compose(x, c), d);
  EXPECT_NEAR(mutual_information(att.joint, {"U"}, {"X"}), h / 2.0, 1e-9);
}

TEST(EfrlConstruct, BscExampleFullJointAudit) {
  JointDistribution x = uniform_x(2);
  Channel c = bsc(0.25, x.variables()[0]);
  ExtendedDecomposition d = efrl_construct(x, c, 0.3);
  EXPECT_NEAR(d.reveal_prob, 0.3, 1e-12);  // H(X) = 1 bit
  EXPECT_LE(d.u_pairs.size(), 9u);         // [|X|(|Y|-1)+1][|X|+1]

  ExtendedAttachment att = attach_extended(compose(x, c), d);
  EXPECT_NEAR(mutual_information(att.joint, {"U"}, {"X"}), 0.3, 1e-9);
  EXPECT_NEAR(conditional_entropy(att.joint, {"Y"}, {"U", "X"}), 0.0, 1e-9);
  // The packed pair really is (W, Z).
  EXPECT_NEAR(conditional_entropy(att.joint, {"U"}, {"W", "W_reveal"}), 0.0,
              1e-9);
}

TEST(EfrlConstruct, RegimeErrors) {
  JointDistribution x = uniform_x(2);
  Channel c = bsc(0.25, x.variables()[0]);
  EXPECT_THROW(efrl_construct(x, c, 1.0), RegimeError);   // eps >= H(X)
  EXPECT_THROW(efrl_construct(x, c, -0.1), std::invalid_argument);
  JointDistribution konst({Variable{"X", Alphabet::indexed("X", 1)}}, {1.0});
  Channel c1({konst.variables()[0]}, Variable{"Y", Alphabet::indexed("Y", 2)},
             {0.4, 0.6});
  EXPECT_THROW(efrl_construct(konst, c1, 0.2), RegimeError);  // H(X) = 0
  EXPECT_NO_THROW(efrl_construct(konst, c1, 0.0));
}

TEST(EfrlConstruct, FlagsLeakageAboveSourceInformation) {
  // X ~ uniform, Y nearly independent of X: I(X;Y) tiny, eps above it is
  // accepted but flagged.
  JointDistribution x = uniform_x(2);
  Channel c = bsc(0.49, x.variables()[0]);
  ExtendedDecomposition d = efrl_construct(x, c, 0.5);
  EXPECT_TRUE(d.exceeds_source_mi);
  ExtendedAttachment att = attach_extended(compose(x, c), d);
  EXPECT_NEAR(mutual_information(att.joint, {"U"}, {"X"}), 0.5, 1e-9);
}

TEST(SeedChannel, FoldedRevealMatchesMaterializedCoins) {
  std::mt19937_64 rng(27);
  for (int rep = 0; rep < 10; ++rep) {
    JointDistribution j = random_joint(rng, {{"S", 2}, {"X", 3}, {"T", 3}});
    JointDistribution marg = marginalize(j, {"S"});
    Channel chan = condition(j, "X", {"S"});
    const double eps = 0.3 * entropy(j, {"S"});
    ExtendedDecomposition d = efrl_construct(marg, chan, eps);

    JointDistribution direct = compose(j, detail::seed_channel(d));
    ExtendedAttachment att = attach_extended(j, d);
    JointDistribution staged =
        marginalize(att.joint, {"S", "X", "T", "U"});
    ASSERT_EQ(direct.cell_count(), staged.cell_count());
    for (std::size_t i = 0; i < direct.cell_count(); ++i) {
      EXPECT_NEAR(direct.probs()[i], staged.probs()[i], 1e-14);
    }
  }
}

TEST(MixWithConstant, EndpointsAndValidation) {
  std::mt19937_64 rng(31);
  JointDistribution j = random_joint(rng, {{"U", 3}, {"A", 3}});
  JointDistribution full = mix_with_constant(j, "U", 1.0);
  EXPECT_NEAR(mutual_information(full, {"U'"}, {"A"}),
              mutual_information(j, {"U"}, {"A"}), 1e-12);
  JointDistribution none = mix_with_constant(j, "U", 0.0);
  EXPECT_NEAR(entropy(none, {"U'"}), 0.0, 1e-12);
  EXPECT_NEAR(mutual_information(none, {"U'"}, {"A"}), 0.0, 1e-12);
  EXPECT_THROW(mix_with_constant(j, "U", -0.01), std::invalid_argument);
  EXPECT_THROW(mix_with_constant(j, "U", 1.01), std::invalid_argument);
}

TEST(MixWithConstant, ExactLinearityOnRandomJoints) {
  std::mt19937_64 rng(33);
  for (int rep = 0; rep < 20; ++rep) {
    JointDistribution j = random_joint(rng, {{"U", 3}, {"A", 3}, {"B", 3}});
    const double alpha = 0.4;
    JointDistribution mixed = mix_with_constant(j, "U", alpha);
    for (const std::vector<std::string>& v :
         std::vector<std::vector<std::string>>{{"A"}, {"B"}, {"A", "B"}}) {
      const double lhs = mutual_information(
          mixed, std::vector<std::string>{"U'"}, v);
      const double rhs = alpha * mutual_information(
                                     j, std::vector<std::string>{"U"}, v);
      EXPECT_NEAR(lhs, rhs, 1e-9);
    }
  }
}

TEST(SfrlBound, KnownValuesAndMonotonicity) {
  EXPECT_NEAR(sfrl_bound(0.0), std::log2(5.51) + 1.06, 1e-12);
  EXPECT_NEAR(sfrl_bound(2.49), 4.06, 1e-12);  // log2(8) + 1.06
  double prev = sfrl_bound(0.0);
  for (double i = 0.1; i < 6.0; i += 0.1) {
    double cur = sfrl_bound(i);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
  EXPECT_THROW(sfrl_bound(-0.5), std::invalid_argument);
  EXPECT_NEAR(sfrl_bound(0.0, LogBase::nats), std::log(5.51) + 1.06, 1e-12);
}

TEST(EsfrlBound, EndpointsAndMidpoint) {
  const double h_x = 2.0, h_xy = 1.2, i_xy = 0.8;
  EXPECT_NEAR(esfrl_bound(0.0, h_x, h_xy, i_xy), sfrl_bound(i_xy), 1e-12);
  EXPECT_NEAR(esfrl_bound(h_x * (1.0 - 1e-12), h_x, h_xy, i_xy), h_xy, 1e-6);
  EXPECT_NEAR(esfrl_bound(h_x / 2.0, h_x, h_xy, i_xy),
              0.5 * h_xy + 0.5 * sfrl_bound(i_xy), 1e-12);
  EXPECT_THROW(esfrl_bound(2.5, h_x, h_xy, i_xy), RegimeError);
}

TEST(SfrlCheckOp, DeterministicAndIndependentCasesHold) {
  // Y = X: the seed is constant, I(X;U|Y) = 0.
  JointDistribution x = uniform_x(3);
  std::vector<double> table(9, 0.0);
  for (std::size_t i = 0; i < 3; ++i) table[i * 3 + i] = 1.0;
  Channel ident({x.variables()[0]}, Variable{"Y", Alphabet::indexed("Y", 3)},
                table);
  FrlDecomposition d = frl_construct(x, ident);
  JointDistribution withU = compose(compose(x, ident), posterior_channel(d));
  SfrlCheck chk = sfrl_check(d, withU);
  EXPECT_TRUE(chk.holds);
  EXPECT_NEAR(chk.measured, 0.0, 1e-9);

  // X independent of Y: U carries Y alone, I(X;U|Y) = 0.
  std::vector<double> indep(6);
  for (std::size_t i = 0; i < 3; ++i) {
    indep[i * 2 + 0] = 0.6;
    indep[i * 2 + 1] = 0.4;
  }
  Channel cy({x.variables()[0]}, Variable{"Y", Alphabet::indexed("Y", 2)},
             indep);
  FrlDecomposition d2 = frl_construct(x, cy);
  JointDistribution withU2 = compose(compose(x, cy), posterior_channel(d2));
  SfrlCheck chk2 = sfrl_check(d2, withU2);
  EXPECT_TRUE(chk2.holds);
  EXPECT_NEAR(chk2.measured, 0.0, 1e-9);
}

TEST(SfrlCheckOp, BscMeasurementReported) {
  JointDistribution x = uniform_x(2);
  Channel c = bsc(0.25, x.variables()[0]);
  FrlDecomposition d = frl_construct(x, c);
  JointDistribution withU = compose(compose(x, c), posterior_channel(d));
  SfrlCheck chk = sfrl_check(d, withU);
  EXPECT_GE(chk.measured, 0.0);
  EXPECT_NEAR(chk.ceiling, sfrl_bound(mutual_information(withU, {"X"}, {"Y"})),
              1e-12);
  EXPECT_TRUE(chk.holds);  // seed entropy is tiny next to the ceiling
}

}  // namespace
}  // namespace fairrep
