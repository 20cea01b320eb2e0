#include "fairrep/measures.hpp"

#include <gtest/gtest.h>

#include "fairrep/typewriter.hpp"
#include "test_util.hpp"

namespace fairrep {
namespace {

using testutil::random_joint;

TEST(Entropy, FairCoinIsOneBit) {
  JointDistribution j({Variable{"A", Alphabet::indexed("A", 2)}}, {0.5, 0.5});
  EXPECT_NEAR(entropy(j, {"A"}), 1.0, 1e-15);
  EXPECT_NEAR(entropy(j, {"A"}, LogBase::nats), std::log(2.0), 1e-15);
}

TEST(Entropy, UniformThousandSymbols) {
  std::vector<double> p(1000, 1e-3);
  JointDistribution j({Variable{"T", Alphabet::indexed("T", 1000)}}, p);
  EXPECT_NEAR(entropy(j, {"T"}), std::log2(1000.0), 1e-12);
}

TEST(MutualInformation, IndependentVariablesAreZero) {
  std::mt19937_64 rng(3);
  JointDistribution a = random_joint(rng, {{"A", 3}});
  JointDistribution b = random_joint(rng, {{"B", 3}});
  std::vector<double> cells(9);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      cells[i * 3 + k] = a.probs()[i] * b.probs()[k];
    }
  }
  JointDistribution j({a.variables()[0], b.variables()[0]}, cells);
  EXPECT_NEAR(mutual_information(j, {"A"}, {"B"}), 0.0, 1e-12);
}

TEST(MutualInformation, OverlappingSetsRejected) {
  std::mt19937_64 rng(4);
  JointDistribution j = random_joint(rng, {{"A", 2}, {"B", 2}});
  EXPECT_THROW(mutual_information(j, {"A"}, {"A"}), std::invalid_argument);
  EXPECT_THROW(entropy(j, {"A", "A"}), std::invalid_argument);
}

TEST(Measures, TypewriterConditionalEntropyMatchesClosedForm) {
  const std::size_t n = 1000;
  const double hit = 1.0 / 3.0;
  JointDistribution j = make_typewriter_joint(n, hit);
  // Independent route: H(X|T) = -(hit log hit + (n-1) q log q).
  const double q = (1.0 - hit) / static_cast<double>(n - 1);
  const double expected =
      -(hit * std::log2(hit) + static_cast<double>(n - 1) * q * std::log2(q));
  EXPECT_NEAR(conditional_entropy(j, {"X"}, {"T"}), expected, 1e-9);
  EXPECT_NEAR(expected, 7.5612, 2e-4);
  EXPECT_NEAR(entropy(j, {"T"}), std::log2(1000.0), 1e-9);
}

TEST(Measures, ChainRuleOnRandomJoints) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 25; ++rep) {
    JointDistribution j = random_joint(rng, {{"A", 3}, {"B", 4}, {"C", 2}});
    EXPECT_NEAR(entropy(j, {"A", "B"}),
                entropy(j, {"A"}) + conditional_entropy(j, {"B"}, {"A"}),
                1e-9);
    EXPECT_NEAR(mutual_information(j, {"A"}, {"B"}),
                entropy(j, {"A"}) + entropy(j, {"B"}) - entropy(j, {"A", "B"}),
                1e-9);
    EXPECT_GE(mutual_information(j, {"A"}, {"B", "C"}), -1e-9);
    EXPECT_NEAR(
        conditional_mutual_information(j, {"A"}, {"B"}, {"C"}),
        conditional_entropy(j, {"A"}, {"C"}) +
            conditional_entropy(j, {"B"}, {"C"}) -
            conditional_entropy(j, {"A", "B"}, {"C"}),
        1e-9);
    EXPECT_GE(conditional_mutual_information(j, {"A"}, {"B"}, {"C"}), -1e-9);
  }
}

TEST(Measures, DeterministicFunctionHasZeroConditionalEntropy) {
  // B = A + 1 mod 3.
  std::vector<double> cells(9, 0.0);
  cells[0 * 3 + 1] = 1.0 / 3.0;
  cells[1 * 3 + 2] = 1.0 / 3.0;
  cells[2 * 3 + 0] = 1.0 / 3.0;
  JointDistribution j({Variable{"A", Alphabet::indexed("A", 3)},
                       Variable{"B", Alphabet::indexed("B", 3)}},
                      cells);
  EXPECT_NEAR(conditional_entropy(j, {"B"}, {"A"}), 0.0, 1e-12);
}

TEST(Measures, BaseSwitchScalesByLn2) {
  std::mt19937_64 rng(6);
  JointDistribution j = random_joint(rng, {{"A", 3}, {"B", 3}});
  const double bits = mutual_information(j, {"A"}, {"B"}, LogBase::bits);
  const double nats = mutual_information(j, {"A"}, {"B"}, LogBase::nats);
  EXPECT_NEAR(nats, bits * std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace fairrep
