#pragma once

#include <string>
#include <vector>

#include "fairrep/joint.hpp"

namespace fairrep {

/// Noisy-typewriter trade-off instance: the task T is uniform over
/// {1, ..., n}; the data X echoes T with probability hit_prob and lands on
/// any other symbol uniformly; the sensitive attribute S is the ternary
/// residue class of T (residue 0 -> class 0, residue 1 -> class 1, all
/// other residues -> class 2), so S is a deterministic function of T and
/// the X-marginal is exactly uniform.
inline JointDistribution make_typewriter_joint(std::size_t n,
                                               double hit_prob) {
  if (n < 10) throw std::invalid_argument("typewriter: n >= 10 required");
  if (!(hit_prob > 0.0 && hit_prob < 1.0)) {
    throw std::invalid_argument("typewriter: hit_prob in (0, 1) required");
  }
  std::vector<std::string> symbols(n);
  for (std::size_t i = 0; i < n; ++i) symbols[i] = std::to_string(i + 1);
  Alphabet s_alpha("S", {"0", "1", "2"});
  Alphabet x_alpha("X", symbols);
  Alphabet t_alpha("T", symbols);

  const double pt = 1.0 / static_cast<double>(n);
  const double miss = (1.0 - hit_prob) / static_cast<double>(n - 1);
  std::vector<double> cells(3 * n * n, 0.0);
  for (std::size_t ti = 0; ti < n; ++ti) {
    const std::size_t res = (ti + 1) % 10;
    const std::size_t s = res == 0 ? 0 : (res == 1 ? 1 : 2);
    for (std::size_t xi = 0; xi < n; ++xi) {
      cells[(s * n + xi) * n + ti] = pt * (xi == ti ? hit_prob : miss);
    }
  }
  return JointDistribution({Variable{"S", s_alpha}, Variable{"X", x_alpha},
                            Variable{"T", t_alpha}},
                           std::move(cells));
}

}  // namespace fairrep
