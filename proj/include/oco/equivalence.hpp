#pragma once

#include <vector>

#include "oco/core.hpp"

namespace oco {

struct ClassWitness {
  int class_a = 0;
  int class_b = 0;
  Vec z;
};

struct EquivalencePartition {
  std::vector<Vec> representatives;
  // class_of[i] indexes `representatives` for input point i.
  std::vector<int> class_of;
  // One z separating each pair of distinct classes (a < b).
  std::vector<ClassWitness> witnesses;

  int num_classes() const { return static_cast<int>(representatives.size()); }
};

inline constexpr double kClassTol = 1e-7;

// Partition of `points` under f_a ~ f_b iff l(z, f_a) = l(z, f_b) for all z in Z.
// Finite Z is checked exhaustively; continuous Z is supported for the linear
// loss only, through the orthonormal basis of span(Z). Other combinations
// throw UnsupportedError (reduce Z with finite_witness first).
EquivalencePartition equivalence_classes(const std::vector<Vec>& points, const Game& game, double tol = kClassTol);

}  // namespace oco
