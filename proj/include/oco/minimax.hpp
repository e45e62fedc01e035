#pragma once

#include <cstdint>
#include <vector>

#include "oco/core.hpp"

namespace oco {

// Finite restriction of a game: finite Z, a grid of candidate moves in F and
// the loss table table(z, f).
struct FiniteGame {
  std::vector<Vec> zs;
  std::vector<Vec> grid;
  Mat table;
};

// Game with finite Z restricted to `grid` (every grid point must lie in F).
FiniteGame make_finite_game(const Game& game, const std::vector<Vec>& grid);

// Default grid: the vertices of a polyhedral F, plus `interval_points`
// equispaced points when F is an interval.
FiniteGame make_finite_game(const Game& game, int interval_points = 0);

inline constexpr std::uint64_t kMinimaxBudget = 10'000'000;

// R_T = inf_f1 sup_z1 ... inf_fT sup_zT [sum_t l(z_t, f_t) - inf_f sum_t l(z_t, f)]
// over the grid, by backward induction over count vectors of the played z.
// Throws BudgetError when the node evaluations would exceed `budget`.
double exact_value(const FiniteGame& fg, int horizon, std::uint64_t budget = kMinimaxBudget);

struct TrivialityVerdict {
  bool trivial = false;
  // Dominating move when trivial.
  Vec f_star;
  // Otherwise: a z where the candidate move is beaten, and the better move.
  Vec witness_z;
  Vec improving_f;
  double violation = 0.0;
};

inline constexpr double kDominanceTol = 1e-8;

// Definition of a trivial game: some f* attains min_f l(z, f) for every z in
// the list simultaneously. Polyhedral F with piecewise-linear losses goes
// through a feasibility LP; curved F is supported for the linear loss.
TrivialityVerdict is_trivial(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs);

// Requires a finite opponent set.
TrivialityVerdict is_trivial(const Game& game);

struct WitnessResult {
  bool found = false;
  std::vector<Vec> points;
  // Dominating move of the last (trivial) candidate set when not found.
  Vec f_star;
};

// Accumulates z (probe points, then samples) until the finite subgame is
// non-trivial, then greedily drops points while it stays non-trivial.
WitnessResult finite_witness(const Game& game, int budget = 200, std::uint64_t seed = 0);

}  // namespace oco
