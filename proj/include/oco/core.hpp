#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "oco/geometry.hpp"
#include "oco/losses.hpp"
#include "oco/rng.hpp"
#include "oco/types.hpp"

namespace oco {

struct FinitePoints {
  std::vector<Vec> points;
};

// Euclidean ball; sampled uniformly.
struct BallRegion {
  Vec center;
  double radius = 1.0;
};

struct BoxRegion {
  Vec lo;
  Vec hi;
};

// conv(points); sampled by Dirichlet(1) weights.
struct HullRegion {
  std::vector<Vec> points;
};

using OpponentSet = std::variant<FinitePoints, BallRegion, BoxRegion, HullRegion>;

int dimension(const OpponentSet& zset);
bool is_finite(const OpponentSet& zset);
std::string kind_name(const OpponentSet& zset);

// Random element of Z. For finite sets, uniform over the listed points.
Vec sample_opponent(const OpponentSet& zset, Rng& rng);

// Deterministic probe points: the finite list itself, or for regions a set of
// extreme points. Balls list centre +- radius along directions orthogonal to
// the centre first, then along the centre direction.
std::vector<Vec> probe_points(const OpponentSet& zset);

bool contains(const OpponentSet& zset, const Vec& z, double tol = kMembershipTol);

struct GameOptions {
  int probe_samples = 256;
  double bound_threshold = 1e12;
  std::uint64_t probe_seed = 0;
};

// Validated, immutable game triple (loss, Z, F).
class Game {
 public:
  const LossFunction& loss() const { return *loss_; }
  const OpponentSet& opponents() const { return *opponents_; }
  const DecisionSet& player_set() const { return *player_set_; }
  int dim_z() const { return dim_z_; }
  int dim_f() const { return dim_f_; }

  // Unchecked l(z, f).
  double evaluate(const Vec& z, const Vec& f) const { return oco::evaluate(*loss_, z, f); }

 private:
  friend Game make_game(LossFunction, OpponentSet, DecisionSet, const GameOptions&);
  std::shared_ptr<const LossFunction> loss_;
  std::shared_ptr<const OpponentSet> opponents_;
  std::shared_ptr<const DecisionSet> player_set_;
  int dim_z_ = 0;
  int dim_f_ = 0;
};

// Throws ValidationError on dimension mismatch, empty Z, invalid sets, or a
// loss that is non-finite or exceeds the threshold on the probe sample.
Game make_game(LossFunction loss, OpponentSet opponents, DecisionSet player_set, const GameOptions& options = {});

// Checked l(z, f): z must be finite with the right dimension and f must lie in F.
double eval_loss(const Game& game, const Vec& z, const Vec& f);

struct RegretTrace {
  int horizon = 0;
  std::vector<Vec> player_moves;
  std::vector<Vec> opponent_moves;
  std::vector<double> per_round_loss;
  double cumulative_loss = 0.0;
  double benchmark_value = 0.0;
  Vec benchmark_point;
  double regret = 0.0;
};

}  // namespace oco
