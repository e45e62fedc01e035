#include "oco/core.hpp"

#include <cmath>
#include <sstream>

namespace oco {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void validate_opponents(const OpponentSet& zset) {
  std::visit(Overloaded{
                 [](const FinitePoints& s) {
                   require(!s.points.empty(), "opponent set is empty");
                   for (const auto& p : s.points) {
                     require(p.size() == s.points.front().size() && p.size() > 0, "opponent points have mixed dimensions");
                     require(p.allFinite(), "opponent point is not finite");
                   }
                 },
                 [](const BallRegion& s) {
                   require(s.center.size() > 0 && s.center.allFinite(), "opponent ball: centre must be finite");
                   require(std::isfinite(s.radius) && s.radius >= 0.0, "opponent ball: radius must be >= 0");
                 },
                 [](const BoxRegion& s) {
                   require(s.lo.size() > 0 && s.lo.size() == s.hi.size(), "opponent box: lo and hi must match");
                   require(s.lo.allFinite() && s.hi.allFinite(), "opponent box: bounds must be finite");
                   require((s.lo.array() <= s.hi.array()).all(), "opponent box: lo must not exceed hi");
                 },
                 [](const HullRegion& s) {
                   require(!s.points.empty(), "opponent hull: needs at least one point");
                   for (const auto& p : s.points) {
                     require(p.size() == s.points.front().size() && p.size() > 0, "opponent hull: mixed dimensions");
                     require(p.allFinite(), "opponent hull: point is not finite");
                   }
                 },
             },
             zset);
}

}  // namespace

int dimension(const OpponentSet& zset) {
  return std::visit(Overloaded{
                        [](const FinitePoints& s) { return s.points.empty() ? 0 : static_cast<int>(s.points[0].size()); },
                        [](const BallRegion& s) { return static_cast<int>(s.center.size()); },
                        [](const BoxRegion& s) { return static_cast<int>(s.lo.size()); },
                        [](const HullRegion& s) { return s.points.empty() ? 0 : static_cast<int>(s.points[0].size()); },
                    },
                    zset);
}

bool is_finite(const OpponentSet& zset) { return std::holds_alternative<FinitePoints>(zset); }

std::string kind_name(const OpponentSet& zset) {
  static const char* const names[] = {"finite", "ball", "box", "hull"};
  return names[zset.index()];
}

Vec sample_opponent(const OpponentSet& zset, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const FinitePoints& s) { return s.points[rng.index(s.points.size())]; },
                        [&](const BallRegion& s) {
                          return sample_point(DecisionSet{L2Ball{s.center, s.radius}}, rng);
                        },
                        [&](const BoxRegion& s) { return sample_point(DecisionSet{Box{s.lo, s.hi}}, rng); },
                        [&](const HullRegion& s) { return sample_point(DecisionSet{VertexPolytope{s.points}}, rng); },
                    },
                    zset);
}

std::vector<Vec> probe_points(const OpponentSet& zset) {
  return std::visit(Overloaded{
                        [](const FinitePoints& s) { return s.points; },
                        [](const BallRegion& s) {
                          const auto d = s.center.size();
                          const double cn = s.center.norm();
                          std::vector<Vec> seeds;
                          for (Eigen::Index i = 0; i < d; ++i) seeds.push_back(Vec::Unit(d, i));
                          Mat basis = cn > 0.0 ? span_basis({s.center}) : Mat(d, 0);
                          std::vector<Vec> ortho;
                          for (const auto& e : seeds) {
                            Vec r = e;
                            for (Eigen::Index j = 0; j < basis.cols(); ++j) r -= basis.col(j).dot(r) * basis.col(j);
                            for (const auto& q : ortho) r -= q.dot(r) * q;
                            if (r.norm() > 1e-10) ortho.push_back(r / r.norm());
                          }
                          if (cn > 0.0) ortho.push_back(s.center / cn);
                          std::vector<Vec> out;
                          for (const auto& u : ortho) {
                            out.push_back(s.center + s.radius * u);
                            out.push_back(s.center - s.radius * u);
                          }
                          return out;
                        },
                        [](const BoxRegion& s) { return vertices(DecisionSet{Box{s.lo, s.hi}}); },
                        [](const HullRegion& s) { return s.points; },
                    },
                    zset);
}

bool contains(const OpponentSet& zset, const Vec& z, double tol) {
  if (z.size() != dimension(zset) || !z.allFinite()) return false;
  return std::visit(Overloaded{
                        [&](const FinitePoints& s) {
                          for (const auto& p : s.points) {
                            if ((p - z).norm() <= tol) return true;
                          }
                          return false;
                        },
                        [&](const BallRegion& s) { return contains(DecisionSet{L2Ball{s.center, s.radius}}, z, tol); },
                        [&](const BoxRegion& s) { return contains(DecisionSet{Box{s.lo, s.hi}}, z, tol); },
                        [&](const HullRegion& s) { return contains(DecisionSet{VertexPolytope{s.points}}, z, tol); },
                    },
                    zset);
}

Game make_game(LossFunction loss, OpponentSet opponents, DecisionSet player_set, const GameOptions& options) {
  validate(loss);
  validate_opponents(opponents);
  validate(player_set);
  const auto [dz, df] = loss_dims(loss);
  const int zdim = dimension(opponents);
  const int fdim = dimension(player_set);
  if (dz != zdim) {
    throw ValidationError("make_game: " + loss_name(loss) + " expects z of dimension " + std::to_string(dz) +
                          ", opponent set has dimension " + std::to_string(zdim));
  }
  if (df != fdim) {
    throw ValidationError("make_game: " + loss_name(loss) + " expects f of dimension " + std::to_string(df) +
                          ", player set has dimension " + std::to_string(fdim));
  }

  Game game;
  game.loss_ = std::make_shared<const LossFunction>(std::move(loss));
  game.opponents_ = std::make_shared<const OpponentSet>(std::move(opponents));
  game.player_set_ = std::make_shared<const DecisionSet>(std::move(player_set));
  game.dim_z_ = dz;
  game.dim_f_ = df;

  // Boundedness probe: deterministic points first, then random pairs.
  Rng rng(options.probe_seed);
  std::vector<Vec> zs = probe_points(game.opponents());
  std::vector<Vec> fs;
  if (is_polyhedral(game.player_set())) fs = vertices(game.player_set());
  fs.push_back(default_point(game.player_set()));
  for (int i = 0; i < options.probe_samples; ++i) {
    const Vec z = i < static_cast<int>(zs.size()) ? zs[static_cast<std::size_t>(i)] : sample_opponent(game.opponents(), rng);
    const Vec f = i < static_cast<int>(fs.size()) ? fs[static_cast<std::size_t>(i)] : sample_point(game.player_set(), rng);
    double value = 0.0;
    try {
      value = game.evaluate(z, f);
    } catch (const InfeasibleError& e) {
      throw ValidationError(std::string("make_game: loss undefined on the probe sample: ") + e.what());
    }
    if (!std::isfinite(value) || std::abs(value) > options.bound_threshold) {
      std::ostringstream msg;
      msg << "make_game: loss " << value << " at probe " << i << " exceeds the boundedness threshold "
          << options.bound_threshold;
      throw ValidationError(msg.str());
    }
  }
  return game;
}

double eval_loss(const Game& game, const Vec& z, const Vec& f) {
  if (z.size() != game.dim_z() || !z.allFinite()) {
    throw ValidationError("eval_loss: malformed z (dimension " + std::to_string(z.size()) + ", expected " +
                          std::to_string(game.dim_z()) + ")");
  }
  if (!contains(game.player_set(), f)) {
    std::ostringstream msg;
    msg << "eval_loss: f = (" << f.transpose() << ") is outside " << kind_name(game.player_set());
    throw ValidationError(msg.str());
  }
  const double value = game.evaluate(z, f);
  if (!std::isfinite(value)) throw ValidationError("eval_loss: non-finite loss");
  return value;
}

}  // namespace oco
