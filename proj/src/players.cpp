#include "oco/players.hpp"

#include <cmath>

#include "oco/epigraph.hpp"

namespace oco {

void FtlState::add(const Vec& z) {
  if (rounds == 0) sum = Vec::Zero(z.size());
  ++rounds;
  sum += z;
  std::vector<double> key(z.data(), z.data() + z.size());
  auto [it, inserted] = index.emplace(std::move(key), points.size());
  if (inserted) {
    points.push_back(z);
    counts.push_back(1.0);
  } else {
    counts[it->second] += 1.0;
  }
}

Vec ftl_step(const FtlState& state, const Game& game) {
  if (state.rounds == 0) return default_point(game.player_set());
  if (std::holds_alternative<LinearLoss>(game.loss())) return linmin(game.player_set(), state.sum).point;
  return minimize_weighted(game.loss(), game.player_set(), state.points, state.counts).point;
}

Vec ogd_step(const DecisionSet& set, const Vec& f, const Vec& g, double eta) { return project(set, f - eta * g); }

Vec expw_step(const Vec& weights, const Vec& losses, double eta) {
  if (weights.size() != losses.size()) throw ValidationError("expw_step: weights and losses differ in length");
  if (!losses.allFinite()) throw ValidationError("expw_step: non-finite loss");
  // Shift by the minimum loss for stability; normalization removes it.
  const double shift = losses.minCoeff();
  Vec w(weights.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = weights(i) * std::exp(-eta * (losses(i) - shift));
  return w / w.sum();
}

Vec OgdPlayer::act(const Game& game) {
  if (current_.size() == 0) current_ = default_point(game.player_set());
  return current_;
}

void OgdPlayer::observe(const Game& game, const Vec& f, const Vec& z) {
  ++rounds_;
  double eta0 = eta0_;
  if (eta0 <= 0.0) eta0 = diameter(game.player_set()) / gradient_bound_;
  const Vec g = subgradient(game.loss(), z, f);
  current_ = ogd_step(game.player_set(), f, g, eta0 / std::sqrt(static_cast<double>(rounds_)));
}

void ExpWeightsPlayer::ensure_init(const Game& game) {
  if (!vertices_.empty()) return;
  vertices_ = vertices(game.player_set());
  const auto k = static_cast<Eigen::Index>(vertices_.size());
  weights_ = Vec::Constant(k, 1.0 / static_cast<double>(k));
}

Vec ExpWeightsPlayer::act(const Game& game) {
  ensure_init(game);
  Vec f = Vec::Zero(game.dim_f());
  for (std::size_t i = 0; i < vertices_.size(); ++i) f += weights_(static_cast<Eigen::Index>(i)) * vertices_[i];
  return f;
}

void ExpWeightsPlayer::observe(const Game& game, const Vec&, const Vec& z) {
  ensure_init(game);
  Vec losses(static_cast<Eigen::Index>(vertices_.size()));
  for (std::size_t i = 0; i < vertices_.size(); ++i) losses(static_cast<Eigen::Index>(i)) = game.evaluate(z, vertices_[i]);
  weights_ = expw_step(weights_, losses, eta_);
}

}  // namespace oco
