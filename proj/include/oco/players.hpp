#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "oco/core.hpp"

namespace oco {

// Full-information online player: act() returns f_t, observe() reveals z_t.
class Player {
 public:
  virtual ~Player() = default;
  // Forget all history before a new game.
  virtual void reset() = 0;
  virtual Vec act(const Game& game) = 0;
  virtual void observe(const Game& game, const Vec& f, const Vec& z) = 0;
  virtual std::unique_ptr<Player> clone() const = 0;
  virtual std::string name() const = 0;
};

// Sufficient statistic of the opponent history for FTL: the running sum of z
// (enough for the linear loss) and the multiset of z as distinct points with counts.
struct FtlState {
  int rounds = 0;
  Vec sum;
  std::vector<Vec> points;
  std::vector<double> counts;
  std::map<std::vector<double>, std::size_t> index;

  void add(const Vec& z);
};

// f_t in argmin_f sum_{tau < t} l(z_tau, f); the set's default point at t = 1.
Vec ftl_step(const FtlState& state, const Game& game);

// Proj_F(f - eta g).
Vec ogd_step(const DecisionSet& set, const Vec& f, const Vec& g, double eta);

// w_i <- w_i exp(-eta loss_i), normalized. Throws ValidationError on non-finite losses.
Vec expw_step(const Vec& weights, const Vec& losses, double eta);

class FtlPlayer final : public Player {
 public:
  void reset() override { state_ = FtlState{}; }
  Vec act(const Game& game) override { return ftl_step(state_, game); }
  void observe(const Game&, const Vec&, const Vec& z) override { state_.add(z); }
  std::unique_ptr<Player> clone() const override { return std::make_unique<FtlPlayer>(*this); }
  std::string name() const override { return "ftl"; }
  const FtlState& state() const { return state_; }

 private:
  FtlState state_;
};

// Online gradient descent with eta_t = eta0 / sqrt(t). eta0 <= 0 selects
// D / G with D the diameter of F and G the configured gradient bound.
class OgdPlayer final : public Player {
 public:
  explicit OgdPlayer(double eta0 = 0.0, double gradient_bound = 1.0) : eta0_(eta0), gradient_bound_(gradient_bound) {}
  void reset() override {
    current_.resize(0);
    rounds_ = 0;
  }
  Vec act(const Game& game) override;
  void observe(const Game& game, const Vec& f, const Vec& z) override;
  std::unique_ptr<Player> clone() const override { return std::make_unique<OgdPlayer>(*this); }
  std::string name() const override { return "ogd"; }

 private:
  double eta0_;
  double gradient_bound_;
  Vec current_;
  int rounds_ = 0;
};

// Exponential weights over the vertices of a polyhedral F; plays the mean point.
class ExpWeightsPlayer final : public Player {
 public:
  explicit ExpWeightsPlayer(double eta) : eta_(eta) {}
  void reset() override {
    vertices_.clear();
    weights_.resize(0);
  }
  Vec act(const Game& game) override;
  void observe(const Game& game, const Vec& f, const Vec& z) override;
  std::unique_ptr<Player> clone() const override { return std::make_unique<ExpWeightsPlayer>(*this); }
  std::string name() const override { return "exp_weights"; }
  const Vec& weights() const { return weights_; }

 private:
  void ensure_init(const Game& game);
  double eta_;
  std::vector<Vec> vertices_;
  Vec weights_;
};

class ConstantPlayer final : public Player {
 public:
  explicit ConstantPlayer(Vec point) : point_(std::move(point)) {}
  void reset() override {}
  Vec act(const Game&) override { return point_; }
  void observe(const Game&, const Vec&, const Vec&) override {}
  std::unique_ptr<Player> clone() const override { return std::make_unique<ConstantPlayer>(*this); }
  std::string name() const override { return "constant"; }

 private:
  Vec point_;
};

}  // namespace oco
