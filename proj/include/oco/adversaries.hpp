#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oco/core.hpp"

namespace oco {

// Opponent strategy. begin() starts a game of the given horizon; next() draws
// z_t from the adversary's own state and the run's random stream.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual void begin(int horizon) = 0;
  virtual Vec next(const Game& game, Rng& rng) = 0;
  virtual std::unique_ptr<Adversary> clone() const = 0;
  virtual std::string name() const = 0;
};

// Draw from the distribution p over `points` (inverse CDF on one uniform).
// Throws ValidationError unless p is a probability vector within 1e-9.
Vec iid_step(const std::vector<Vec>& points, const std::vector<double>& p, Rng& rng);

struct EqualizerConfig {
  Vec z;
  Vec e;
  double eps = 0.0;
  Vec f1;
  Vec f2;
};

// z +- eps e in Z, unit e, f1 and f2 both minimize z.f over F with f1.e != f2.e.
// Linear loss only. Throws ValidationError naming the violated condition.
void validate_equalizer(const EqualizerConfig& cfg, const Game& game);

// Builds a configuration for a simplex or box F against a box Z: an edge
// [f1, f2] of F and the z in Z for which the whole edge is optimal.
EqualizerConfig synthesize_equalizer(const Game& game, double eps);

// z + sigma eps e with sigma a fair coin.
Vec equalizer_step(const EqualizerConfig& cfg, Rng& rng);

struct CtAdversaryState {
  int horizon = 0;
  std::vector<double> c;  // c[t-1] = c_t
  int round = 0;          // rounds already played
  long long running_sum = 0;
  Vec z_star;
  double alpha = 0.0;
  Vec e;
};

// c_T = 1/T, c_{t-1} = c_t + c_t^2.
std::vector<double> ct_sequence(int horizon);

// Throws ValidationError unless ||e|| = 1, e.z* = 0 (within 1e-9) and alpha in (0, 1/32].
CtAdversaryState make_ct_adversary(int horizon, const Vec& z_star, double alpha, const Vec& e);

// P(W_t = +1) = (1 + c_t W_{1:t-1}) / 2; emits z* + W_t alpha ||z*|| e.
// Returns W_t through `sign` when non-null. Throws Error past the horizon.
Vec ct_step(CtAdversaryState& state, Rng& rng, int* sign = nullptr);

struct CriticalAlpha {
  double alpha = 0.0;
  std::vector<double> p;
  Vec f_a;
  Vec f_b;
  // Witness z index and epsilon used for p_1 (k = -1 when p_1 was supplied).
  int k = -1;
  double eps = 0.0;
};

// Mixes p_0 (uniform on Z) and p_1 (mass 1 - (N-1) eps on a witness z_k,
// eps elsewhere, eps halved from (N-1) eps = 1/2 until f* is strictly beaten)
// and bisects alpha for the point where two loss-equivalence classes are
// jointly optimal under p_alpha = (1 - alpha) p_0 + alpha p_1.
// Requires finite Z, polyhedral F and a piecewise-linear loss; throws
// ValidationError for trivial games and Error when the breakpoint cannot be certified.
CriticalAlpha critical_alpha(const Game& game, const std::optional<std::vector<double>>& p1 = std::nullopt);

struct MixtureCertificate {
  bool pass = false;
  double value = 0.0;
  double gap_a = 0.0;
  double gap_b = 0.0;
  std::string detail;
};

// E_p l(Z, f1) = E_p l(Z, f2) = min_f E_p l(Z, f) within 1e-6, and the two
// losses differ at some z in the support of p.
MixtureCertificate mixture_certificate(const Game& game, const std::vector<double>& p, const Vec& f1, const Vec& f2);

class IidFiniteAdversary final : public Adversary {
 public:
  IidFiniteAdversary(std::vector<Vec> points, std::vector<double> p);
  void begin(int) override {}
  Vec next(const Game&, Rng& rng) override { return iid_step(points_, p_, rng); }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<IidFiniteAdversary>(*this); }
  std::string name() const override { return "iid_finite"; }

 private:
  std::vector<Vec> points_;
  std::vector<double> p_;
};

// Uniform draws from a region (ball, box or hull sampler).
class IidRegionAdversary final : public Adversary {
 public:
  explicit IidRegionAdversary(OpponentSet region) : region_(std::move(region)) {}
  void begin(int) override {}
  Vec next(const Game&, Rng& rng) override { return sample_opponent(region_, rng); }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<IidRegionAdversary>(*this); }
  std::string name() const override { return "iid_region"; }

 private:
  OpponentSet region_;
};

// Uniform on the sphere {z : ||z - center|| = radius}.
class IidSphereAdversary final : public Adversary {
 public:
  IidSphereAdversary(Vec center, double radius) : center_(std::move(center)), radius_(radius) {}
  void begin(int) override {}
  Vec next(const Game&, Rng& rng) override;
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<IidSphereAdversary>(*this); }
  std::string name() const override { return "iid_sphere"; }

 private:
  Vec center_;
  double radius_;
};

// z = (a + b)/2 + w (b - a)/2 with w uniform on [-1, 1].
class SegmentAdversary final : public Adversary {
 public:
  SegmentAdversary(Vec a, Vec b) : mid_(0.5 * (a + b)), half_(0.5 * (b - a)) {}
  void begin(int) override {}
  Vec next(const Game&, Rng& rng) override { return mid_ + (2.0 * rng.uniform() - 1.0) * half_; }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<SegmentAdversary>(*this); }
  std::string name() const override { return "segment"; }

 private:
  Vec mid_;
  Vec half_;
};

class EqualizerAdversary final : public Adversary {
 public:
  explicit EqualizerAdversary(EqualizerConfig cfg) : cfg_(std::move(cfg)) {}
  void begin(int) override {}
  Vec next(const Game&, Rng& rng) override { return equalizer_step(cfg_, rng); }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<EqualizerAdversary>(*this); }
  std::string name() const override { return "equalizer"; }
  const EqualizerConfig& config() const { return cfg_; }

 private:
  EqualizerConfig cfg_;
};

class CtAdversary final : public Adversary {
 public:
  CtAdversary(Vec z_star, double alpha, Vec e);
  void begin(int horizon) override { state_ = make_ct_adversary(horizon, z_star_, alpha_, e_); }
  Vec next(const Game&, Rng& rng) override { return ct_step(state_, rng); }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<CtAdversary>(*this); }
  std::string name() const override { return "ct"; }
  const CtAdversaryState& state() const { return state_; }

 private:
  Vec z_star_;
  double alpha_;
  Vec e_;
  CtAdversaryState state_;
};

// Replays a fixed sequence, cycling when the horizon exceeds its length.
class FixedAdversary final : public Adversary {
 public:
  explicit FixedAdversary(std::vector<Vec> sequence);
  void begin(int) override { round_ = 0; }
  Vec next(const Game&, Rng&) override { return sequence_[round_++ % sequence_.size()]; }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<FixedAdversary>(*this); }
  std::string name() const override { return "fixed"; }

 private:
  std::vector<Vec> sequence_;
  std::size_t round_ = 0;
};

}  // namespace oco
