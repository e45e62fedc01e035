#include <cmath>
#include <numbers>

#include "oco/geometry.hpp"

namespace oco {
namespace {

constexpr int kRefineSweeps = 50;
constexpr int kBisectionSteps = 50;

// Boundary pair of the unit ball of the p-norm, parametrised by (u, w) in
// R^(2d): f = u / ||u||_p, g on the arc from f towards -f through the
// direction of w, placed at distance eps from f.
class PairObjective {
 public:
  PairObjective(double p, double eps, int dim) : p_(p), eps_(eps), dim_(dim) {}

  double operator()(const Vec& params) const {
    const Vec u = params.head(dim_);
    const Vec w = params.tail(dim_);
    const double un = u.norm();
    if (un < 1e-12) return kInf;
    const Vec h = u / un;
    Vec ortho = w - w.dot(h) * h;
    const double on = ortho.norm();
    if (on < 1e-12) return kInf;
    ortho /= on;
    const Vec f = h / lp_norm(h, p_);
    auto point = [&](double theta) {
      const Vec v = std::cos(theta) * h + std::sin(theta) * ortho;
      return Vec(v / lp_norm(v, p_));
    };
    double lo = 0.0;
    double hi = std::numbers::pi;
    for (int i = 0; i < kBisectionSteps; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (lp_norm(f - point(mid), p_) >= eps_) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const Vec g = point(hi);
    return 1.0 - lp_norm(0.5 * (f + g), p_);
  }

 private:
  double p_;
  double eps_;
  Eigen::Index dim_;
};

double refine(const PairObjective& objective, Vec params) {
  double best = objective(params);
  double step = 0.25;
  for (int sweep = 0; sweep < kRefineSweeps; ++sweep) {
    bool improved = false;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      for (const double sign : {1.0, -1.0}) {
        Vec trial = params;
        trial(i) += sign * step;
        const double value = objective(trial);
        if (value < best) {
          best = value;
          params = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

double modulus_of_convexity(const DecisionSet& set, double eps, int budget, std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 2.0)) throw ValidationError("modulus_of_convexity: eps must lie in (0, 2]");
  if (budget < 1) throw ValidationError("modulus_of_convexity: budget must be positive");
  double p = 2.0;
  int dim = 0;
  if (const auto* b = std::get_if<L2Ball>(&set)) {
    dim = static_cast<int>(b->center.size());
  } else if (const auto* b = std::get_if<LpBall>(&set)) {
    p = b->p;
    dim = b->dim;
  } else {
    throw UnsupportedError("modulus_of_convexity: requires an l2_ball or lp_ball, got " + kind_name(set));
  }
  if (dim < 2) throw UnsupportedError("modulus_of_convexity: unit ball must have dimension >= 2");
  const PairObjective objective(p, eps, dim);
  double best = kInf;
  for (int i = 0; i < budget; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Vec params(2 * dim);
    for (auto& x : params) x = rng.normal();
    best = std::min(best, refine(objective, params));
  }
  return std::max(best, 0.0);
}

}  // namespace oco
