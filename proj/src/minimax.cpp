#include "oco/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "oco/epigraph.hpp"

namespace oco {
namespace {

const std::vector<Vec>& finite_points(const Game& game, const char* where) {
  if (!is_finite(game.opponents())) {
    throw UnsupportedError(std::string(where) + ": requires a finite opponent set, got " + kind_name(game.opponents()));
  }
  return std::get<FinitePoints>(game.opponents()).points;
}

class BackwardInduction {
 public:
  BackwardInduction(const FiniteGame& fg, int horizon, std::uint64_t budget)
      : fg_(fg), horizon_(horizon), budget_(budget) {}

  double value() {
    std::vector<int> counts(fg_.zs.size(), 0);
    return solve(counts, 0);
  }

 private:
  void charge(std::uint64_t work) {
    spent_ += work;
    if (spent_ > budget_) {
      throw BudgetError("exact_value: more than " + std::to_string(budget_) + " node evaluations; reduce T, |Z| or the grid");
    }
  }

  double solve(std::vector<int>& counts, int depth) {
    if (auto it = memo_.find(counts); it != memo_.end()) return it->second;
    const auto nz = static_cast<Eigen::Index>(fg_.zs.size());
    const auto nf = static_cast<Eigen::Index>(fg_.grid.size());
    charge(static_cast<std::uint64_t>(nz * nf));
    double result;
    if (depth == horizon_) {
      double best = kInf;
      for (Eigen::Index f = 0; f < nf; ++f) {
        double total = 0.0;
        for (Eigen::Index z = 0; z < nz; ++z) total += counts[static_cast<std::size_t>(z)] * fg_.table(z, f);
        best = std::min(best, total);
      }
      result = -best;
    } else {
      Vec child(nz);
      for (Eigen::Index z = 0; z < nz; ++z) {
        ++counts[static_cast<std::size_t>(z)];
        child(z) = solve(counts, depth + 1);
        --counts[static_cast<std::size_t>(z)];
      }
      result = kInf;
      for (Eigen::Index f = 0; f < nf; ++f) {
        double worst = -kInf;
        for (Eigen::Index z = 0; z < nz; ++z) worst = std::max(worst, fg_.table(z, f) + child(z));
        result = std::min(result, worst);
      }
    }
    memo_.emplace(counts, result);
    return result;
  }

  const FiniteGame& fg_;
  int horizon_;
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
  std::map<std::vector<int>, double> memo_;
};

bool curved(const DecisionSet& set) { return !is_polyhedral(set); }

TrivialityVerdict curved_linear(const DecisionSet& set, const std::vector<Vec>& zs) {
  // Only z = 0 leaves the argmin ambiguous; any other z pins the candidate.
  Vec candidate = default_point(set);
  for (const auto& z : zs) {
    if (!z.isZero(0.0)) {
      candidate = linmin(set, z).point;
      break;
    }
  }
  for (const auto& z : zs) {
    const auto best = linmin(set, z);
    const double excess = z.dot(candidate) - best.value;
    if (excess > kDominanceTol) return {false, Vec(), z, best.point, excess};
  }
  return {true, candidate, Vec(), Vec(), 0.0};
}

}  // namespace

FiniteGame make_finite_game(const Game& game, const std::vector<Vec>& grid) {
  const auto& zs = finite_points(game, "make_finite_game");
  if (grid.empty()) throw ValidationError("make_finite_game: grid is empty");
  for (const auto& f : grid) {
    if (!contains(game.player_set(), f)) throw ValidationError("make_finite_game: grid point outside F");
  }
  FiniteGame fg{zs, grid, Mat(static_cast<Eigen::Index>(zs.size()), static_cast<Eigen::Index>(grid.size()))};
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      fg.table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = game.evaluate(zs[i], grid[j]);
    }
  }
  if (!fg.table.allFinite()) throw ValidationError("make_finite_game: loss table is not finite");
  return fg;
}

FiniteGame make_finite_game(const Game& game, int interval_points) {
  std::vector<Vec> grid = vertices(game.player_set());
  if (const auto* s = std::get_if<Interval>(&game.player_set()); s != nullptr && interval_points >= 2) {
    grid.clear();
    for (int i = 0; i < interval_points; ++i) {
      const double t = static_cast<double>(i) / (interval_points - 1);
      grid.push_back(Vec::Constant(1, i == interval_points - 1 ? s->hi : s->lo + t * (s->hi - s->lo)));
    }
  }
  return make_finite_game(game, grid);
}

double exact_value(const FiniteGame& fg, int horizon, std::uint64_t budget) {
  if (horizon < 0) throw ValidationError("exact_value: horizon must be >= 0");
  if (fg.zs.empty() || fg.grid.empty()) throw ValidationError("exact_value: empty Z or grid");
  if (fg.table.rows() != static_cast<Eigen::Index>(fg.zs.size()) ||
      fg.table.cols() != static_cast<Eigen::Index>(fg.grid.size())) {
    throw ValidationError("exact_value: loss table shape does not match Z and the grid");
  }
  if (horizon == 0) return 0.0;
  return BackwardInduction(fg, horizon, budget).value();
}

TrivialityVerdict is_trivial(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs) {
  if (zs.empty()) throw ValidationError("is_trivial: empty opponent list");
  if (curved(set)) {
    if (!std::holds_alternative<LinearLoss>(loss)) {
      throw UnsupportedError("is_trivial: " + loss_name(loss) + " loss over curved set " + kind_name(set));
    }
    return curved_linear(set, zs);
  }
  if (!affine_pieces(loss, zs.front())) throw UnsupportedError("is_trivial: unsupported loss variant " + loss_name(loss));

  std::vector<Minimizer> minima;
  std::vector<double> bounds;
  for (const auto& z : zs) {
    minima.push_back(minimize_weighted(loss, set, {z}, {1.0}));
    bounds.push_back(minima.back().value + kDominanceTol);
  }
  // A per-z minimizer that dominates everywhere is the preferred (exact) certificate.
  for (const auto& candidate : minima) {
    bool dominates = true;
    for (std::size_t i = 0; i < zs.size() && dominates; ++i) dominates = evaluate(loss, zs[i], candidate.point) <= bounds[i];
    if (dominates) return {true, candidate.point, Vec(), Vec(), 0.0};
  }
  if (auto f = find_dominating(loss, set, zs, bounds)) return {true, *f, Vec(), Vec(), 0.0};

  // Non-trivial: report the first z beaten by the argmin of the first z, or
  // by the first candidate argmin that is beaten anywhere.
  for (const auto& candidate : minima) {
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const double excess = evaluate(loss, zs[i], candidate.point) - minima[i].value;
      if (excess > kDominanceTol) return {false, Vec(), zs[i], minima[i].point, excess};
    }
  }
  throw Error("is_trivial: dominance LP infeasible but every per-z minimizer dominates (numerical breakdown)");
}

TrivialityVerdict is_trivial(const Game& game) {
  return is_trivial(game.loss(), game.player_set(), finite_points(game, "is_trivial"));
}

WitnessResult finite_witness(const Game& game, int budget, std::uint64_t seed) {
  if (budget < 1) throw ValidationError("finite_witness: budget must be positive");
  std::vector<Vec> candidates = probe_points(game.opponents());
  const bool finite = is_finite(game.opponents());
  Rng rng(seed);
  std::vector<Vec> chosen;
  WitnessResult result;
  for (int i = 0; i < budget; ++i) {
    Vec z;
    if (i < static_cast<int>(candidates.size())) {
      z = candidates[static_cast<std::size_t>(i)];
    } else if (finite) {
      break;
    } else {
      z = sample_opponent(game.opponents(), rng);
    }
    const bool seen = std::any_of(chosen.begin(), chosen.end(), [&](const Vec& c) { return (c - z).norm() <= 1e-12; });
    if (seen) continue;
    chosen.push_back(z);
    const auto verdict = is_trivial(game.loss(), game.player_set(), chosen);
    if (verdict.trivial) {
      result.f_star = verdict.f_star;
      continue;
    }
    for (std::size_t j = 0; j < chosen.size() && chosen.size() > 1;) {
      std::vector<Vec> reduced = chosen;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(j));
      if (!is_trivial(game.loss(), game.player_set(), reduced).trivial) {
        chosen = std::move(reduced);
      } else {
        ++j;
      }
    }
    result.found = true;
    result.points = std::move(chosen);
    result.f_star.resize(0);
    return result;
  }
  return result;
}

}  // namespace oco
