#include <algorithm>
#include <functional>

#include <gtest/gtest.h>

#include "oco/harness.hpp"
#include "oco/minimax.hpp"

using namespace oco;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

std::vector<Vec> scalars(std::initializer_list<double> xs) {
  std::vector<Vec> out;
  for (double x : xs) out.push_back(vec({x}));
  return out;
}

Game pm1_game() { return make_game(LinearLoss{1}, FinitePoints{scalars({-1, 1})}, Interval{-1, 1}); }

// Plain recursion over full histories: inf_f sup_z [l(z, f) + V(h + z)],
// with V at the horizon equal to minus the best grid benchmark.
double brute_value(const Game& g, const std::vector<Vec>& zs, const std::vector<Vec>& grid, int T) {
  std::vector<int> hist;
  std::function<double()> rec = [&]() -> double {
    if (static_cast<int>(hist.size()) == T) {
      double best = kInf;
      for (const auto& f : grid) {
        double s = 0.0;
        for (const int i : hist) s += g.evaluate(zs[static_cast<std::size_t>(i)], f);
        best = std::min(best, s);
      }
      return -best;
    }
    double outer = kInf;
    for (const auto& f : grid) {
      double inner = -kInf;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        hist.push_back(static_cast<int>(i));
        inner = std::max(inner, g.evaluate(zs[i], f) + rec());
        hist.pop_back();
      }
      outer = std::min(outer, inner);
    }
    return outer;
  };
  return rec();
}

struct SuiteGame {
  std::string name;
  Game game;
  bool trivial;
};

std::vector<SuiteGame> suite() {
  return {
      {"zf_positive", make_game(LinearLoss{1}, FinitePoints{scalars({0.5, 1})}, Interval{0, 1}), true},
      {"simplex_dominated",
       make_game(LinearLoss{2}, FinitePoints{{vec({1, 0}), vec({1, 1})}}, Simplex{2}), true},
      {"zf_pm1", pm1_game(), false},
      {"experts", make_game(LinearLoss{2}, FinitePoints{{vec({1, 0}), vec({0, 1})}}, Simplex{2}), false},
      {"hinge_reduced", make_game(HingeLoss{0}, FinitePoints{scalars({-1, 1})}, Interval{-1, 1}), false},
  };
}

}  // namespace

TEST(ExactValue, TrivialGameIsZero) {
  const Game g = make_game(LinearLoss{1}, FinitePoints{scalars({0.5, 1})}, Interval{0, 1});
  const FiniteGame fg = make_finite_game(g, scalars({0, 0.5, 1}));
  for (int T = 1; T <= 4; ++T) EXPECT_NEAR(exact_value(fg, T), 0.0, 1e-12);
}

TEST(ExactValue, HandInductionValues) {
  const FiniteGame fg = make_finite_game(pm1_game(), scalars({-1, 0, 1}));
  EXPECT_NEAR(exact_value(fg, 1), 1.0, 1e-12);
  EXPECT_NEAR(exact_value(fg, 2), 1.0, 1e-12);
}

TEST(ExactValue, MatchesFullHistoryRecursion) {
  for (const auto& s : suite()) {
    const FiniteGame fg = make_finite_game(s.game, 3);
    for (int T = 1; T <= 4; ++T) {
      EXPECT_NEAR(exact_value(fg, T), brute_value(s.game, fg.zs, fg.grid, T), 1e-10) << s.name << " T=" << T;
    }
  }
}

TEST(ExactValue, NonNegativeAndMonotone) {
  for (const auto& s : suite()) {
    const FiniteGame fg = make_finite_game(s.game, 3);
    double prev = 0.0;
    for (int T = 1; T <= 5; ++T) {
      const double v = exact_value(fg, T);
      EXPECT_GE(v, -1e-9) << s.name;
      EXPECT_GE(v, prev - 1e-9) << s.name << " T=" << T;
      prev = v;
    }
  }
}

TEST(ExactValue, ZeroExactlyForTrivialGames) {
  for (const auto& s : suite()) {
    const FiniteGame fg = make_finite_game(s.game, 3);
    EXPECT_EQ(is_trivial(s.game).trivial, s.trivial) << s.name;
    for (int T = 1; T <= 3; ++T) {
      const double v = exact_value(fg, T);
      if (s.trivial) {
        EXPECT_NEAR(v, 0.0, 1e-12) << s.name;
      } else {
        EXPECT_GT(v, 1e-6) << s.name;
      }
    }
  }
}

TEST(ExactValue, ConvexHullGridAgrees) {
  // Needs a fine enough grid on F: with F = {-1, 0, 1} the value for Z = conv is 1.5.
  const auto grid = scalars({-1, -0.5, 0, 0.5, 1});
  const FiniteGame base = make_finite_game(pm1_game(), grid);
  const Game hull = make_game(LinearLoss{1}, FinitePoints{grid}, Interval{-1, 1});
  const FiniteGame wide = make_finite_game(hull, grid);
  EXPECT_NEAR(exact_value(base, 2), exact_value(wide, 2), 0.05);
}

TEST(ExactValue, BudgetEnforced) {
  const FiniteGame fg = make_finite_game(pm1_game(), 21);
  EXPECT_THROW(exact_value(fg, 12, 1000), BudgetError);
}

TEST(ExactValue, LowerBoundsFollowTheLeader) {
  for (const auto& s : suite()) {
    const FiniteGame fg = make_finite_game(s.game, 3);
    const auto& zs = fg.zs;
    for (int T = 1; T <= 4; ++T) {
      double worst = -kInf;
      std::vector<std::size_t> idx(static_cast<std::size_t>(T), 0);
      while (true) {
        std::vector<Vec> seq;
        for (const auto i : idx) seq.push_back(zs[i]);
        FtlPlayer p;
        FixedAdversary a(seq);
        worst = std::max(worst, run_game(s.game, p, a, T, 0).regret);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == zs.size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
      EXPECT_GE(worst, exact_value(fg, T) - 1e-7) << s.name << " T=" << T;
    }
  }
}

TEST(IsTrivial, Examples) {
  const auto t = is_trivial(make_game(LinearLoss{1}, FinitePoints{scalars({0.5, 1})}, Interval{0, 1}));
  ASSERT_TRUE(t.trivial);
  EXPECT_NEAR(t.f_star(0), 0.0, 1e-12);
  EXPECT_FALSE(is_trivial(make_game(HingeLoss{0}, FinitePoints{scalars({-1, 1})}, Interval{-1, 1})).trivial);
  const auto n = is_trivial(pm1_game());
  ASSERT_FALSE(n.trivial);
  EXPECT_NEAR(n.witness_z(0), 1.0, 1e-12);
  EXPECT_NEAR(n.improving_f(0), -1.0, 1e-12);
}

TEST(IsTrivial, VerdictInvariants) {
  for (const auto& s : suite()) {
    const auto v = is_trivial(s.game);
    const auto& zs = std::get<FinitePoints>(s.game.opponents()).points;
    if (v.trivial) {
      for (const auto& z : zs) {
        const auto best = best_in_hindsight(s.game, {z});
        EXPECT_LE(s.game.evaluate(z, v.f_star), best.value + 1e-8) << s.name;
      }
    } else {
      // The improving move beats the candidate at the witness z by more than the tolerance.
      EXPECT_GT(v.violation, 1e-8) << s.name;
      EXPECT_TRUE(contains(s.game.player_set(), v.improving_f, 1e-9));
    }
  }
}

TEST(IsTrivial, BallWithLinearLoss) {
  const Game same = make_game(LinearLoss{2}, FinitePoints{{vec({3, 0}), vec({6, 0})}}, L2Ball{vec({0, 0}), 1.0});
  EXPECT_TRUE(is_trivial(same).trivial);
  const Game split = make_game(LinearLoss{2}, FinitePoints{{vec({3, 1}), vec({3, -1})}}, L2Ball{vec({0, 0}), 1.0});
  EXPECT_FALSE(is_trivial(split).trivial);
}

TEST(FiniteWitness, BallPair) {
  const Game g = make_game(LinearLoss{2}, BallRegion{vec({3, 0}), 1.0}, L2Ball{vec({0, 0}), 1.0});
  const auto w = finite_witness(g);
  ASSERT_TRUE(w.found);
  ASSERT_EQ(w.points.size(), 2u);
  std::vector<Vec> pts = w.points;
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return a(1) < b(1); });
  EXPECT_TRUE(pts[0].isApprox(vec({3, -1}), 1e-12));
  EXPECT_TRUE(pts[1].isApprox(vec({3, 1}), 1e-12));
}

TEST(FiniteWitness, HingeWithSideInformation) {
  const Game g = make_game(HingeLoss{1}, HullRegion{{vec({1, -1}), vec({1, 1})}}, Interval{-1, 1});
  const auto w = finite_witness(g);
  ASSERT_TRUE(w.found);
  ASSERT_EQ(w.points.size(), 2u);
  EXPECT_DOUBLE_EQ(w.points[0](0), w.points[1](0));
  EXPECT_DOUBLE_EQ(w.points[0](1), -w.points[1](1));
}

TEST(FiniteWitness, TrivialGameNotFound) {
  const Game g = make_game(LinearLoss{2}, BoxRegion{vec({1, 1}), vec({2, 2})}, Box{vec({0, 0}), vec({1, 1})});
  const auto w = finite_witness(g, 50);
  EXPECT_FALSE(w.found);
  EXPECT_TRUE(w.f_star.isApprox(vec({0, 0})));
}
