#include <cmath>

#include <gtest/gtest.h>

#include "oco/core.hpp"
#include "oco/equivalence.hpp"
#include "oco/geometry.hpp"
#include "oco/lp.hpp"
#include "oracles.hpp"

using namespace oco;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vec random_vec(Rng& rng, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

std::vector<DecisionSet> suite() {
  Mat Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  return {Simplex{3},
          Box{vec({-1, 0, 2}), vec({1, 0.5, 3})},
          Interval{-2, 1},
          L2Ball{vec({1, -1}), 2.0},
          LpBall{3.0, 1.0, 3},
          LpBall{2.5, 1.5, 2},
          VertexPolytope{{vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({0.2, 0.2})}},
          Ellipsoid{vec({0.5, 0}), Q, 1.0}};
}

}  // namespace

TEST(Linmin, SimplexVertex) {
  const auto r = linmin(Simplex{3}, vec({0.5, 0.2, 0.9}));
  EXPECT_TRUE(r.point.isApprox(vec({0, 1, 0})));
  EXPECT_DOUBLE_EQ(r.value, 0.2);
}

TEST(Linmin, EuclideanBall) {
  const auto r = linmin(L2Ball{vec({0, 0}), 1.0}, vec({3, 4}));
  EXPECT_NEAR(r.point(0), -0.6, 1e-15);
  EXPECT_NEAR(r.point(1), -0.8, 1e-15);
  EXPECT_NEAR(r.value, -5.0, 1e-14);
}

TEST(Linmin, LpBallClosedForm) {
  const auto r = linmin(LpBall{3.0, 1.0, 2}, vec({1, 1}));
  const double coord = -std::pow(2.0, -1.0 / 3.0);
  EXPECT_NEAR(r.point(0), coord, 1e-12);
  EXPECT_NEAR(r.point(1), coord, 1e-12);
  EXPECT_NEAR(oracle::lp_norm(r.point, 3.0), 1.0, 1e-12);
  EXPECT_NEAR(r.value, -std::pow(2.0, 2.0 / 3.0), 1e-12);
}

TEST(Linmin, ZeroCostOnBallGivesCenter) {
  const auto r = linmin(L2Ball{vec({1, 2}), 3.0}, vec({0, 0}));
  EXPECT_TRUE(r.point.isApprox(vec({1, 2})));
}

TEST(Linmin, LowestIndexVertexOnTies) {
  const auto r = linmin(Simplex{3}, vec({1, 0, 0}));
  EXPECT_TRUE(r.point.isApprox(vec({0, 1, 0})));
}

TEST(Linmin, DimensionMismatchThrows) { EXPECT_THROW(linmin(Simplex{3}, vec({1, 2})), ValidationError); }

TEST(Linmin, OracleOptimalityAgainstSampledPoints) {
  Rng rng(3);
  for (const auto& set : suite()) {
    const int d = dimension(set);
    for (int k = 0; k < 1000; ++k) {
      const Vec z = random_vec(rng, d);
      const auto r = linmin(set, z);
      const Vec f = sample_point(set, rng);
      ASSERT_LE(z.dot(r.point), z.dot(f) + 1e-9) << kind_name(set);
      ASSERT_NEAR(r.value, z.dot(r.point), 1e-9);
    }
  }
}

TEST(Linmin, MinimizerIsMember) {
  Rng rng(4);
  for (const auto& set : suite()) {
    for (int k = 0; k < 200; ++k) {
      const auto r = linmin(set, random_vec(rng, dimension(set)));
      ASSERT_TRUE(contains(set, r.point, 1e-9)) << kind_name(set);
    }
  }
}

TEST(Linmin, LpBallValueIsDualNorm) {
  Rng rng(5);
  for (const double p : {2.0, 2.5, 3.0}) {
    const double dual = p / (p - 1.0);
    for (int k = 0; k < 200; ++k) {
      const Vec z = random_vec(rng, 4);
      const auto r = linmin(LpBall{p, 1.7, 4}, z);
      ASSERT_NEAR(r.value, -1.7 * oracle::lp_norm(z, dual), 1e-9);
    }
  }
}

TEST(Linmin, PolytopeAgreesWithLpSolver) {
  // Box [lo, hi] given once by its vertices and once as halfspaces.
  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    Vec lo(3), hi(3);
    for (int i = 0; i < 3; ++i) {
      lo(i) = rng.normal();
      hi(i) = lo(i) + 0.1 + rng.uniform();
    }
    std::vector<Vec> corners;
    for (int mask = 0; mask < 8; ++mask) {
      Vec v(3);
      for (int i = 0; i < 3; ++i) v(i) = (mask >> i) & 1 ? hi(i) : lo(i);
      corners.push_back(v);
    }
    const Vec z = random_vec(rng, 3);
    LinearProgram lp;
    lp.objective = z;
    lp.A = Mat(6, 3);
    lp.A << Mat::Identity(3, 3), -Mat::Identity(3, 3);
    lp.b = Vec(6);
    lp.b << hi, -lo;
    const auto opt = std::get<LpOptimal>(solve_lp(lp));
    EXPECT_NEAR(linmin(VertexPolytope{corners}, z).value, opt.value, 1e-9);
  }
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(L2Ball{vec({0, 0}), 1.0}, vec({0.6, 0.8})));
  EXPECT_FALSE(contains(Box{vec({0, 0}), vec({1, 1})}, vec({1.1, 0}), 1e-9));
  EXPECT_TRUE(contains(Simplex{2}, vec({0.5, 0.5})));
  EXPECT_FALSE(contains(Simplex{2}, vec({0.6, 0.5})));
  EXPECT_TRUE(contains(VertexPolytope{{vec({0, 0}), vec({2, 0}), vec({0, 2})}}, vec({1, 1})));
  EXPECT_FALSE(contains(VertexPolytope{{vec({0, 0}), vec({2, 0}), vec({0, 2})}}, vec({1.1, 1})));
  EXPECT_TRUE(contains(LpBall{3.0, 1.0, 2}, vec({std::pow(0.5, 1.0 / 3.0), std::pow(0.5, 1.0 / 3.0)})));
}

TEST(Vertices, Examples) {
  const auto iv = vertices(Interval{-1, 1});
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_DOUBLE_EQ(iv[0](0), -1.0);
  EXPECT_DOUBLE_EQ(iv[1](0), 1.0);
  const auto sv = vertices(Simplex{3});
  ASSERT_EQ(sv.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(sv[static_cast<std::size_t>(i)].isApprox(Vec::Unit(3, i)));
  EXPECT_EQ(vertices(Box{Vec::Zero(4), Vec::Ones(4)}).size(), 16u);
  EXPECT_THROW(vertices(L2Ball{vec({0, 0}), 1.0}), UnsupportedError);
}

TEST(Vertices, PolytopeDropsInteriorGenerators) {
  const auto v = vertices(VertexPolytope{{vec({0, 0}), vec({1, 0}), vec({0.3, 0.3}), vec({0, 1}), vec({0.5, 0.5})}});
  EXPECT_EQ(v.size(), 3u);
}

TEST(Validate, RejectsBadSets) {
  EXPECT_THROW(validate(LpBall{3.5, 1.0, 2}), ValidationError);
  EXPECT_THROW(validate(Box{vec({1}), vec({0})}), ValidationError);
  EXPECT_THROW(validate(L2Ball{vec({0}), -1.0}), ValidationError);
  EXPECT_THROW(validate(VertexPolytope{}), ValidationError);
}

TEST(Project, SimplexMatchesBisectionOracle) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const Vec y = 2.0 * random_vec(rng, 4);
    EXPECT_LE((project(Simplex{4}, y) - oracle::simplex_projection(y)).norm(), 1e-9);
  }
}

TEST(Modulus, EuclideanClosedForm) {
  const double est = modulus_of_convexity(L2Ball{vec({0, 0}), 1.0}, 1.0, 200, 1);
  EXPECT_NEAR(est, 1.0 - std::sqrt(3.0) / 2.0, 1e-3);
  EXPECT_GE(est, 1.0 - std::sqrt(3.0) / 2.0 - 1e-9);
}

TEST(Modulus, SmallEpsilonNearZero) {
  EXPECT_LT(modulus_of_convexity(L2Ball{vec({0, 0, 0}), 1.0}, 1e-3, 50, 2), 1e-6);
}

TEST(Modulus, LpBallMatchesClosedForm) {
  // For p >= 2 the lp unit ball has delta(eps) = 1 - (1 - (eps/2)^p)^(1/p).
  const LpBall ball{3.0, 1.0, 2};
  for (const double eps : {0.5, 1.0}) {
    const double exact = 1.0 - std::cbrt(1.0 - std::pow(eps / 2.0, 3.0));
    const double est = modulus_of_convexity(ball, eps, 200, 3);
    EXPECT_GE(est, exact - 1e-9);
    EXPECT_LE(est, exact * 1.05 + 1e-6);
  }
}

TEST(Modulus, AntitoneInBudget) {
  const LpBall ball{2.5, 1.0, 3};
  const double small = modulus_of_convexity(ball, 1.2, 20, 9);
  const double large = modulus_of_convexity(ball, 1.2, 200, 9);
  EXPECT_LE(large, small);
}

TEST(Modulus, RejectsBadEps) {
  EXPECT_THROW(modulus_of_convexity(L2Ball{vec({0, 0}), 1.0}, 0.0), ValidationError);
  EXPECT_THROW(modulus_of_convexity(L2Ball{vec({0, 0}), 1.0}, 2.5), ValidationError);
}

TEST(Equivalence, LinearFullSpan) {
  const Game g = make_game(LinearLoss{2}, FinitePoints{{vec({1, 0}), vec({0, 1})}}, Simplex{2});
  const auto part = equivalence_classes({vec({1, 0}), vec({0, 1})}, g);
  EXPECT_EQ(part.num_classes(), 2);
  ASSERT_EQ(part.witnesses.size(), 1u);
}

TEST(Equivalence, LinearOrthogonalDifference) {
  const Game g = make_game(LinearLoss{2}, FinitePoints{{vec({1, 0})}}, Box{vec({-3, -3}), vec({3, 3})});
  const auto part = equivalence_classes({vec({0, 1}), vec({0, 2})}, g);
  EXPECT_EQ(part.num_classes(), 1);
}

TEST(Equivalence, LinearContinuousZUsesSpan) {
  const Game g = make_game(LinearLoss{3}, BallRegion{vec({0, 0, 0}), 1.0}, Box{-Vec::Ones(3), Vec::Ones(3)});
  EXPECT_EQ(equivalence_classes({vec({0, 0, 1}), vec({0, 0, -1})}, g).num_classes(), 2);
}

TEST(Equivalence, HingeSeparatedByPositiveLabel) {
  const Game g = make_game(HingeLoss{0}, FinitePoints{{vec({-1}), vec({1})}}, Interval{-1, 1});
  const auto part = equivalence_classes({vec({-1}), vec({1})}, g);
  ASSERT_EQ(part.num_classes(), 2);
  // Both labels separate the two points here; the witness must actually separate them.
  const Vec z = part.witnesses.at(0).z;
  EXPECT_NE(g.evaluate(z, vec({-1})), g.evaluate(z, vec({1})));
}

TEST(Equivalence, ContinuousNonLinearUnsupported) {
  const Game g = make_game(HingeLoss{0}, BoxRegion{vec({-1}), vec({1})}, Interval{-1, 1});
  EXPECT_THROW(equivalence_classes({vec({0})}, g), UnsupportedError);
}
