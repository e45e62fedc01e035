#include <cmath>

#include <gtest/gtest.h>

#include "oco/players.hpp"
#include "oracles.hpp"

using namespace oco;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Game ball_game() { return make_game(LinearLoss{2}, BallRegion{vec({3, 0}), 1.0}, L2Ball{vec({0, 0}), 1.0}); }

}  // namespace

TEST(Ftl, BallLeaderClosedForm) {
  FtlState s;
  s.add(vec({1, 0}));
  s.add(vec({0, 1}));
  const Vec f = ftl_step(s, make_game(LinearLoss{2}, BoxRegion{vec({0, 0}), vec({1, 1})}, L2Ball{vec({0, 0}), 1.0}));
  EXPECT_NEAR(f(0), -std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(f(1), -std::sqrt(0.5), 1e-12);
}

TEST(Ftl, HingeBreakpoints) {
  const Game g = make_game(HingeLoss{0}, FinitePoints{{vec({-1}), vec({1})}}, Interval{-1, 1});
  FtlState s;
  for (double y : {1.0, 1.0, -1.0}) s.add(vec({y}));
  EXPECT_NEAR(ftl_step(s, g)(0), 1.0, 1e-12);
}

TEST(Ftl, FirstMoveIsDefaultPoint) {
  EXPECT_TRUE(ftl_step(FtlState{}, ball_game()).isZero());
}

TEST(Ftl, SummaryTracksHistory) {
  FtlState s;
  s.add(vec({1, 2}));
  s.add(vec({1, 2}));
  s.add(vec({0, 1}));
  EXPECT_EQ(s.rounds, 3);
  EXPECT_TRUE(s.sum.isApprox(vec({2, 5})));
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_DOUBLE_EQ(s.counts[0], 2.0);
}

TEST(Ftl, OptimalityCertificate) {
  Rng rng(4);
  const Game g = make_game(AbsoluteLoss{1}, BoxRegion{vec({-1, -1}), vec({1, 1})}, Interval{-2, 2});
  FtlPlayer p;
  for (int t = 0; t < 30; ++t) {
    const Vec z = sample_opponent(g.opponents(), rng);
    const Vec f = p.act(g);
    p.observe(g, f, z);
    const Vec leader = p.act(g);
    // The leader after this round minimizes the cumulative loss so far.
    for (int k = 0; k < 100; ++k) {
      const Vec other = sample_point(g.player_set(), rng);
      double lead = 0.0, alt = 0.0;
      for (std::size_t i = 0; i < p.state().points.size(); ++i) {
        lead += p.state().counts[i] * g.evaluate(p.state().points[i], leader);
        alt += p.state().counts[i] * g.evaluate(p.state().points[i], other);
      }
      ASSERT_LE(lead, alt + 1e-7);
    }
  }
}

TEST(Ftl, BoundaryAttainmentOnBall) {
  Rng rng(6);
  const Game g = ball_game();
  FtlPlayer p;
  for (int t = 1; t <= 50; ++t) {
    const Vec f = p.act(g);
    if (t >= 2) ASSERT_NEAR(f.norm(), 1.0, 1e-12);
    p.observe(g, f, sample_opponent(g.opponents(), rng));
  }
}

TEST(Ftl, ScaleInvariantLeader) {
  FtlState a, b;
  a.add(vec({3, 1}));
  b.add(vec({6, 2}));
  const Game g = make_game(LinearLoss{2}, BoxRegion{vec({0, 0}), vec({10, 10})}, Simplex{2});
  EXPECT_TRUE(ftl_step(a, g).isApprox(ftl_step(b, g)));
  const Game ball = ball_game();
  EXPECT_TRUE(ftl_step(a, ball).isApprox(ftl_step(b, ball)));
}

TEST(Ogd, RadialProjection) {
  const Vec f = ogd_step(L2Ball{vec({0, 0}), 1.0}, vec({0.8, 0}), vec({-1, 0}), 0.5);
  EXPECT_NEAR(f(0), 1.0, 1e-15);
  EXPECT_NEAR(f(1), 0.0, 1e-15);
}

TEST(Ogd, ZeroGradientKeepsPoint) {
  const Vec f = ogd_step(L2Ball{vec({0, 0}), 1.0}, vec({0.3, -0.2}), vec({0, 0}), 0.5);
  EXPECT_TRUE(f.isApprox(vec({0.3, -0.2})));
}

TEST(Ogd, SimplexProjection) {
  // (1, 0) - 0.5 (1, -1) = (0.5, 0.5), already in the simplex.
  const Vec f = ogd_step(Simplex{2}, vec({1, 0}), vec({1, -1}), 0.5);
  EXPECT_TRUE(f.isApprox(oracle::simplex_projection(vec({0.5, 0.5}))));
  EXPECT_NEAR(f(0), 0.5, 1e-15);
}

TEST(Ogd, PolytopeUnsupported) {
  const Game g = make_game(LinearLoss{2}, FinitePoints{{vec({1, 0})}}, VertexPolytope{{vec({0, 0}), vec({1, 1})}});
  OgdPlayer p(0.1, 1.0);
  const Vec f = p.act(g);
  EXPECT_THROW(p.observe(g, f, vec({1, 0})), UnsupportedError);
}

TEST(Ogd, StaysInsideSet) {
  Rng rng(8);
  const Game g = make_game(HingeLoss{2}, BoxRegion{vec({-1, -1, -1}), vec({1, 1, 1})}, L2Ball{vec({0, 0}), 1.0});
  OgdPlayer p(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Vec z = sample_opponent(g.opponents(), rng);
    z(2) = z(2) > 0 ? 1 : -1;
    const Vec f = p.act(g);
    ASSERT_TRUE(contains(g.player_set(), f, 1e-9));
    p.observe(g, f, z);
  }
}

TEST(ExpWeights, StepExamples) {
  const Vec w = expw_step(vec({0.5, 0.5}), vec({0, 1}), std::log(2.0));
  EXPECT_NEAR(w(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(w(1), 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(expw_step(vec({0.2, 0.8}), vec({3, 3}), 1.0).isApprox(vec({0.2, 0.8})));
  EXPECT_TRUE(expw_step(vec({0.5, 0.5}), vec({0, 7}), 0.0).isApprox(vec({0.5, 0.5})));
  EXPECT_THROW(expw_step(vec({0.5, 0.5}), vec({0, kInf}), 1.0), ValidationError);
}

TEST(ExpWeights, OutputIsDistribution) {
  Rng rng(12);
  Vec w = Vec::Constant(4, 0.25);
  for (int t = 0; t < 500; ++t) {
    Vec losses(4);
    for (int i = 0; i < 4; ++i) losses(i) = 10.0 * rng.normal();
    w = expw_step(w, losses, 0.7);
    ASSERT_NEAR(w.sum(), 1.0, 1e-12);
    ASSERT_GE(w.minCoeff(), 0.0);
  }
}

TEST(ExpWeights, PlaysMixtureOfVertices) {
  const Game g = make_game(LinearLoss{2}, FinitePoints{{vec({0, 1})}}, Simplex{2});
  ExpWeightsPlayer p(std::log(2.0));
  const Vec f0 = p.act(g);
  EXPECT_TRUE(f0.isApprox(vec({0.5, 0.5})));
  p.observe(g, f0, vec({0, 1}));
  const Vec f1 = p.act(g);
  EXPECT_NEAR(f1(0), 2.0 / 3.0, 1e-12);
}

TEST(Players, CloneIsIndependent) {
  const Game g = ball_game();
  FtlPlayer p;
  p.observe(g, p.act(g), vec({3, 1}));
  auto q = p.clone();
  p.observe(g, p.act(g), vec({3, -1}));
  EXPECT_FALSE(q->act(g).isApprox(p.act(g)));
}
