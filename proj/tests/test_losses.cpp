#include <cmath>

#include <gtest/gtest.h>

#include "oco/core.hpp"
#include "oco/geometry.hpp"
#include "oco/losses.hpp"
#include "oco/lp.hpp"

using namespace oco;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const char* kDiamondGraph = R"(# s -> a -> t plus the direct arc s -> t
s a
a t
s t
config: 2
config: 0
attacker: s t
)";

SecurityGameSpec diamond() { return parse_security_graph(kDiamondGraph); }

// Two-stage spec: c1 = 1, A = (1), B = (-1), c2 = 1, so x >= f - z and x >= 0.
TwoStageSpec simple_two_stage() {
  TwoStageSpec s;
  s.c1 = vec({1});
  s.c2 = vec({1});
  s.A = Mat::Ones(1, 1);
  s.B = -Mat::Ones(1, 1);
  s.x_lower = vec({0});
  s.x_upper = vec({kInf});
  return s;
}

// Recourse with free x: min x s.t. f - x <= z, -x <= 0 written as rows; dual
// vertices y >= 0 with B'y = -c2 are the unit vectors here.
TwoStageSpec free_two_stage() {
  TwoStageSpec s;
  s.c1 = vec({0.5, -0.25});
  s.c2 = vec({1});
  s.A = Mat(2, 2);
  s.A << 1, 1, 0, 0;
  s.B = Mat(2, 1);
  s.B << -1, -1;
  s.dual_vertices = {vec({1, 0}), vec({0, 1})};
  return s;
}

// Independent brute-force: interception mass of the cheapest of the two paths.
double diamond_oracle(const Vec& f) {
  const double via_a = f(1);  // arc 0 (s a) is patrolled by configuration 1
  const double direct = f(0);  // arc 2 (s t) is patrolled by configuration 0
  return std::max(-via_a, -direct);
}

}  // namespace

TEST(PwlEval, HingeScenarioForm) {
  const auto canon = to_canonical(HingeLoss{0}, {vec({1})});
  EXPECT_NEAR(pwl_eval(canon, vec({1}), vec({0.5})).value, 0.5, 1e-15);
}

TEST(PwlEval, SingleScenario) {
  CanonicalPwl spec{{PwlRecord{vec({0}), Mat::Ones(1, 1), vec({0}), {vec({1})}}}};
  EXPECT_DOUBLE_EQ(pwl_eval(spec, vec({0}), vec({2})).value, 2.0);
}

TEST(PwlEval, TwoScenariosReportsAttainingIndex) {
  CanonicalPwl spec{{PwlRecord{vec({0}), Mat::Ones(1, 1), vec({0}), {vec({1}), vec({-1})}}}};
  const auto v = pwl_eval(spec, vec({0}), vec({3}));
  EXPECT_DOUBLE_EQ(v.value, 3.0);
  EXPECT_EQ(v.scenario, 0u);
  EXPECT_EQ(pwl_eval(spec, vec({0}), vec({-3})).scenario, 1u);
}

TEST(PwlEval, UnknownKeyThrows) {
  CanonicalPwl spec{{PwlRecord{vec({0}), Mat::Ones(1, 1), vec({0}), {vec({1})}}}};
  EXPECT_THROW(pwl_eval(spec, vec({1}), vec({3})), ValidationError);
}

TEST(ToCanonical, LinearIsOnePiece) {
  const auto c = to_canonical(LinearLoss{2}, {vec({1, 2})});
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].scenarios.size(), 1u);
  EXPECT_DOUBLE_EQ(pwl_eval(c, vec({1, 2}), vec({3, -1})).value, 1.0);
}

TEST(ToCanonical, HingeAlphaScenarios) {
  const auto c = to_canonical(HingeLoss{0}, {vec({-1}), vec({1})});
  for (const auto& rec : c.records) {
    ASSERT_EQ(rec.scenarios.size(), 2u);
    // alpha = 0 and alpha = 1 scenarios (alpha, -y alpha).
    EXPECT_TRUE(rec.scenarios[0].isZero());
    EXPECT_DOUBLE_EQ(rec.scenarios[1](0), 1.0);
    EXPECT_DOUBLE_EQ(rec.scenarios[1](1), -rec.z(0));
  }
}

TEST(ToCanonical, AbsoluteTwoSigns) {
  const auto c = to_canonical(AbsoluteLoss{0}, {vec({0.3})});
  EXPECT_EQ(c.records[0].scenarios.size(), 2u);
  EXPECT_NEAR(pwl_eval(c, vec({0.3}), vec({-0.2})).value, 0.5, 1e-15);
}

TEST(ToCanonical, SecurityAndCongestionUnsupported) {
  EXPECT_THROW(to_canonical(diamond(), {vec({0})}), UnsupportedError);
  EXPECT_THROW(to_canonical(CongestionSpec{{{{1, 0}}}}, {vec({1})}), UnsupportedError);
}

TEST(ToCanonical, AgreesWithNativeEvaluation) {
  Rng rng(13);
  struct Case {
    LossFunction loss;
    std::function<Vec(Rng&)> z;
  };
  const std::vector<Case> cases = {
      {LinearLoss{3}, [](Rng& r) { return vec({r.normal(), r.normal(), r.normal()}); }},
      {HingeLoss{0}, [](Rng& r) { return vec({r.coin() ? 1.0 : -1.0}); }},
      {HingeLoss{2}, [](Rng& r) { return vec({r.normal(), r.normal(), r.coin() ? 1.0 : -1.0}); }},
      {AbsoluteLoss{0}, [](Rng& r) { return vec({r.normal()}); }},
      {AbsoluteLoss{2}, [](Rng& r) { return vec({r.normal(), r.normal(), r.normal()}); }},
      {MulticlassHingeLoss{3, 2}, [](Rng& r) { return vec({r.normal(), r.normal(), static_cast<double>(r.index(3))}); }},
      {free_two_stage(), [](Rng& r) { return vec({r.normal(), r.normal()}); }},
  };
  for (const auto& c : cases) {
    const int df = loss_dims(c.loss).second;
    for (int k = 0; k < 1000; ++k) {
      const Vec z = c.z(rng);
      Vec f(df);
      for (int i = 0; i < df; ++i) f(i) = 2.0 * rng.normal();
      const auto canon = to_canonical(c.loss, {z});
      ASSERT_NEAR(pwl_eval(canon, z, f).value, evaluate(c.loss, z, f), 1e-9) << loss_name(c.loss);
    }
  }
}

TEST(TwoStage, HandSolvedExample) {
  EXPECT_NEAR(two_stage_eval(simple_two_stage(), vec({0.5}), vec({1})), 1.5, 1e-12);
  EXPECT_NEAR(two_stage_eval(simple_two_stage(), vec({0}), vec({0})), 0.0, 1e-12);
}

TEST(TwoStage, InfeasibleRecourseThrows) {
  TwoStageSpec s = simple_two_stage();
  s.x_upper = vec({0.1});  // x >= f - z = 1 cannot hold
  EXPECT_THROW(two_stage_eval(s, vec({0}), vec({1})), InfeasibleError);
}

TEST(TwoStage, ConvexInFirstStage) {
  Rng rng(2);
  const TwoStageSpec s = free_two_stage();
  for (int k = 0; k < 1000; ++k) {
    const Vec z = vec({rng.normal(), rng.normal()});
    const Vec f1 = vec({rng.normal(), rng.normal()});
    const Vec f2 = vec({rng.normal(), rng.normal()});
    ASSERT_LE(two_stage_eval(s, z, 0.5 * (f1 + f2)),
              0.5 * (two_stage_eval(s, z, f1) + two_stage_eval(s, z, f2)) + 1e-9);
  }
}

TEST(Security, PathEnumerationExamples) {
  const auto g = diamond();
  EXPECT_NEAR(security_eval(g, 0, vec({0.7, 0.3})), -0.3, 1e-15);
  EXPECT_NEAR(security_eval(g, 0, vec({0, 1})), 0.0, 1e-15);
  const auto single = parse_security_graph("u v\nconfig: 0\nattacker: u v\n");
  EXPECT_NEAR(security_eval(single, 0, vec({1})), -1.0, 1e-15);
}

TEST(Security, MatchesBruteForceOnSimplex) {
  Rng rng(9);
  const auto g = diamond();
  for (int k = 0; k < 500; ++k) {
    const Vec f = sample_point(Simplex{2}, rng);
    ASSERT_NEAR(security_eval(g, 0, f), diamond_oracle(f), 1e-15);
  }
}

TEST(Security, HitOnceSemantics) {
  // One configuration patrols both arcs of the only path: mass counted once.
  const auto g = parse_security_graph("s a\na t\nconfig: 0 1\nattacker: s t\n");
  EXPECT_NEAR(security_eval(g, 0, vec({1})), -1.0, 1e-15);
}

TEST(Security, ConvexInF) {
  Rng rng(10);
  const auto g = diamond();
  for (int k = 0; k < 1000; ++k) {
    const Vec f1 = sample_point(Simplex{2}, rng);
    const Vec f2 = sample_point(Simplex{2}, rng);
    ASSERT_LE(security_eval(g, 0, 0.5 * (f1 + f2)), 0.5 * (security_eval(g, 0, f1) + security_eval(g, 0, f2)) + 1e-12);
  }
}

TEST(Security, DisconnectedAttackerRejected) {
  EXPECT_THROW(parse_security_graph("s a\nt u\nconfig: 0\nattacker: s t\n"), ValidationError);
}

TEST(Security, PathCapEnforced) {
  // Complete DAG on 12 nodes has 2^10 simple paths from first to last.
  std::string text;
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) text += "n" + std::to_string(i) + " n" + std::to_string(j) + "\n";
  }
  text += "config: 0\nattacker: n0 n11\n";
  EXPECT_THROW(parse_security_graph(text, 100), BudgetError);
  EXPECT_NO_THROW(parse_security_graph(text, 2000));
}

TEST(Security, MalformedGraphText) {
  EXPECT_THROW(parse_security_graph("s a\nconfig: x\nattacker: s a\n"), ValidationError);
}

TEST(Congestion, Examples) {
  const CongestionSpec one{{{{1.0, 0.0}}}};
  EXPECT_DOUBLE_EQ(congestion_eval(one, vec({1}), vec({1})), 2.0);
  EXPECT_DOUBLE_EQ(congestion_eval(one, vec({0}), vec({1})), 0.0);
  const CongestionSpec two{{{{1.0, 0.0}, {0.0, 3.0}}}};
  EXPECT_DOUBLE_EQ(congestion_eval(two, vec({1}), vec({1})), 3.0);
  EXPECT_THROW(congestion_eval(one, vec({-1}), vec({1})), ValidationError);
}

TEST(Losses, ConvexInSecondArgument) {
  Rng rng(17);
  const std::vector<LossFunction> losses = {
      LinearLoss{2}, HingeLoss{1}, AbsoluteLoss{1}, MulticlassHingeLoss{2, 1}, CongestionSpec{{{{1, 0}, {2, -1}}, {{0.5, 1}}}},
      CanonicalPwl{{PwlRecord{vec({0}), Mat::Identity(2, 2), vec({0.1, -0.2}), {vec({1, 0}), vec({0, 1}), vec({-1, -1})}}}}};
  for (const auto& loss : losses) {
    const auto [dz, df] = loss_dims(loss);
    for (int k = 0; k < 1000; ++k) {
      Vec z(dz), f1(df), f2(df);
      for (int i = 0; i < dz; ++i) z(i) = rng.normal();
      if (std::holds_alternative<HingeLoss>(loss) || std::holds_alternative<AbsoluteLoss>(loss)) z(dz - 1) = rng.coin() ? 1 : -1;
      if (std::holds_alternative<MulticlassHingeLoss>(loss)) z(dz - 1) = static_cast<double>(rng.index(2));
      if (std::holds_alternative<CongestionSpec>(loss)) z = z.cwiseAbs();
      if (std::holds_alternative<CanonicalPwl>(loss)) z = vec({0});
      for (int i = 0; i < df; ++i) {
        f1(i) = rng.normal();
        f2(i) = rng.normal();
      }
      ASSERT_LE(evaluate(loss, z, 0.5 * (f1 + f2)), 0.5 * (evaluate(loss, z, f1) + evaluate(loss, z, f2)) + 1e-9)
          << loss_name(loss);
    }
  }
}

TEST(Losses, SubgradientInequality) {
  Rng rng(23);
  const std::vector<LossFunction> losses = {HingeLoss{2}, AbsoluteLoss{2}, LinearLoss{2}};
  for (const auto& loss : losses) {
    const auto [dz, df] = loss_dims(loss);
    for (int k = 0; k < 300; ++k) {
      Vec z(dz), f(df), g(df);
      for (int i = 0; i < dz; ++i) z(i) = rng.normal();
      if (!std::holds_alternative<LinearLoss>(loss)) z(dz - 1) = rng.coin() ? 1 : -1;
      for (int i = 0; i < df; ++i) {
        f(i) = rng.normal();
        g(i) = rng.normal();
      }
      const Vec s = subgradient(loss, z, f);
      ASSERT_GE(evaluate(loss, z, g), evaluate(loss, z, f) + s.dot(g - f) - 1e-9) << loss_name(loss);
    }
  }
}
