#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oco/adversaries.hpp"
#include "oco/config.hpp"
#include "oco/geometry.hpp"
#include "oco/harness.hpp"
#include "oco/lp.hpp"
#include "oco/minimax.hpp"

namespace py = pybind11;
using namespace oco;

namespace {

py::dict sweep_dict(const SweepResult& r) {
  py::dict d;
  d["horizons"] = r.horizons;
  d["mean_regret"] = r.mean_regret;
  d["stderr"] = r.std_error;
  d["trials"] = r.trials;
  d["exponent"] = r.exponent;
  d["exponent_ci"] = std::vector<double>{r.exponent_ci[0], r.exponent_ci[1]};
  d["power_fit"] = py::dict(py::arg("intercept") = r.power_intercept, py::arg("residual") = r.power_residual);
  d["log_fit"] = py::dict(py::arg("a") = r.log_a, py::arg("b") = r.log_b, py::arg("residual") = r.log_residual);
  d["verdict"] = verdict_name(r.verdict);
  return d;
}

py::dict simulate(const std::string& text, int threads, std::optional<std::uint64_t> seed) {
  const ExperimentSpec spec = parse_config(text);
  SweepResult r;
  {
    py::gil_scoped_release release;
    const Game game = build_game(spec.game);
    const auto player = build_player(spec.player);
    const auto adversary = build_adversary(spec.adversary, game);
    r = run_sweep(game, *player, *adversary, spec.horizons, spec.trials, seed.value_or(spec.seed), threads);
  }
  return sweep_dict(r);
}

py::dict run(const std::string& text, int threads, std::optional<std::uint64_t> seed, std::optional<std::string> out) {
  ExperimentSpec spec = parse_config(text);
  if (seed) spec.seed = *seed;
  if (out) spec.output = *out;
  RunOutcome outcome;
  {
    py::gil_scoped_release release;
    outcome = run_experiment(spec, threads);
  }
  py::dict d = sweep_dict(outcome.sweep);
  d["csv_path"] = outcome.csv_path;
  d["summary_path"] = outcome.summary_path;
  return d;
}

std::vector<double> minimax(const std::string& text, int horizon, int grid) {
  const FiniteGame fg = make_finite_game(build_game(parse_game_config(text)), grid);
  std::vector<double> values;
  py::gil_scoped_release release;
  for (int t = 1; t <= horizon; ++t) values.push_back(exact_value(fg, t));
  return values;
}

py::dict check_trivial(const std::string& text, std::uint64_t seed) {
  const Game game = build_game(parse_game_config(text));
  TrivialityVerdict v;
  if (is_finite(game.opponents())) {
    v = is_trivial(game);
  } else {
    const WitnessResult w = finite_witness(game, 200, seed);
    v = w.found ? is_trivial(game.loss(), game.player_set(), w.points) : TrivialityVerdict{true, w.f_star, Vec(), Vec(), 0.0};
  }
  py::dict d;
  d["trivial"] = v.trivial;
  if (v.trivial) {
    d["f_star"] = v.f_star;
  } else {
    d["witness_z"] = v.witness_z;
    d["improving_f"] = v.improving_f;
    d["violation"] = v.violation;
  }
  return d;
}

py::dict construct_alpha(const std::string& text, std::optional<std::vector<double>> p1) {
  const Game game = build_game(parse_game_config(text));
  const CriticalAlpha ca = critical_alpha(game, p1);
  const MixtureCertificate cert = mixture_certificate(game, ca.p, ca.f_a, ca.f_b);
  py::dict d;
  d["alpha"] = ca.alpha;
  d["p"] = ca.p;
  d["f_a"] = ca.f_a;
  d["f_b"] = ca.f_b;
  d["k"] = ca.k;
  d["eps"] = ca.eps;
  d["certificate"] = cert.pass;
  d["certificate_value"] = cert.value;
  return d;
}

py::object lp(const Vec& c, const Mat& A, const Vec& b, std::optional<Vec> lower, std::optional<Vec> upper) {
  const LinearProgram prog{c, A, b, lower.value_or(Vec()), upper.value_or(Vec())};
  const LpOutcome out = solve_lp(prog);
  if (std::holds_alternative<LpInfeasible>(out)) return py::str("infeasible");
  if (std::holds_alternative<LpUnbounded>(out)) return py::str("unbounded");
  const auto opt = std::get<LpOptimal>(out);
  return py::dict(py::arg("x") = opt.x, py::arg("value") = opt.value, py::arg("row_duals") = opt.row_duals);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regret experiments for online convex optimization";
  // Translators run newest first, so the base class is registered first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  m.def("simulate", &simulate, py::arg("config"), py::arg("threads") = 1, py::arg("seed") = py::none(),
        "Run the configured sweep in memory and return the summary");
  m.def("run", &run, py::arg("config"), py::arg("threads") = 1, py::arg("seed") = py::none(),
        py::arg("out") = py::none(), "Run the configured sweep and write trials.csv and summary.json");
  m.def("minimax", &minimax, py::arg("config"), py::arg("horizon"), py::arg("grid") = 0,
        "Exact minimax regret for horizons 1..horizon");
  m.def("check_trivial", &check_trivial, py::arg("config"), py::arg("seed") = 0);
  m.def("construct_alpha", &construct_alpha, py::arg("config"), py::arg("p1") = py::none());
  m.def(
      "estimate_modulus",
      [](const std::string& decisions, double eps, int budget, std::uint64_t seed) {
        return modulus_of_convexity(build_decision_set(nlohmann::json::parse(decisions)), eps, budget, seed);
      },
      py::arg("decisions"), py::arg("eps"), py::arg("budget") = 1000, py::arg("seed") = 0);
  m.def(
      "holder_check",
      [](const std::string& decisions, const std::string& opponents, double q, int samples, std::uint64_t seed) {
        const HolderReport r = holder_check(build_decision_set(nlohmann::json::parse(decisions)),
                                            build_opponent_set(nlohmann::json::parse(opponents)), q, samples, seed);
        return py::dict(py::arg("max_ratio") = r.max_ratio, py::arg("pairs") = r.pairs,
                        py::arg("min_norm") = r.min_norm, py::arg("analytic_bound") = r.analytic_bound);
      },
      py::arg("decisions"), py::arg("opponents"), py::arg("q") = 2.0, py::arg("samples") = 1000, py::arg("seed") = 0);
  m.def("ct_sequence", &ct_sequence, py::arg("horizon"));
  m.def(
      "fit_growth",
      [](const std::vector<int>& horizons, const std::vector<double>& means) {
        return sweep_dict(fit_growth(horizons, means));
      },
      py::arg("horizons"), py::arg("mean_regret"));
  m.def("solve_lp", &lp, py::arg("c"), py::arg("A"), py::arg("b"), py::arg("lower") = py::none(),
        py::arg("upper") = py::none(), "minimize c.x subject to A x <= b and bounds");
}
