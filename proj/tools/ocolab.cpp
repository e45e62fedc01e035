#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oco/adversaries.hpp"
#include "oco/config.hpp"
#include "oco/geometry.hpp"
#include "oco/harness.hpp"
#include "oco/minimax.hpp"

namespace {

using namespace oco;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string num(double x) { return std::isfinite(x) ? format_double(x) : "null"; }

std::string vec(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

std::string vec(const std::vector<double>& v) { return vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()))); }

std::string points(const std::vector<Vec>& pts) {
  std::string s = "[";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ", " : "") + vec(pts[i]);
  return s + "]";
}

std::string boolean(bool b) { return b ? "true" : "false"; }

// Prints the report and mirrors it to <out>/<name>.json when --out is set.
void emit(const Options& opt, const std::string& name, const std::string& body) {
  std::cout << body;
  if (opt.out.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  write_file_atomic((std::filesystem::path(opt.out) / (name + ".json")).string(), body);
}

Game load_game(const Options& opt) {
  if (opt.config.empty()) throw ValidationError("--config is required");
  return build_game(parse_game_config(read_file(opt.config)));
}

int cmd_run(const Options& opt) {
  if (opt.config.empty()) throw ValidationError("--config is required");
  ExperimentSpec spec = parse_config(read_file(opt.config));
  if (opt.seed) spec.seed = *opt.seed;
  if (!opt.out.empty()) spec.output = opt.out;
  const RunOutcome outcome = run_experiment(spec, opt.threads);
  const SweepResult& r = outcome.sweep;
  std::cout << "verdict: " << verdict_name(r.verdict) << " exponent=" << num(r.exponent) << " ci=[" << num(r.exponent_ci[0])
            << ", " << num(r.exponent_ci[1]) << "] log_fit=(" << num(r.log_a) << ", " << num(r.log_b) << ")\n";
  std::cout << "wrote " << outcome.csv_path << " and " << outcome.summary_path << "\n";
  return 0;
}

int cmd_minimax(const Options& opt, int horizon, int grid) {
  const Game game = load_game(opt);
  const FiniteGame fg = make_finite_game(game, grid);
  std::vector<double> values;
  for (int t = 1; t <= horizon; ++t) values.push_back(exact_value(fg, t));
  emit(opt, "minimax",
       "{\n  \"horizons\": " + vec([&] {
         std::vector<double> ts;
         for (int t = 1; t <= horizon; ++t) ts.push_back(t);
         return ts;
       }()) + ",\n  \"values\": " + vec(values) + ",\n  \"grid\": " + points(fg.grid) + "\n}\n");
  return 0;
}

int cmd_check_trivial(const Options& opt) {
  const Game game = load_game(opt);
  std::string body = "{\n";
  TrivialityVerdict verdict;
  if (is_finite(game.opponents())) {
    verdict = is_trivial(game);
  } else {
    const WitnessResult w = finite_witness(game, 200, opt.seed.value_or(0));
    body += "  \"witness_points\": " + points(w.points) + ",\n";
    verdict = w.found ? is_trivial(game.loss(), game.player_set(), w.points)
                      : TrivialityVerdict{true, w.f_star, Vec(), Vec(), 0.0};
  }
  body += "  \"trivial\": " + boolean(verdict.trivial) + ",\n";
  if (verdict.trivial) {
    body += "  \"f_star\": " + vec(verdict.f_star) + "\n}\n";
  } else {
    body += "  \"witness_z\": " + vec(verdict.witness_z) + ",\n  \"improving_f\": " + vec(verdict.improving_f) +
            ",\n  \"violation\": " + num(verdict.violation) + "\n}\n";
  }
  emit(opt, "check-trivial", body);
  return 0;
}

int cmd_construct_alpha(const Options& opt, const std::vector<double>& p1) {
  const Game game = load_game(opt);
  const CriticalAlpha ca = critical_alpha(game, p1.empty() ? std::nullopt : std::optional(p1));
  const MixtureCertificate cert = mixture_certificate(game, ca.p, ca.f_a, ca.f_b);
  emit(opt, "construct-alpha",
       "{\n  \"alpha\": " + num(ca.alpha) + ",\n  \"p\": " + vec(ca.p) + ",\n  \"f_a\": " + vec(ca.f_a) +
           ",\n  \"f_b\": " + vec(ca.f_b) + ",\n  \"k\": " + std::to_string(ca.k) + ",\n  \"eps\": " + num(ca.eps) +
           ",\n  \"certificate\": " + boolean(cert.pass) + ",\n  \"certificate_value\": " + num(cert.value) + "\n}\n");
  return cert.pass ? 0 : 1;
}

int cmd_estimate_modulus(const Options& opt, double eps, int budget) {
  if (opt.config.empty()) throw ValidationError("--config is required");
  const auto game = parse_game_config(read_file(opt.config));
  if (!game.contains("decisions")) throw ValidationError("game.decisions: required for estimate-modulus");
  const DecisionSet set = build_decision_set(game.at("decisions"));
  const double delta = modulus_of_convexity(set, eps, budget, opt.seed.value_or(0));
  emit(opt, "estimate-modulus",
       "{\n  \"eps\": " + num(eps) + ",\n  \"budget\": " + std::to_string(budget) + ",\n  \"modulus\": " + num(delta) +
           "\n}\n");
  return 0;
}

int cmd_holder_check(const Options& opt, double q, int samples) {
  if (opt.config.empty()) throw ValidationError("--config is required");
  const auto game = parse_game_config(read_file(opt.config));
  if (!game.contains("decisions")) throw ValidationError("game.decisions: required for holder-check");
  if (!game.contains("opponents")) throw ValidationError("game.opponents: required for holder-check");
  const HolderReport r = holder_check(build_decision_set(game.at("decisions")), build_opponent_set(game.at("opponents")),
                                      q, samples, opt.seed.value_or(0));
  emit(opt, "holder-check",
       "{\n  \"q\": " + num(q) + ",\n  \"pairs\": " + std::to_string(r.pairs) + ",\n  \"max_ratio\": " +
           num(r.max_ratio) + ",\n  \"min_norm\": " + num(r.min_norm) + ",\n  \"analytic_bound\": " +
           num(r.analytic_bound) + "\n}\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online convex optimization regret lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config, "Experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides the config)");
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run the configured sweep and write CSV + summary JSON");
  int horizon = 4;
  int grid = 0;
  auto* minimax = app.add_subcommand("minimax", "Exact minimax regret R_1..R_T by backward induction");
  minimax->add_option("--horizon", horizon, "Largest horizon")->check(CLI::Range(1, 64));
  minimax->add_option("--grid", grid, "Grid points for an interval F (0: breakpoints)")->check(CLI::NonNegativeNumber);
  auto* trivial = app.add_subcommand("check-trivial", "Decide triviality or report a witness");
  std::vector<double> p1;
  auto* alpha = app.add_subcommand("construct-alpha", "Critical mixture and certificate for a finite game");
  alpha->add_option("--p1", p1, "Override for the endpoint distribution")->delimiter(',');
  double eps = 1.0;
  int budget = 1000;
  auto* modulus = app.add_subcommand("estimate-modulus", "Estimate the modulus of convexity of F");
  modulus->add_option("--eps", eps, "Distance eps in (0, 2]");
  modulus->add_option("--budget", budget, "Number of local searches")->check(CLI::PositiveNumber);
  double q = 2.0;
  int samples = 1000;
  auto* holder = app.add_subcommand("holder-check", "Sampled Hoelder ratio of the leader map");
  holder->add_option("--q", q, "Uniform convexity order in [2, 3]");
  holder->add_option("--samples", samples, "Sampled pairs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) opt.seed = seed;

  try {
    if (*run) return cmd_run(opt);
    if (*minimax) return cmd_minimax(opt, horizon, grid);
    if (*trivial) return cmd_check_trivial(opt);
    if (*alpha) return cmd_construct_alpha(opt, p1);
    if (*modulus) return cmd_estimate_modulus(opt, eps, budget);
    if (*holder) return cmd_holder_check(opt, q, samples);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
