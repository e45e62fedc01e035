#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oco/adversaries.hpp"
#include "oco/core.hpp"
#include "oco/epigraph.hpp"
#include "oco/players.hpp"

namespace oco {

// inf_f sum_t l(z_t, f), with repeated z merged into weights.
Minimizer best_in_hindsight(const Game& game, const std::vector<Vec>& zs);

// Plays T rounds of the full-information protocol. Moves are kept in the
// trace only when `record_moves` is set. Component errors are rethrown with
// the round index prepended.
RegretTrace run_game(const Game& game, Player& player, Adversary& adversary, int horizon, std::uint64_t seed,
                     bool record_moves = true);

struct TrialRecord {
  int horizon = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double cumulative_loss = 0.0;
  double benchmark = 0.0;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int count = 0;
};

// Sample mean and standard error (n - 1 denominator; 0 for a single value).
MeanEstimate estimate_mean(const std::vector<double>& values);

std::uint64_t trial_seed(std::uint64_t seed, int horizon, int trial);

// Runs fn(0..n-1) on up to `threads` workers; the first exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct MonteCarloResult {
  MeanEstimate regret;
  std::vector<TrialRecord> trials;
};

// Independent trials with seeds trial_seed(seed, T, i); players and
// adversaries are cloned from the prototypes. Results are ordered by trial.
MonteCarloResult monte_carlo(const Game& game, const Player& player, const Adversary& adversary, int horizon, int trials,
                             std::uint64_t seed, int threads = 1);

enum class Verdict { kPower, kLogarithmic, kInconclusive };
std::string verdict_name(Verdict v);

struct SweepResult {
  std::vector<int> horizons;
  std::vector<double> mean_regret;
  std::vector<double> std_error;
  std::vector<int> trials;
  // ln(regret) = intercept + exponent ln T.
  double exponent = 0.0;
  std::array<double, 2> exponent_ci{0.0, 0.0};
  double power_intercept = 0.0;
  double power_residual = 0.0;
  // regret = log_a + log_b ln T.
  double log_a = 0.0;
  double log_b = 0.0;
  double log_residual = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

// Least squares on (ln T, ln regret) for the exponent with a 95% Student-t
// interval, and on (ln T, regret) for the logarithmic model. Residuals are
// RMS in regret units; a model wins when its residual is at most half the
// other's. Without a winner the verdict is logarithmic when the exponent is
// below 0.2, inconclusive otherwise. Fewer than 3 horizons or a non-positive
// mean gives an inconclusive verdict with NaN fits.
SweepResult fit_growth(const std::vector<int>& horizons, const std::vector<double>& mean_regret,
                       const std::vector<double>& std_error = {}, const std::vector<int>& trials = {});

// Monte Carlo at every horizon followed by fit_growth. Per-trial records are
// appended to `records` when non-null.
SweepResult run_sweep(const Game& game, const Player& player, const Adversary& adversary, const std::vector<int>& horizons,
                      int trials, std::uint64_t seed, int threads = 1, std::vector<TrialRecord>* records = nullptr);

struct HolderReport {
  double max_ratio = 0.0;
  int pairs = 0;
  double min_norm = 0.0;
  // C / min ||z|| for an l2 ball F (the Lipschitz constant of z -> -C z/||z||); NaN otherwise.
  double analytic_bound = 0.0;
};

// max ||phi(z1) - phi(z2)|| / ||z1 - z2||^(1/(q-1)) over sampled pairs, with
// phi the linmin argmin; pairs closer than 1e-6 are skipped.
HolderReport holder_check(const DecisionSet& set, const OpponentSet& zset, double q, int samples, std::uint64_t seed = 0);

// Monte Carlo mean of (sum_t W_t)^2 / T - sum_t (c_t W_{1:t-1})^2 under the ct signs.
MeanEstimate ct_surrogate(int horizon, int trials, std::uint64_t seed, int threads = 1);

// %.17g.
std::string format_double(double x);

// Header T,trial,seed,regret,cumulative_loss,benchmark.
std::string trials_csv(const std::vector<TrialRecord>& records);

std::string summary_json(const SweepResult& result);

// Writes through a temporary file in the same directory and renames it, so
// a failed write leaves no partial file. Throws Error on failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace oco
