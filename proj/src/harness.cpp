#include "oco/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace oco {
namespace {

template <class E>
[[noreturn]] void rethrow_at(int round, const E& e) {
  throw E("round " + std::to_string(round) + ": " + e.what());
}

struct Fit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  if (x.size() > 2) fit.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  return fit;
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

std::string json_number(double x) { return std::isfinite(x) ? format_double(x) : "null"; }

template <class T>
std::string json_array(const std::vector<T>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += json_number(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out + "]";
}

}  // namespace

Minimizer best_in_hindsight(const Game& game, const std::vector<Vec>& zs) {
  if (zs.empty()) throw ValidationError("best_in_hindsight: empty sequence");
  FtlState merged;
  for (const auto& z : zs) merged.add(z);
  if (std::holds_alternative<LinearLoss>(game.loss())) {
    const auto r = linmin(game.player_set(), merged.sum);
    return {r.point, r.value};
  }
  return minimize_weighted(game.loss(), game.player_set(), merged.points, merged.counts);
}

RegretTrace run_game(const Game& game, Player& player, Adversary& adversary, int horizon, std::uint64_t seed,
                     bool record_moves) {
  if (horizon < 0) throw ValidationError("run_game: horizon must be >= 0");
  RegretTrace trace;
  trace.horizon = horizon;
  player.reset();
  adversary.begin(horizon);
  Rng rng(seed);
  FtlState history;
  int round = 0;
  try {
    for (round = 1; round <= horizon; ++round) {
      const Vec f = player.act(game);
      const Vec z = adversary.next(game, rng);
      if (z.size() != game.dim_z()) throw ValidationError("adversary produced z of the wrong dimension");
      const double loss = game.evaluate(z, f);
      player.observe(game, f, z);
      history.add(z);
      trace.cumulative_loss += loss;
      trace.per_round_loss.push_back(loss);
      if (record_moves) {
        trace.player_moves.push_back(f);
        trace.opponent_moves.push_back(z);
      }
    }
  } catch (const ValidationError& e) {
    rethrow_at(round, e);
  } catch (const UnsupportedError& e) {
    rethrow_at(round, e);
  } catch (const InfeasibleError& e) {
    rethrow_at(round, e);
  } catch (const BudgetError& e) {
    rethrow_at(round, e);
  } catch (const Error& e) {
    rethrow_at(round, e);
  }
  if (horizon == 0) return trace;
  if (std::holds_alternative<LinearLoss>(game.loss())) {
    const auto best = linmin(game.player_set(), history.sum);
    trace.benchmark_point = best.point;
    trace.benchmark_value = best.value;
  } else {
    const auto best = minimize_weighted(game.loss(), game.player_set(), history.points, history.counts);
    trace.benchmark_point = best.point;
    trace.benchmark_value = best.value;
  }
  trace.regret = trace.cumulative_loss - trace.benchmark_value;
  return trace;
}

MeanEstimate estimate_mean(const std::vector<double>& values) {
  MeanEstimate out;
  out.count = static_cast<int>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (const double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, int horizon, int trial) {
  return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(horizon)), static_cast<std::uint64_t>(trial));
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

MonteCarloResult monte_carlo(const Game& game, const Player& player, const Adversary& adversary, int horizon, int trials,
                             std::uint64_t seed, int threads) {
  if (trials < 1) throw ValidationError("monte_carlo: trials must be >= 1");
  MonteCarloResult out;
  out.trials.resize(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int i) {
    auto p = player.clone();
    auto a = adversary.clone();
    const std::uint64_t s = trial_seed(seed, horizon, i);
    const auto trace = run_game(game, *p, *a, horizon, s, false);
    out.trials[static_cast<std::size_t>(i)] = {horizon, i, s, trace.regret, trace.cumulative_loss, trace.benchmark_value};
  });
  std::vector<double> regrets;
  for (const auto& r : out.trials) regrets.push_back(r.regret);
  out.regret = estimate_mean(regrets);
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPower:
      return "power";
    case Verdict::kLogarithmic:
      return "logarithmic";
    case Verdict::kInconclusive:
      break;
  }
  return "inconclusive";
}

SweepResult fit_growth(const std::vector<int>& horizons, const std::vector<double>& mean_regret,
                       const std::vector<double>& std_error, const std::vector<int>& trials) {
  if (horizons.size() != mean_regret.size()) throw ValidationError("fit_growth: horizons and means differ in length");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    if (horizons[i] <= horizons[i - 1]) throw ValidationError("fit_growth: horizons must be strictly increasing");
  }
  SweepResult out;
  out.horizons = horizons;
  out.mean_regret = mean_regret;
  out.std_error = std_error.empty() ? std::vector<double>(horizons.size(), 0.0) : std_error;
  out.trials = trials.empty() ? std::vector<int>(horizons.size(), 1) : trials;
  const double nan = std::nan("");
  out.exponent = out.power_intercept = out.power_residual = nan;
  out.log_a = out.log_b = out.log_residual = nan;
  out.exponent_ci = {nan, nan};

  const bool positive = std::all_of(mean_regret.begin(), mean_regret.end(), [](double m) { return m > 0.0; });
  if (horizons.size() < 3 || !positive || horizons.front() < 1) return out;

  std::vector<double> lt, ly;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    lt.push_back(std::log(static_cast<double>(horizons[i])));
    ly.push_back(std::log(mean_regret[i]));
  }
  const Fit power = least_squares(lt, ly);
  const Fit logarithmic = least_squares(lt, mean_regret);
  const boost::math::students_t dist(static_cast<double>(horizons.size() - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  out.exponent = power.slope;
  out.power_intercept = power.intercept;
  out.exponent_ci = {power.slope - tq * power.slope_se, power.slope + tq * power.slope_se};
  out.log_a = logarithmic.intercept;
  out.log_b = logarithmic.slope;

  std::vector<double> pred_power, pred_log;
  for (const double x : lt) {
    pred_power.push_back(std::exp(power.intercept + power.slope * x));
    pred_log.push_back(logarithmic.intercept + logarithmic.slope * x);
  }
  out.power_residual = rms(mean_regret, pred_power);
  out.log_residual = rms(mean_regret, pred_log);

  // Residuals at the rounding level count as exact fits.
  const double scale = *std::max_element(mean_regret.begin(), mean_regret.end());
  const double floor = 1e-12 * scale;
  const double rp = out.power_residual <= floor ? 0.0 : out.power_residual;
  const double rl = out.log_residual <= floor ? 0.0 : out.log_residual;
  if (rp == 0.0 && rl == 0.0) {
    out.verdict = out.exponent < 0.2 ? Verdict::kLogarithmic : Verdict::kInconclusive;
  } else if (2.0 * rl <= rp) {
    out.verdict = Verdict::kLogarithmic;
  } else if (2.0 * rp <= rl) {
    out.verdict = Verdict::kPower;
  } else {
    out.verdict = out.exponent < 0.2 ? Verdict::kLogarithmic : Verdict::kInconclusive;
  }
  return out;
}

SweepResult run_sweep(const Game& game, const Player& player, const Adversary& adversary, const std::vector<int>& horizons,
                      int trials, std::uint64_t seed, int threads, std::vector<TrialRecord>* records) {
  if (horizons.empty()) throw ValidationError("run_sweep: no horizons");
  std::vector<double> means, errors;
  std::vector<int> counts;
  for (const int horizon : horizons) {
    auto mc = monte_carlo(game, player, adversary, horizon, trials, seed, threads);
    means.push_back(mc.regret.mean);
    errors.push_back(mc.regret.std_error);
    counts.push_back(mc.regret.count);
    if (records != nullptr) records->insert(records->end(), mc.trials.begin(), mc.trials.end());
  }
  return fit_growth(horizons, means, errors, counts);
}

HolderReport holder_check(const DecisionSet& set, const OpponentSet& zset, double q, int samples, std::uint64_t seed) {
  if (!(q >= 2.0 && q <= 3.0)) throw ValidationError("holder_check: q must lie in [2, 3]");
  if (samples < 1) throw ValidationError("holder_check: samples must be positive");
  if (dimension(zset) != dimension(set)) throw ValidationError("holder_check: Z and F dimensions differ");
  Rng rng(seed);
  HolderReport report;
  report.min_norm = kInf;
  const double exponent = 1.0 / (q - 1.0);
  for (int i = 0; i < samples; ++i) {
    const Vec z1 = sample_opponent(zset, rng);
    const Vec z2 = sample_opponent(zset, rng);
    report.min_norm = std::min({report.min_norm, z1.norm(), z2.norm()});
    if (z1.norm() < 1e-9 || z2.norm() < 1e-9) throw ValidationError("holder_check: sampled z is (numerically) zero");
    const double dz = (z1 - z2).norm();
    if (dz < 1e-6) continue;
    const double df = (linmin(set, z1).point - linmin(set, z2).point).norm();
    report.max_ratio = std::max(report.max_ratio, df / std::pow(dz, exponent));
    ++report.pairs;
  }
  report.analytic_bound = std::nan("");
  if (const auto* ball = std::get_if<L2Ball>(&set)) {
    double lower = kInf;
    if (const auto* zb = std::get_if<BallRegion>(&zset)) lower = zb->center.norm() - zb->radius;
    if (lower > 0.0 && std::isfinite(lower)) report.analytic_bound = ball->radius / lower;
  }
  return report;
}

MeanEstimate ct_surrogate(int horizon, int trials, std::uint64_t seed, int threads) {
  if (trials < 1) throw ValidationError("ct_surrogate: trials must be >= 1");
  const std::vector<double> c = ct_sequence(horizon);
  const Vec z_star = Vec::Unit(2, 0);
  const Vec e = Vec::Unit(2, 1);
  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int i) {
    auto state = make_ct_adversary(horizon, z_star, 1.0 / 32.0, e);
    Rng rng(trial_seed(seed, horizon, i));
    double drift = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const double bias = c[static_cast<std::size_t>(t)] * static_cast<double>(state.running_sum);
      drift += bias * bias;
      ct_step(state, rng);
    }
    const double s = static_cast<double>(state.running_sum);
    values[static_cast<std::size_t>(i)] = s * s / horizon - drift;
  });
  return estimate_mean(values);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trials_csv(const std::vector<TrialRecord>& records) {
  std::string out = "T,trial,seed,regret,cumulative_loss,benchmark\n";
  for (const auto& r : records) {
    out += std::to_string(r.horizon) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           format_double(r.regret) + ',' + format_double(r.cumulative_loss) + ',' + format_double(r.benchmark) + '\n';
  }
  return out;
}

std::string summary_json(const SweepResult& r) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"horizons\": " << json_array(r.horizons) << ",\n";
  out << "  \"mean_regret\": " << json_array(r.mean_regret) << ",\n";
  out << "  \"stderr\": " << json_array(r.std_error) << ",\n";
  out << "  \"trials\": " << json_array(r.trials) << ",\n";
  out << "  \"exponent\": " << json_number(r.exponent) << ",\n";
  out << "  \"exponent_ci\": [" << json_number(r.exponent_ci[0]) << ", " << json_number(r.exponent_ci[1]) << "],\n";
  out << "  \"power_fit\": {\"intercept\": " << json_number(r.power_intercept)
      << ", \"residual\": " << json_number(r.power_residual) << "},\n";
  out << "  \"log_fit\": {\"a\": " << json_number(r.log_a) << ", \"b\": " << json_number(r.log_b)
      << ", \"residual\": " << json_number(r.log_residual) << "},\n";
  out << "  \"verdict\": \"" << verdict_name(r.verdict) << "\"\n";
  out << "}\n";
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + temp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw Error("write to " + temp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(temp, ignored);
    throw Error("cannot rename " + temp.string() + " to " + target.string() + ": " + ec.message());
  }
}

}  // namespace oco
