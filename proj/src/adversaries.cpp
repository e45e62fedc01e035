#include "oco/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oco/epigraph.hpp"
#include "oco/minimax.hpp"

namespace oco {
namespace {

constexpr double kProbTol = 1e-9;
constexpr int kBisectionSteps = 60;

void check_distribution(const std::vector<double>& p, std::size_t n, const char* where) {
  if (p.size() != n) throw ValidationError(std::string(where) + ": distribution length does not match the support");
  double total = 0.0;
  for (const double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(where) + ": probabilities must be >= 0");
    total += x;
  }
  if (std::abs(total - 1.0) > kProbTol) {
    throw ValidationError(std::string(where) + ": probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

double expected_loss(const Game& game, const std::vector<Vec>& zs, const std::vector<double>& p, const Vec& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (p[i] != 0.0) total += p[i] * game.evaluate(zs[i], f);
  }
  return total;
}

std::vector<double> mix(const std::vector<double>& p0, const std::vector<double>& p1, double alpha) {
  std::vector<double> out(p0.size());
  for (std::size_t i = 0; i < p0.size(); ++i) out[i] = (1.0 - alpha) * p0[i] + alpha * p1[i];
  return out;
}

bool same_class(const Game& game, const std::vector<Vec>& zs, const Vec& a, const Vec& b) {
  for (const auto& z : zs) {
    if (std::abs(game.evaluate(z, a) - game.evaluate(z, b)) > 1e-7) return false;
  }
  return true;
}

}  // namespace

Vec iid_step(const std::vector<Vec>& points, const std::vector<double>& p, Rng& rng) {
  if (points.empty()) throw ValidationError("iid_step: empty support");
  check_distribution(p, points.size(), "iid_step");
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    last = i;
    cumulative += p[i];
    if (u < cumulative) return points[i];
  }
  return points[last];
}

void validate_equalizer(const EqualizerConfig& cfg, const Game& game) {
  if (!std::holds_alternative<LinearLoss>(game.loss())) throw ValidationError("equalizer: requires the linear loss");
  const auto d = game.dim_z();
  if (cfg.z.size() != d || cfg.e.size() != d || cfg.f1.size() != d || cfg.f2.size() != d) {
    throw ValidationError("equalizer: z, e, f1, f2 must all have dimension " + std::to_string(d));
  }
  if (std::abs(cfg.e.norm() - 1.0) > 1e-9) throw ValidationError("equalizer: e must be a unit vector");
  if (!(cfg.eps > 0.0)) throw ValidationError("equalizer: eps must be positive");
  if (!contains(game.opponents(), cfg.z + cfg.eps * cfg.e) || !contains(game.opponents(), cfg.z - cfg.eps * cfg.e)) {
    throw ValidationError("equalizer: z +- eps e must lie in Z");
  }
  const double best = linmin(game.player_set(), cfg.z).value;
  for (const Vec* f : {&cfg.f1, &cfg.f2}) {
    if (!contains(game.player_set(), *f)) throw ValidationError("equalizer: f1 and f2 must lie in F");
    if (cfg.z.dot(*f) > best + 1e-9) throw ValidationError("equalizer: f1 and f2 must minimize z.f over F");
  }
  if (std::abs(cfg.f1.dot(cfg.e) - cfg.f2.dot(cfg.e)) <= 1e-9) {
    throw ValidationError("equalizer: f1 and f2 must differ along e");
  }
}

EqualizerConfig synthesize_equalizer(const Game& game, double eps) {
  const auto* zbox = std::get_if<BoxRegion>(&game.opponents());
  if (zbox == nullptr || !std::holds_alternative<LinearLoss>(game.loss())) {
    throw UnsupportedError("synthesize_equalizer: needs the linear loss and a box Z; supply (z, e, f1, f2) instead");
  }
  const auto d = game.dim_z();
  EqualizerConfig cfg;
  cfg.eps = eps;
  if (const auto* s = std::get_if<Simplex>(&game.player_set()); s != nullptr && s->dim >= 2) {
    const double lo = std::max(zbox->lo(0), zbox->lo(1));
    const double hi = std::min(zbox->hi(0), zbox->hi(1));
    if (lo > hi) throw UnsupportedError("synthesize_equalizer: Z has no point with z_1 = z_2");
    const double m = 0.5 * (lo + hi);
    cfg.z = zbox->hi;
    cfg.z(0) = m;
    cfg.z(1) = m;
    cfg.e = (Vec::Unit(d, 0) - Vec::Unit(d, 1)) / std::sqrt(2.0);
    cfg.f1 = Vec::Unit(d, 0);
    cfg.f2 = Vec::Unit(d, 1);
  } else if (const auto* b = std::get_if<Box>(&game.player_set())) {
    Eigen::Index i = 0;
    while (i < d && b->lo(i) == b->hi(i)) ++i;
    if (i == d) throw UnsupportedError("synthesize_equalizer: F is a single point");
    cfg.z = Vec::Zero(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == i) continue;
      cfg.z(j) = zbox->hi(j) > 0.0 ? zbox->hi(j) : (zbox->lo(j) < 0.0 ? zbox->lo(j) : 0.0);
    }
    cfg.e = Vec::Unit(d, i);
    cfg.f1 = linmin(game.player_set(), cfg.z).point;
    cfg.f1(i) = b->lo(i);
    cfg.f2 = cfg.f1;
    cfg.f2(i) = b->hi(i);
  } else {
    throw UnsupportedError("synthesize_equalizer: automated only for simplex and box F");
  }
  validate_equalizer(cfg, game);
  return cfg;
}

Vec equalizer_step(const EqualizerConfig& cfg, Rng& rng) {
  const double sigma = rng.coin() ? 1.0 : -1.0;
  return cfg.z + (sigma * cfg.eps) * cfg.e;
}

std::vector<double> ct_sequence(int horizon) {
  if (horizon < 1) throw ValidationError("ct_sequence: horizon must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(horizon));
  c.back() = 1.0 / horizon;
  for (int t = horizon - 1; t >= 1; --t) {
    const double next = c[static_cast<std::size_t>(t)];
    c[static_cast<std::size_t>(t - 1)] = next + next * next;
  }
  return c;
}

CtAdversaryState make_ct_adversary(int horizon, const Vec& z_star, double alpha, const Vec& e) {
  if (z_star.size() != e.size() || z_star.size() == 0) throw ValidationError("ct adversary: z* and e must share a dimension");
  if (std::abs(e.norm() - 1.0) > 1e-9) throw ValidationError("ct adversary: e must be a unit vector");
  if (std::abs(e.dot(z_star)) > 1e-9) throw ValidationError("ct adversary: e must be orthogonal to z*");
  if (!(alpha > 0.0 && alpha <= 1.0 / 32.0)) throw ValidationError("ct adversary: alpha must lie in (0, 1/32]");
  CtAdversaryState state;
  state.horizon = horizon;
  state.c = ct_sequence(horizon);
  state.z_star = z_star;
  state.alpha = alpha;
  state.e = e;
  return state;
}

Vec ct_step(CtAdversaryState& state, Rng& rng, int* sign) {
  if (state.round >= state.horizon) {
    throw Error("ct adversary: called past the horizon T = " + std::to_string(state.horizon));
  }
  const double c = state.c[static_cast<std::size_t>(state.round)];
  const double up = 0.5 * (1.0 + c * static_cast<double>(state.running_sum));
  const int w = rng.uniform() < up ? 1 : -1;
  state.running_sum += w;
  ++state.round;
  if (sign != nullptr) *sign = w;
  return state.z_star + (w * state.alpha * state.z_star.norm()) * state.e;
}

CriticalAlpha critical_alpha(const Game& game, const std::optional<std::vector<double>>& p1_override) {
  if (!is_finite(game.opponents())) throw UnsupportedError("critical_alpha: requires a finite opponent set");
  if (!is_polyhedral(game.player_set())) throw UnsupportedError("critical_alpha: requires a polyhedral F");
  const auto& zs = std::get<FinitePoints>(game.opponents()).points;
  const auto n = zs.size();
  if (is_trivial(game).trivial) throw ValidationError("critical_alpha: the game is trivial");

  const LossFunction& loss = game.loss();
  const DecisionSet& set = game.player_set();
  const std::vector<double> p0(n, 1.0 / static_cast<double>(n));
  CriticalAlpha out;

  const auto at0 = minimize_weighted(loss, set, zs, p0);
  if (const auto spread = optimal_face_spread(loss, set, zs, p0, at0.value, at0.point); spread.split) {
    out.alpha = 0.0;
    out.p = p0;
    out.f_a = at0.point;
    out.f_b = spread.lower_point;
    return out;
  }

  std::vector<double> p1;
  if (p1_override) {
    check_distribution(*p1_override, n, "critical_alpha");
    p1 = *p1_override;
  } else {
    // Witness z_k where the p_0 optimum f* is beaten by f**.
    Vec f_star2;
    for (std::size_t k = 0; k < n && out.k < 0; ++k) {
      const auto best = minimize_weighted(loss, set, {zs[k]}, {1.0});
      if (best.value < game.evaluate(zs[k], at0.point) - 1e-9) {
        out.k = static_cast<int>(k);
        f_star2 = best.point;
      }
    }
    if (out.k < 0) throw Error("critical_alpha: no z beats the uniform-mixture optimum");
    double eps = 0.5 / static_cast<double>(n - 1);
    for (int halving = 0; halving < 200; ++halving, eps *= 0.5) {
      p1.assign(n, eps);
      p1[static_cast<std::size_t>(out.k)] = 1.0 - static_cast<double>(n - 1) * eps;
      if (expected_loss(game, zs, p1, f_star2) < expected_loss(game, zs, p1, at0.point) - 1e-12) break;
    }
    out.eps = eps;
  }

  const auto at1 = minimize_weighted(loss, set, zs, p1);
  if (same_class(game, zs, at1.point, at0.point)) {
    throw Error("critical_alpha: the p_1 optimum is equivalent to the p_0 optimum; p_1 does not separate the classes");
  }
  if (const auto spread = optimal_face_spread(loss, set, zs, p1, at1.value, at1.point); spread.split) {
    out.alpha = 1.0;
    out.p = p1;
    out.f_a = at1.point;
    out.f_b = spread.lower_point;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  Vec f_lo = at0.point;
  Vec f_hi = at1.point;
  for (int step = 0; step < kBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const auto opt = minimize_weighted(loss, set, zs, mix(p0, p1, mid));
    if (same_class(game, zs, opt.point, at0.point)) {
      lo = mid;
      f_lo = opt.point;
    } else {
      hi = mid;
      f_hi = opt.point;
    }
  }
  // The expected-loss difference of the two classes is affine in alpha; its root is the breakpoint.
  const double g0 = expected_loss(game, zs, p0, f_lo) - expected_loss(game, zs, p0, f_hi);
  const double g1 = expected_loss(game, zs, p1, f_lo) - expected_loss(game, zs, p1, f_hi);
  double alpha = 0.5 * (lo + hi);
  if (g0 != g1) alpha = std::clamp(g0 / (g0 - g1), lo, hi);

  out.alpha = alpha;
  out.p = mix(p0, p1, alpha);
  out.f_a = f_lo;
  out.f_b = f_hi;
  const auto report = mixture_certificate(game, out.p, f_lo, f_hi);
  if (!report.pass) {
    std::ostringstream msg;
    msg << "critical_alpha: bisection did not certify two optimal classes near alpha = " << alpha << " (" << report.detail
        << ")";
    throw Error(msg.str());
  }
  return out;
}

MixtureCertificate mixture_certificate(const Game& game, const std::vector<double>& p, const Vec& f1, const Vec& f2) {
  MixtureCertificate report;
  if (!is_finite(game.opponents())) {
    report.detail = "opponent set is not finite";
    return report;
  }
  const auto& zs = std::get<FinitePoints>(game.opponents()).points;
  try {
    check_distribution(p, zs.size(), "mixture_certificate");
  } catch (const ValidationError& e) {
    report.detail = e.what();
    return report;
  }
  std::vector<Vec> support;
  std::vector<double> weights;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (p[i] > 0.0) {
      support.push_back(zs[i]);
      weights.push_back(p[i]);
    }
  }
  report.value = minimize_weighted(game.loss(), game.player_set(), support, weights).value;
  report.gap_a = expected_loss(game, zs, p, f1) - report.value;
  report.gap_b = expected_loss(game, zs, p, f2) - report.value;
  std::ostringstream detail;
  if (std::abs(report.gap_a) > 1e-6 || std::abs(report.gap_b) > 1e-6) {
    detail << "not both optimal: excess " << report.gap_a << ", " << report.gap_b;
    report.detail = detail.str();
    return report;
  }
  for (const auto& z : support) {
    if (std::abs(game.evaluate(z, f1) - game.evaluate(z, f2)) > 1e-9) {
      report.pass = true;
      report.detail = "ok";
      return report;
    }
  }
  report.detail = "f1 and f2 have equal losses on the support";
  return report;
}

IidFiniteAdversary::IidFiniteAdversary(std::vector<Vec> points, std::vector<double> p)
    : points_(std::move(points)), p_(std::move(p)) {
  if (points_.empty()) throw ValidationError("iid_finite: empty support");
  check_distribution(p_, points_.size(), "iid_finite");
}

Vec IidSphereAdversary::next(const Game&, Rng& rng) {
  Vec g(center_.size());
  for (auto& x : g) x = rng.normal();
  return center_ + (radius_ / g.norm()) * g;
}

CtAdversary::CtAdversary(Vec z_star, double alpha, Vec e) : z_star_(std::move(z_star)), alpha_(alpha), e_(std::move(e)) {
  make_ct_adversary(1, z_star_, alpha_, e_);
}

FixedAdversary::FixedAdversary(std::vector<Vec> sequence) : sequence_(std::move(sequence)) {
  if (sequence_.empty()) throw ValidationError("fixed adversary: empty sequence");
}

}  // namespace oco
