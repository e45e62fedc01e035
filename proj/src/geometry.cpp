#include "oco/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oco/lp.hpp"

namespace oco {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void require_dim(const DecisionSet& set, const Vec& v, const char* what) {
  if (v.size() != dimension(set)) {
    throw ValidationError(std::string(what) + ": vector has dimension " + std::to_string(v.size()) + ", set " +
                          kind_name(set) + " has dimension " + std::to_string(dimension(set)));
  }
}

double dual_exponent(double p) { return p / (p - 1.0); }

Vec dirichlet(std::size_t k, Rng& rng) {
  Vec w(static_cast<Eigen::Index>(k));
  for (auto& x : w) x = rng.exponential();
  return w / w.sum();
}

Vec gaussian(int d, Rng& rng) {
  Vec v(d);
  for (auto& x : v) x = rng.normal();
  return v;
}

Vec project_simplex(const Vec& y) {
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (y.array() - theta).max(0.0).matrix();
}

// Solves g + mu p g^(p-1) = a for g in [0, a].
double shrink_coordinate(double a, double mu, double p) {
  double lo = 0.0;
  double hi = a;
  for (int i = 0; i < 100 && hi - lo > 1e-16 * std::max(1.0, a); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid + mu * p * std::pow(mid, p - 1.0) > a) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vec project_lp_ball(const LpBall& ball, const Vec& y) {
  if (lp_norm(y, ball.p) <= ball.radius) return y;
  if (ball.radius == 0.0) return Vec::Zero(y.size());
  const Vec a = y.cwiseAbs();
  const double target = std::pow(ball.radius, ball.p);
  auto mass = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += std::pow(shrink_coordinate(a(i), mu, ball.p), ball.p);
    return s;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (mass(hi) > target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double g = shrink_coordinate(a(i), hi, ball.p);
    out(i) = y(i) < 0.0 ? -g : g;
  }
  return out;
}

Vec project_ellipsoid(const Ellipsoid& e, const Vec& y) {
  const Vec d = y - e.center;
  if (d.dot(e.shape * d) <= e.radius * e.radius) return y;
  Eigen::SelfAdjointEigenSolver<Mat> eig(e.shape);
  const Vec lambda = eig.eigenvalues();
  const Vec coords = eig.eigenvectors().transpose() * d;
  const double r2 = e.radius * e.radius;
  auto level = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < coords.size(); ++i) {
      const double x = coords(i) / (1.0 + mu * lambda(i));
      s += lambda(i) * x * x;
    }
    return s;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (level(hi) > r2) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (level(mid) > r2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vec x(coords.size());
  for (Eigen::Index i = 0; i < coords.size(); ++i) x(i) = coords(i) / (1.0 + hi * lambda(i));
  return e.center + eig.eigenvectors() * x;
}

// Max-norm distance from f to conv(points) via LP.
double hull_residual(const std::vector<Vec>& points, const Vec& f) {
  const auto k = static_cast<Eigen::Index>(points.size());
  const auto d = f.size();
  // Variables: lambda (k), t.
  LinearProgram prog;
  prog.objective = Vec::Zero(k + 1);
  prog.objective(k) = 1.0;
  prog.A = Mat::Zero(2 * d + 2, k + 1);
  prog.b = Vec::Zero(2 * d + 2);
  for (Eigen::Index j = 0; j < k; ++j) {
    prog.A.block(0, j, d, 1) = points[static_cast<std::size_t>(j)];
    prog.A.block(d, j, d, 1) = -points[static_cast<std::size_t>(j)];
    prog.A(2 * d, j) = 1.0;
    prog.A(2 * d + 1, j) = -1.0;
  }
  prog.A.block(0, k, d, 1).setConstant(-1.0);
  prog.A.block(d, k, d, 1).setConstant(-1.0);
  prog.b.head(d) = f;
  prog.b.segment(d, d) = -f;
  prog.b(2 * d) = 1.0;
  prog.b(2 * d + 1) = -1.0;
  prog.lower = Vec::Zero(k + 1);
  const auto outcome = solve_lp(prog);
  if (!is_optimal(outcome)) throw Error("contains: hull membership LP failed");
  return std::max(0.0, std::get<LpOptimal>(outcome).value);
}

}  // namespace

void validate(const DecisionSet& set) {
  std::visit(Overloaded{
                 [](const VertexPolytope& s) {
                   require(!s.points.empty(), "vertex_polytope: needs at least one point");
                   const auto d = s.points.front().size();
                   require(d > 0, "vertex_polytope: points must have positive dimension");
                   for (const auto& p : s.points) {
                     require(p.size() == d, "vertex_polytope: points have mixed dimensions");
                     require(p.allFinite(), "vertex_polytope: non-finite coordinate");
                   }
                 },
                 [](const Simplex& s) { require(s.dim >= 1, "simplex: dimension must be positive"); },
                 [](const Box& s) {
                   require(s.lo.size() >= 1 && s.lo.size() == s.hi.size(), "box: lo and hi must share a positive dimension");
                   require(s.lo.allFinite() && s.hi.allFinite(), "box: bounds must be finite");
                   require((s.lo.array() <= s.hi.array()).all(), "box: lo must not exceed hi");
                 },
                 [](const Interval& s) {
                   require(std::isfinite(s.lo) && std::isfinite(s.hi), "interval: bounds must be finite");
                   require(s.lo <= s.hi, "interval: lo must not exceed hi");
                 },
                 [](const L2Ball& s) {
                   require(s.center.size() >= 1 && s.center.allFinite(), "l2_ball: centre must be a finite vector");
                   require(std::isfinite(s.radius) && s.radius >= 0.0, "l2_ball: radius must be >= 0");
                 },
                 [](const LpBall& s) {
                   require(s.p >= 2.0 && s.p <= 3.0, "lp_ball: p must lie in [2, 3]");
                   require(std::isfinite(s.radius) && s.radius >= 0.0, "lp_ball: radius must be >= 0");
                   require(s.dim >= 1, "lp_ball: dimension must be positive");
                 },
                 [](const Ellipsoid& s) {
                   const auto d = s.center.size();
                   require(d >= 1 && s.center.allFinite(), "sublevel: centre must be a finite vector");
                   require(s.shape.rows() == d && s.shape.cols() == d, "sublevel: shape must be square and match the centre");
                   require(s.shape.allFinite() && (s.shape - s.shape.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
                           "sublevel: shape must be symmetric");
                   require(Eigen::LLT<Mat>(s.shape).info() == Eigen::Success, "sublevel: shape must be positive definite");
                   require(std::isfinite(s.radius) && s.radius >= 0.0, "sublevel: radius must be >= 0");
                 },
             },
             set);
}

int dimension(const DecisionSet& set) {
  return std::visit(Overloaded{
                        [](const VertexPolytope& s) { return static_cast<int>(s.points.front().size()); },
                        [](const Simplex& s) { return s.dim; },
                        [](const Box& s) { return static_cast<int>(s.lo.size()); },
                        [](const Interval&) { return 1; },
                        [](const L2Ball& s) { return static_cast<int>(s.center.size()); },
                        [](const LpBall& s) { return s.dim; },
                        [](const Ellipsoid& s) { return static_cast<int>(s.center.size()); },
                    },
                    set);
}

std::string kind_name(const DecisionSet& set) {
  static const char* const names[] = {"vertex_polytope", "simplex", "box", "interval", "l2_ball", "lp_ball", "sublevel"};
  return names[set.index()];
}

bool is_polyhedral(const DecisionSet& set) {
  return std::holds_alternative<VertexPolytope>(set) || std::holds_alternative<Simplex>(set) ||
         std::holds_alternative<Box>(set) || std::holds_alternative<Interval>(set);
}

LinminResult linmin(const DecisionSet& set, const Vec& z) {
  require_dim(set, z, "linmin");
  return std::visit(
      Overloaded{
          [&](const VertexPolytope& s) {
            std::size_t best = 0;
            double value = z.dot(s.points[0]);
            for (std::size_t i = 1; i < s.points.size(); ++i) {
              const double v = z.dot(s.points[i]);
              if (v < value) {
                value = v;
                best = i;
              }
            }
            return LinminResult{s.points[best], value};
          },
          [&](const Simplex& s) {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < s.dim; ++i) {
              if (z(i) < z(best)) best = i;
            }
            return LinminResult{Vec::Unit(s.dim, best), z(best)};
          },
          [&](const Box& s) {
            Vec f(s.lo.size());
            for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = z(i) < 0.0 ? s.hi(i) : s.lo(i);
            return LinminResult{f, z.dot(f)};
          },
          [&](const Interval& s) {
            const double f = z(0) < 0.0 ? s.hi : s.lo;
            return LinminResult{Vec::Constant(1, f), z(0) * f};
          },
          [&](const L2Ball& s) {
            const double n = z.norm();
            if (n == 0.0) return LinminResult{s.center, 0.0};
            Vec f = s.center - (s.radius / n) * z;
            return LinminResult{f, z.dot(f)};
          },
          [&](const LpBall& s) {
            const double q = dual_exponent(s.p);
            const double n = lp_norm(z, q);
            if (n == 0.0) return LinminResult{Vec::Zero(s.dim), 0.0};
            const double scale = s.radius / std::pow(n, q - 1.0);
            Vec f(s.dim);
            for (Eigen::Index i = 0; i < s.dim; ++i) {
              const double mag = std::pow(std::abs(z(i)), q - 1.0);
              f(i) = z(i) > 0.0 ? -scale * mag : (z(i) < 0.0 ? scale * mag : 0.0);
            }
            return LinminResult{f, z.dot(f)};
          },
          [&](const Ellipsoid& s) {
            if (z.isZero(0.0)) return LinminResult{s.center, 0.0};
            const Vec w = Eigen::LLT<Mat>(s.shape).solve(z);
            const double n = std::sqrt(z.dot(w));
            Vec f = s.center - (s.radius / n) * w;
            return LinminResult{f, z.dot(f)};
          },
      },
      set);
}

Vec default_point(const DecisionSet& set) { return linmin(set, Vec::Zero(dimension(set))).point; }

bool contains(const DecisionSet& set, const Vec& f, double tol) {
  if (f.size() != dimension(set) || !f.allFinite()) return false;
  if (const auto* s = std::get_if<VertexPolytope>(&set)) {
    for (const auto& p : s->points) {
      if ((p - f).norm() <= tol) return true;
    }
    return hull_residual(s->points, f) <= tol;
  }
  if (const auto* s = std::get_if<LpBall>(&set)) return lp_norm(f, s->p) <= s->radius + tol;
  return (project(set, f) - f).norm() <= tol;
}

std::vector<Vec> vertices(const DecisionSet& set) {
  return std::visit(
      Overloaded{
          [](const VertexPolytope& s) {
            std::vector<Vec> unique;
            for (const auto& p : s.points) {
              const bool seen =
                  std::any_of(unique.begin(), unique.end(), [&](const Vec& u) { return (u - p).norm() <= 1e-12; });
              if (!seen) unique.push_back(p);
            }
            if (unique.size() <= 2) return unique;
            std::vector<Vec> extreme;
            for (std::size_t i = 0; i < unique.size(); ++i) {
              std::vector<Vec> others;
              for (std::size_t j = 0; j < unique.size(); ++j) {
                if (j != i) others.push_back(unique[j]);
              }
              if (hull_residual(others, unique[i]) > kMembershipTol) extreme.push_back(unique[i]);
            }
            return extreme;
          },
          [](const Simplex& s) {
            std::vector<Vec> out;
            for (int i = 0; i < s.dim; ++i) out.push_back(Vec::Unit(s.dim, i));
            return out;
          },
          [](const Box& s) {
            const auto d = s.lo.size();
            if (d > 20) throw UnsupportedError("vertices: box dimension " + std::to_string(d) + " exceeds 20");
            std::vector<Vec> out;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
              Vec v = s.lo;
              for (Eigen::Index i = 0; i < d; ++i) {
                if ((mask >> i) & 1U) v(i) = s.hi(i);
              }
              const bool seen = std::any_of(out.begin(), out.end(), [&](const Vec& u) { return u == v; });
              if (!seen) out.push_back(v);
            }
            return out;
          },
          [](const Interval& s) {
            std::vector<Vec> out{Vec::Constant(1, s.lo)};
            if (s.hi > s.lo) out.push_back(Vec::Constant(1, s.hi));
            return out;
          },
          [&](const auto&) -> std::vector<Vec> {
            throw UnsupportedError("vertices: " + kind_name(set) + " has infinitely many extreme points");
          },
      },
      set);
}

Vec project(const DecisionSet& set, const Vec& y) {
  require_dim(set, y, "project");
  return std::visit(
      Overloaded{
          [&](const VertexPolytope&) -> Vec {
            throw UnsupportedError("project: vertex_polytope projection is not implemented");
          },
          [&](const Simplex&) { return project_simplex(y); },
          [&](const Box& s) { return Vec(y.cwiseMax(s.lo).cwiseMin(s.hi)); },
          [&](const Interval& s) { return Vec(Vec::Constant(1, std::clamp(y(0), s.lo, s.hi))); },
          [&](const L2Ball& s) {
            const Vec d = y - s.center;
            const double n = d.norm();
            if (n <= s.radius) return y;
            return Vec(s.center + (s.radius / n) * d);
          },
          [&](const LpBall& s) { return project_lp_ball(s, y); },
          [&](const Ellipsoid& s) { return project_ellipsoid(s, y); },
      },
      set);
}

Vec sample_point(const DecisionSet& set, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const VertexPolytope& s) {
                          const Vec w = dirichlet(s.points.size(), rng);
                          Vec f = Vec::Zero(s.points.front().size());
                          for (std::size_t i = 0; i < s.points.size(); ++i) {
                            f += w(static_cast<Eigen::Index>(i)) * s.points[i];
                          }
                          return f;
                        },
                        [&](const Simplex& s) { return dirichlet(static_cast<std::size_t>(s.dim), rng); },
                        [&](const Box& s) {
                          Vec f(s.lo.size());
                          for (Eigen::Index i = 0; i < f.size(); ++i) {
                            f(i) = s.lo(i) + rng.uniform() * (s.hi(i) - s.lo(i));
                          }
                          return f;
                        },
                        [&](const Interval& s) { return Vec(Vec::Constant(1, s.lo + rng.uniform() * (s.hi - s.lo))); },
                        [&](const L2Ball& s) {
                          const auto d = static_cast<int>(s.center.size());
                          Vec g = gaussian(d, rng);
                          const double r = s.radius * std::pow(rng.uniform(), 1.0 / d);
                          return Vec(s.center + (r / g.norm()) * g);
                        },
                        [&](const LpBall& s) {
                          Vec g = gaussian(s.dim, rng);
                          const double r = s.radius * std::pow(rng.uniform(), 1.0 / s.dim);
                          return Vec((r / lp_norm(g, s.p)) * g);
                        },
                        [&](const Ellipsoid& s) {
                          const auto d = static_cast<int>(s.center.size());
                          Vec g = gaussian(d, rng);
                          g *= std::pow(rng.uniform(), 1.0 / d) / g.norm();
                          const Eigen::LLT<Mat> llt(s.shape);
                          const Vec offset = llt.matrixU().solve(g);
                          return Vec(s.center + s.radius * offset);
                        },
                    },
                    set);
}

double diameter(const DecisionSet& set) {
  return std::visit(Overloaded{
                        [](const VertexPolytope& s) {
                          double best = 0.0;
                          for (std::size_t i = 0; i < s.points.size(); ++i) {
                            for (std::size_t j = i + 1; j < s.points.size(); ++j) {
                              best = std::max(best, (s.points[i] - s.points[j]).norm());
                            }
                          }
                          return best;
                        },
                        [](const Simplex& s) { return s.dim >= 2 ? std::sqrt(2.0) : 0.0; },
                        [](const Box& s) { return (s.hi - s.lo).norm(); },
                        [](const Interval& s) { return s.hi - s.lo; },
                        [](const L2Ball& s) { return 2.0 * s.radius; },
                        [](const LpBall& s) { return 2.0 * s.radius * std::pow(s.dim, 0.5 - 1.0 / s.p); },
                        [](const Ellipsoid& s) {
                          Eigen::SelfAdjointEigenSolver<Mat> eig(s.shape, Eigen::EigenvaluesOnly);
                          return 2.0 * s.radius / std::sqrt(eig.eigenvalues()(0));
                        },
                    },
                    set);
}

double lp_norm(const Vec& v, double p) {
  if (p == 2.0) return v.norm();
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (const double x : v) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

Mat span_basis(const std::vector<Vec>& points, double drop) {
  if (points.empty()) return Mat(0, 0);
  const auto d = points.front().size();
  std::vector<Vec> basis;
  for (const auto& p : points) {
    if (p.size() != d) throw ValidationError("span_basis: points have mixed dimensions");
    Vec r = p;
    for (const auto& q : basis) r -= q.dot(r) * q;
    const double n = r.norm();
    if (n > drop) basis.push_back(r / n);
  }
  Mat out(d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = basis[i];
  return out;
}

}  // namespace oco
