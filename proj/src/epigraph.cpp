#include "oco/epigraph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "oco/lp.hpp"

namespace oco {
namespace {

// LP over a polyhedral F parametrised as f = M u + m0, plus auxiliary variables.
class EpigraphLp {
 public:
  explicit EpigraphLp(const DecisionSet& set) {
    if (const auto* s = std::get_if<Simplex>(&set)) {
      M_ = Mat::Identity(s->dim, s->dim);
      m0_ = Vec::Zero(s->dim);
      lower_.assign(static_cast<std::size_t>(s->dim), 0.0);
      upper_.assign(static_cast<std::size_t>(s->dim), kInf);
      add_sum_to_one(s->dim);
    } else if (const auto* s = std::get_if<Box>(&set)) {
      const auto d = s->lo.size();
      M_ = Mat::Identity(d, d);
      m0_ = Vec::Zero(d);
      lower_.assign(s->lo.data(), s->lo.data() + d);
      upper_.assign(s->hi.data(), s->hi.data() + d);
    } else if (const auto* s = std::get_if<Interval>(&set)) {
      M_ = Mat::Identity(1, 1);
      m0_ = Vec::Zero(1);
      lower_ = {s->lo};
      upper_ = {s->hi};
    } else if (const auto* s = std::get_if<VertexPolytope>(&set)) {
      const auto k = static_cast<Eigen::Index>(s->points.size());
      M_ = Mat(s->points.front().size(), k);
      for (Eigen::Index j = 0; j < k; ++j) M_.col(j) = s->points[static_cast<std::size_t>(j)];
      m0_ = Vec::Zero(M_.rows());
      lower_.assign(static_cast<std::size_t>(k), 0.0);
      upper_.assign(static_cast<std::size_t>(k), kInf);
      add_sum_to_one(k);
    } else {
      throw UnsupportedError("epigraph LP: " + kind_name(set) + " is not polyhedral");
    }
    objective_f_ = Vec::Zero(M_.cols());
  }

  int add_var(double lo, double hi) {
    lower_.push_back(lo);
    upper_.push_back(hi);
    return static_cast<int>(lower_.size()) - 1;
  }

  // f_coef.f + sum var_coef <= rhs.
  void add_row(const Vec& f_coef, std::vector<std::pair<int, double>> var_coef, double rhs) {
    rows_.push_back({M_.transpose() * f_coef, std::move(var_coef), rhs - f_coef.dot(m0_)});
  }

  // New variable q with q >= slope.f + offset for every piece.
  int add_max_group(const std::vector<AffinePiece>& pieces) {
    const int q = add_var(-kInf, kInf);
    for (const auto& piece : pieces) add_row(piece.slope, {{q, -1.0}}, -piece.offset);
    return q;
  }

  void add_objective_f(const Vec& f_coef) {
    objective_f_ += M_.transpose() * f_coef;
    constant_ += f_coef.dot(m0_);
  }
  void add_objective_var(int var, double coef) { objective_vars_.emplace_back(var, coef); }

  // (f, value) at the optimum; nullopt if infeasible. Throws if unbounded.
  std::optional<std::pair<Vec, double>> solve() const {
    const auto m = M_.cols();
    const auto n = static_cast<Eigen::Index>(lower_.size());
    LinearProgram prog;
    prog.objective = Vec::Zero(n);
    prog.objective.head(m) = objective_f_;
    for (const auto& [var, coef] : objective_vars_) prog.objective(var) += coef;
    prog.A = Mat::Zero(static_cast<Eigen::Index>(rows_.size()), n);
    prog.b = Vec(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const auto i = static_cast<Eigen::Index>(r);
      if (rows_[r].u_coef.size() == m) prog.A.row(i).head(m) = rows_[r].u_coef.transpose();
      for (const auto& [var, coef] : rows_[r].var_coef) prog.A(i, var) += coef;
      prog.b(i) = rows_[r].rhs;
    }
    prog.lower = Eigen::Map<const Vec>(lower_.data(), n);
    prog.upper = Eigen::Map<const Vec>(upper_.data(), n);
    auto outcome = solve_lp(prog);
    if (std::holds_alternative<LpInfeasible>(outcome)) return std::nullopt;
    if (std::holds_alternative<LpUnbounded>(outcome)) throw Error("epigraph LP: unbounded (loss unbounded below on F)");
    const auto& opt = std::get<LpOptimal>(outcome);
    return std::pair{Vec(M_ * opt.x.head(m) + m0_), opt.value + constant_};
  }

  Eigen::Index param_dim() const { return M_.cols(); }

 private:
  struct Row {
    Vec u_coef;
    std::vector<std::pair<int, double>> var_coef;
    double rhs;
  };

  void add_sum_to_one(Eigen::Index k) {
    rows_.push_back({Vec::Ones(k), {}, 1.0});
    rows_.push_back({-Vec::Ones(k), {}, -1.0});
  }

  Mat M_;
  Vec m0_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Row> rows_;
  Vec objective_f_;
  std::vector<std::pair<int, double>> objective_vars_;
  double constant_ = 0.0;
};

void check_inputs(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs, std::size_t n) {
  if (zs.empty()) throw ValidationError("minimize: z sequence is empty");
  if (zs.size() != n) throw ValidationError("minimize: z and weight lists differ in length");
  const auto [dz, df] = loss_dims(loss);
  if (df != dimension(set)) throw ValidationError("minimize: loss and decision set dimensions differ");
  for (const auto& z : zs) {
    if (z.size() != dz) throw ValidationError("minimize: z has the wrong dimension");
  }
}

std::vector<MaxAffineSum> all_pieces(const LossFunction& loss, const std::vector<Vec>& zs) {
  std::vector<MaxAffineSum> out;
  for (const auto& z : zs) {
    auto pieces = affine_pieces(loss, z);
    if (!pieces) return {};
    out.push_back(std::move(*pieces));
  }
  return out;
}

double piecewise_value(const MaxAffineSum& groups, const Vec& f) {
  double total = 0.0;
  for (const auto& group : groups) {
    double best = -kInf;
    for (const auto& piece : group) best = std::max(best, piece.slope.dot(f) + piece.offset);
    total += best;
  }
  return total;
}

Minimizer scan_interval(const Interval& interval, const std::vector<MaxAffineSum>& pieces,
                        const std::vector<double>& weights) {
  std::vector<double> candidates{interval.lo, interval.hi};
  for (const auto& groups : pieces) {
    for (const auto& group : groups) {
      for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
          const double ds = group[a].slope(0) - group[b].slope(0);
          if (ds == 0.0) continue;
          const double f = (group[b].offset - group[a].offset) / ds;
          if (f > interval.lo && f < interval.hi) candidates.push_back(f);
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  Minimizer best{Vec(), kInf};
  for (const double c : candidates) {
    const Vec f = Vec::Constant(1, c);
    double total = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) total += weights[i] * piecewise_value(pieces[i], f);
    if (total < best.value - 1e-12 * std::max(1.0, std::abs(total))) best = {f, total};
  }
  return best;
}

Minimizer joint_recourse_lp(const TwoStageSpec& spec, const DecisionSet& set, const std::vector<Vec>& zs,
                            const std::vector<double>& weights) {
  EpigraphLp lp(set);
  double total_weight = 0.0;
  for (const double w : weights) total_weight += w;
  lp.add_objective_f(total_weight * spec.c1);
  const auto n2 = spec.B.cols();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    std::vector<int> x;
    for (Eigen::Index j = 0; j < n2; ++j) {
      x.push_back(lp.add_var(spec.x_lower.size() ? spec.x_lower(j) : -kInf, spec.x_upper.size() ? spec.x_upper(j) : kInf));
      lp.add_objective_var(x.back(), weights[i] * spec.c2(j));
    }
    for (Eigen::Index r = 0; r < spec.A.rows(); ++r) {
      std::vector<std::pair<int, double>> coef;
      for (Eigen::Index j = 0; j < n2; ++j) coef.emplace_back(x[static_cast<std::size_t>(j)], spec.B(r, j));
      lp.add_row(spec.A.row(r).transpose(), std::move(coef), zs[i](r));
    }
  }
  const auto sol = lp.solve();
  if (!sol) throw InfeasibleError("two_stage: no first-stage decision keeps every recourse problem feasible");
  return {sol->first, sol->second};
}

}  // namespace

Minimizer minimize_weighted(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs,
                            const std::vector<double>& weights) {
  check_inputs(loss, set, zs, weights.size());
  if (std::holds_alternative<LinearLoss>(loss)) {
    Vec s = Vec::Zero(zs.front().size());
    for (std::size_t i = 0; i < zs.size(); ++i) s += weights[i] * zs[i];
    const auto r = linmin(set, s);
    return {r.point, r.value};
  }
  const auto pieces = all_pieces(loss, zs);
  if (pieces.empty()) {
    if (const auto* spec = std::get_if<TwoStageSpec>(&loss); spec != nullptr && is_polyhedral(set)) {
      return joint_recourse_lp(*spec, set, zs, weights);
    }
    throw UnsupportedError("minimize: " + loss_name(loss) + " loss over " + kind_name(set));
  }
  if (const auto* interval = std::get_if<Interval>(&set)) return scan_interval(*interval, pieces, weights);
  if (!is_polyhedral(set)) throw UnsupportedError("minimize: " + loss_name(loss) + " loss over curved set " + kind_name(set));
  EpigraphLp lp(set);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (const auto& group : pieces[i]) lp.add_objective_var(lp.add_max_group(group), weights[i]);
  }
  const auto sol = lp.solve();
  if (!sol) throw Error("minimize: epigraph LP infeasible");
  return {sol->first, sol->second};
}

std::optional<Vec> find_dominating(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs,
                                   const std::vector<double>& bounds) {
  check_inputs(loss, set, zs, bounds.size());
  const auto pieces = all_pieces(loss, zs);
  if (pieces.empty()) throw UnsupportedError("find_dominating: " + loss_name(loss) + " has no piecewise-linear form");
  EpigraphLp lp(set);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::vector<std::pair<int, double>> sum;
    for (const auto& group : pieces[i]) sum.emplace_back(lp.add_max_group(group), 1.0);
    lp.add_row(Vec::Zero(dimension(set)), std::move(sum), bounds[i]);
  }
  const auto sol = lp.solve();
  if (!sol) return std::nullopt;
  return sol->first;
}

FaceSpread optimal_face_spread(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs,
                               const std::vector<double>& weights, double value, const Vec& reference, double face_tol,
                               double class_tol) {
  check_inputs(loss, set, zs, weights.size());
  for (const double w : weights) {
    if (!(w > 0.0)) throw ValidationError("optimal_face_spread: weights must be positive");
  }
  const auto pieces = all_pieces(loss, zs);
  if (pieces.empty()) throw UnsupportedError("optimal_face_spread: " + loss_name(loss) + " has no piecewise-linear form");
  const double slack = face_tol * std::max(1.0, std::abs(value));
  for (std::size_t n = 0; n < zs.size(); ++n) {
    EpigraphLp lp(set);
    std::vector<std::pair<int, double>> weighted;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (const auto& group : pieces[i]) {
        const int q = lp.add_max_group(group);
        weighted.emplace_back(q, weights[i]);
        if (i == n) lp.add_objective_var(q, 1.0);
      }
    }
    lp.add_row(Vec::Zero(dimension(set)), std::move(weighted), value + slack);
    const auto sol = lp.solve();
    if (!sol) continue;
    const double at_reference = piecewise_value(pieces[n], reference);
    const double gap = at_reference - piecewise_value(pieces[n], sol->first);
    if (gap > class_tol) return {true, static_cast<int>(n), sol->first, gap};
  }
  return {};
}

}  // namespace oco
