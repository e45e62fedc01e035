#include "oco/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace oco {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-10;
constexpr std::size_t kMaxPivots = 200000;

// One column of the standard form x' >= 0 that feeds an original variable:
// x_orig += sign * x'.
struct Feed {
  Eigen::Index original;
  double sign;
};

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double at(Eigen::Index r, Eigen::Index c) const { return t_(r, c); }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double rhs(Eigen::Index r) const { return t_(r, cols()); }
  double cost(Eigen::Index c) const { return t_(rows(), c); }
  double objective() const { return -t_(rows(), cols()); }
  std::vector<Eigen::Index>& basis() { return basis_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double factor = t_(i, c);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Installs `costs` as the objective row, priced out against the basis.
  void set_costs(const Vec& costs) {
    t_.row(rows()).setZero();
    t_.row(rows()).head(cols()) = costs.transpose();
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const double cb = costs(basis_[static_cast<std::size_t>(r)]);
      if (cb != 0.0) t_.row(rows()) -= cb * t_.row(r);
    }
  }

  enum class Status { kOptimal, kUnbounded };

  Status run(const std::vector<bool>& may_enter) {
    for (std::size_t iter = 0; iter < kMaxPivots; ++iter) {
      Eigen::Index entering = -1;
      for (Eigen::Index c = 0; c < cols(); ++c) {
        if (may_enter[static_cast<std::size_t>(c)] && cost(c) < -kCostTol) {
          entering = c;
          break;
        }
      }
      if (entering < 0) return Status::kOptimal;

      double best = kInf;
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double a = at(r, entering);
        if (a > kPivotTol) best = std::min(best, rhs(r) / a);
      }
      Eigen::Index leaving = -1;
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double a = at(r, entering);
        if (a <= kPivotTol || rhs(r) / a > best + kPivotTol) continue;
        if (leaving < 0 || basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leaving)]) leaving = r;
      }
      if (leaving < 0) return Status::kUnbounded;
      pivot(leaving, entering);
    }
    throw Error("solve_lp: pivot limit exceeded");
  }

 private:
  Mat t_;
  std::vector<Eigen::Index> basis_;
};

void check_finite(const LinearProgram& prog) {
  const auto n = static_cast<Eigen::Index>(prog.num_vars());
  if (prog.A.cols() != n && !(prog.A.rows() == 0 && prog.b.size() == 0)) {
    throw ValidationError("solve_lp: A has " + std::to_string(prog.A.cols()) + " columns, objective has " +
                          std::to_string(n) + " entries");
  }
  if (prog.A.rows() != prog.b.size()) {
    throw ValidationError("solve_lp: A has " + std::to_string(prog.A.rows()) + " rows, b has " +
                          std::to_string(prog.b.size()) + " entries");
  }
  if ((prog.lower.size() != 0 && prog.lower.size() != n) || (prog.upper.size() != 0 && prog.upper.size() != n)) {
    throw ValidationError("solve_lp: bound vectors must be empty or match the variable count");
  }
  if (!prog.objective.allFinite() || !prog.A.allFinite() || !prog.b.allFinite()) {
    throw ValidationError("solve_lp: non-finite coefficient");
  }
  if (prog.lower.hasNaN() || prog.upper.hasNaN()) throw ValidationError("solve_lp: NaN bound");
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& prog) {
  check_finite(prog);
  const auto n = static_cast<Eigen::Index>(prog.num_vars());
  const auto m = static_cast<Eigen::Index>(prog.num_rows());
  auto lower = [&](Eigen::Index j) { return prog.lower.size() ? prog.lower(j) : -kInf; };
  auto upper = [&](Eigen::Index j) { return prog.upper.size() ? prog.upper(j) : kInf; };

  // Shift/flip/split every variable onto x' >= 0; finite two-sided bounds
  // become an extra row.
  std::vector<Feed> feeds;
  Vec shift = Vec::Zero(n);
  std::vector<std::pair<Eigen::Index, double>> bound_rows;  // (standard column, capacity)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = lower(j);
    const double hi = upper(j);
    if (lo > hi) return LpInfeasible{};
    if (std::isfinite(lo)) {
      shift(j) = lo;
      feeds.push_back({j, 1.0});
      if (std::isfinite(hi)) bound_rows.emplace_back(static_cast<Eigen::Index>(feeds.size()) - 1, hi - lo);
    } else if (std::isfinite(hi)) {
      shift(j) = hi;
      feeds.push_back({j, -1.0});
    } else {
      feeds.push_back({j, 1.0});
      feeds.push_back({j, -1.0});
    }
  }

  const auto ns = static_cast<Eigen::Index>(feeds.size());
  const Eigen::Index rows = m + static_cast<Eigen::Index>(bound_rows.size());
  Mat a = Mat::Zero(rows, ns);
  Vec rhs(rows);
  Vec cost = Vec::Zero(ns);
  for (Eigen::Index k = 0; k < ns; ++k) {
    const auto& fd = feeds[static_cast<std::size_t>(k)];
    if (m > 0) a.block(0, k, m, 1) = fd.sign * prog.A.col(fd.original);
    cost(k) = fd.sign * prog.objective(fd.original);
  }
  if (m > 0) rhs.head(m) = prog.b - prog.A * shift;
  for (std::size_t r = 0; r < bound_rows.size(); ++r) {
    const auto row = m + static_cast<Eigen::Index>(r);
    a(row, bound_rows[r].first) = 1.0;
    rhs(row) = bound_rows[r].second;
  }

  // Columns: [structural ns | slack rows | artificial per negative rhs].
  std::vector<Eigen::Index> artificial_of(static_cast<std::size_t>(rows), -1);
  Eigen::Index num_art = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (rhs(r) < 0.0) artificial_of[static_cast<std::size_t>(r)] = ns + rows + num_art++;
  }
  const Eigen::Index cols = ns + rows + num_art;
  Tableau tab(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double sign = rhs(r) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index k = 0; k < ns; ++k) tab.at(r, k) = sign * a(r, k);
    tab.at(r, ns + r) = sign;
    tab.rhs(r) = sign * rhs(r);
    const Eigen::Index art = artificial_of[static_cast<std::size_t>(r)];
    if (art >= 0) {
      tab.at(r, art) = 1.0;
      tab.basis()[static_cast<std::size_t>(r)] = art;
    } else {
      tab.basis()[static_cast<std::size_t>(r)] = ns + r;
    }
  }

  const auto is_artificial = [&](Eigen::Index c) { return c >= ns + rows; };
  std::vector<bool> may_enter(static_cast<std::size_t>(cols), true);

  if (num_art > 0) {
    Vec phase1 = Vec::Zero(cols);
    phase1.tail(num_art).setOnes();
    tab.set_costs(phase1);
    tab.run(may_enter);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (tab.objective() > 1e-9 * scale) return LpInfeasible{};
    // Drive zero-level artificials out of the basis where possible.
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!is_artificial(tab.basis()[static_cast<std::size_t>(r)])) continue;
      for (Eigen::Index c = 0; c < ns + rows; ++c) {
        if (std::abs(tab.at(r, c)) > kPivotTol) {
          tab.pivot(r, c);
          break;
        }
      }
    }
    for (Eigen::Index c = ns + rows; c < cols; ++c) may_enter[static_cast<std::size_t>(c)] = false;
  }

  Vec phase2 = Vec::Zero(cols);
  phase2.head(ns) = cost;
  tab.set_costs(phase2);
  if (tab.run(may_enter) == Tableau::Status::kUnbounded) return LpUnbounded{};

  Vec xs = Vec::Zero(ns);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index c = tab.basis()[static_cast<std::size_t>(r)];
    if (c < ns) xs(c) = tab.rhs(r);
  }
  LpOptimal out;
  out.x = shift;
  for (Eigen::Index k = 0; k < ns; ++k) {
    const auto& fd = feeds[static_cast<std::size_t>(k)];
    out.x(fd.original) += fd.sign * xs(k);
  }
  out.value = prog.objective.dot(out.x);
  out.row_duals = Vec(m);
  for (Eigen::Index r = 0; r < m; ++r) out.row_duals(r) = -tab.cost(ns + r);
  return out;
}

}  // namespace oco
