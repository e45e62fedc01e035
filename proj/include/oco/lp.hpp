#pragma once

#include <variant>

#include "oco/types.hpp"

namespace oco {

// minimize objective·x  subject to  A x <= b,  lower <= x <= upper.
//
// Empty `lower`/`upper` mean every variable is free on that side; individual
// entries may be -inf/+inf.
struct LinearProgram {
  Vec objective;
  Mat A;
  Vec b;
  Vec lower;
  Vec upper;

  std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }
  std::size_t num_rows() const { return static_cast<std::size_t>(b.size()); }
};

struct LpOptimal {
  Vec x;
  double value = 0.0;
  // Multipliers of the A x <= b rows (d value / d b_i, so <= 0 for a minimum).
  Vec row_duals;
};

struct LpInfeasible {};
struct LpUnbounded {};

using LpOutcome = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

// Two-phase dense tableau simplex. Bland's rule for both the entering and the
// leaving variable, so the pivot sequence (and the result) is a deterministic
// function of the input. Throws ValidationError on NaN/Inf coefficients or
// inconsistent shapes.
LpOutcome solve_lp(const LinearProgram& prog);

inline bool is_optimal(const LpOutcome& o) { return std::holds_alternative<LpOptimal>(o); }

}  // namespace oco
