#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oco {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Euclidean tolerance for set membership.
inline constexpr double kMembershipTol = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: dimension mismatch, empty sets, out-of-range parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The requested (loss, set) combination has no implementation.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// An inner optimization problem has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A computation would exceed its configured work budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace oco
