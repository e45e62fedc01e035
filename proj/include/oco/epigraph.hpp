#pragma once

#include <optional>
#include <vector>

#include "oco/geometry.hpp"
#include "oco/losses.hpp"

namespace oco {

struct Minimizer {
  Vec point;
  double value = 0.0;
};

// argmin_{f in F} sum_i w_i l(z_i, f).
//   linear loss            -> linmin(F, sum_i w_i z_i)
//   interval F             -> scan of the breakpoints of the pieces, lowest f on ties
//   polyhedral F           -> epigraph LP (or a joint LP with one recourse block per z
//                             for two-stage losses without dual vertices)
// Curved F with a non-linear loss throws UnsupportedError.
Minimizer minimize_weighted(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs,
                            const std::vector<double>& weights);

// Some f in F with l(z_i, f) <= bounds_i for all i, or nullopt if none exists.
// Polyhedral F and piecewise-linear losses only.
std::optional<Vec> find_dominating(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs,
                                   const std::vector<double>& bounds);

struct FaceSpread {
  bool split = false;
  // First z index whose loss varies on the optimal face, with a point of the
  // face attaining a strictly smaller loss there than `reference`.
  int z_index = -1;
  Vec lower_point;
  double gap = 0.0;
};

// Tests whether the optimal face {f in F : sum_i w_i l(z_i, f) <= value + face_tol}
// contains a point whose loss vector differs from that of `reference` by more
// than `class_tol`. All weights must be positive: the weighted sum is constant
// on the face, so any variation shows up as a strict decrease at some z.
FaceSpread optimal_face_spread(const LossFunction& loss, const DecisionSet& set, const std::vector<Vec>& zs,
                               const std::vector<double>& weights, double value, const Vec& reference,
                               double face_tol = 1e-9, double class_tol = 1e-7);

}  // namespace oco
