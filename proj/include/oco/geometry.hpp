#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "oco/rng.hpp"
#include "oco/types.hpp"

namespace oco {

// conv(points), given by (possibly redundant) generators.
struct VertexPolytope {
  std::vector<Vec> points;
};

// Probability simplex {f >= 0, sum f = 1} in dimension `dim`.
struct Simplex {
  int dim = 0;
};

struct Box {
  Vec lo;
  Vec hi;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct L2Ball {
  Vec center;
  double radius = 1.0;
};

// {f : ||f||_p <= radius}, p in [2, 3], centred at the origin.
struct LpBall {
  double p = 2.0;
  double radius = 1.0;
  int dim = 0;
};

// Sublevel set of the strongly convex F(f) = (f - center)' Q (f - center) - radius^2,
// Q symmetric positive definite.
struct Ellipsoid {
  Vec center;
  Mat shape;
  double radius = 1.0;
};

using DecisionSet = std::variant<VertexPolytope, Simplex, Box, Interval, L2Ball, LpBall, Ellipsoid>;

struct LinminResult {
  Vec point;
  double value = 0.0;
};

// Checks the structural invariants of the set; throws ValidationError.
void validate(const DecisionSet& set);

int dimension(const DecisionSet& set);
std::string kind_name(const DecisionSet& set);

// Polyhedral kinds admit an exact vertex list and LP formulations.
bool is_polyhedral(const DecisionSet& set);

// argmin_{f in set} z.f. Vertex scans return the lowest-index minimizer, box
// coordinates with z_i = 0 take lo_i, and curved sets return their centre for z = 0.
LinminResult linmin(const DecisionSet& set, const Vec& z);

// Point played when there is no information yet: linmin with z = 0.
Vec default_point(const DecisionSet& set);

// Whether f lies within `tol` of the set (Euclidean distance; the
// vertex-polytope check uses the max-norm residual of the hull LP).
bool contains(const DecisionSet& set, const Vec& f, double tol = kMembershipTol);

// Extreme points. Throws UnsupportedError for curved sets.
std::vector<Vec> vertices(const DecisionSet& set);

// Euclidean projection. Throws UnsupportedError for vertex polytopes.
Vec project(const DecisionSet& set, const Vec& y);

// A random point of the set (not necessarily uniform).
Vec sample_point(const DecisionSet& set, Rng& rng);

// Euclidean diameter (exact for every kind).
double diameter(const DecisionSet& set);

double lp_norm(const Vec& v, double p);

// Orthonormal basis of span(points) by modified Gram-Schmidt; directions with
// residual norm below `drop` are discarded. Columns of the result.
Mat span_basis(const std::vector<Vec>& points, double drop = 1e-10);

// Sampled estimate of the modulus of convexity of the set's unit ball,
//   delta(eps) = inf{1 - ||(f + g)/2|| : ||f|| = ||g|| = 1, ||f - g|| >= eps},
// in the set's own norm. Each of `budget` random boundary pairs is refined by
// coordinate descent; the result is the minimum over all of them, an upper
// bound that does not increase with the budget.
double modulus_of_convexity(const DecisionSet& set, double eps, int budget = 1000, std::uint64_t seed = 0);

}  // namespace oco
