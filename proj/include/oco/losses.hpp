#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oco/types.hpp"

namespace oco {

// l(z, f) = z.f with z, f in R^dim.
struct LinearLoss {
  int dim = 0;
};

// One record of the canonical form: l(z, f) = max_{x in scenarios} (C f + c).x.
struct PwlRecord {
  Vec z;
  Mat C;
  Vec c;
  std::vector<Vec> scenarios;
};

struct CanonicalPwl {
  std::vector<PwlRecord> records;
};

// max(0, 1 - y f.x) with z = (x_1..x_n, y). With features = 0 the side
// information is absorbed: z = (y), f is a scalar, l = max(0, 1 - y f).
struct HingeLoss {
  int features = 0;
};

// max_j (1{j != y} + f_j.x - f_y.x) with z = (x_1..x_n, y), y a class index in
// [0, classes), f the concatenation of `classes` blocks of length n.
struct MulticlassHingeLoss {
  int classes = 2;
  int features = 1;
};

// |y - f.x| with z = (x_1..x_n, y); features = 0 gives |z - f| on scalars.
struct AbsoluteLoss {
  int features = 0;
};

// c1.f + min{c2.x : A f + B x <= z, x_lower <= x <= x_upper}.
// `dual_vertices` optionally lists vertices y >= 0 of {B'y = -c2}; they enable
// the canonical conversion when the recourse variables are free.
struct TwoStageSpec {
  Vec c1;
  Vec c2;
  Mat A;
  Mat B;
  Vec x_lower;
  Vec x_upper;
  std::vector<Vec> dual_vertices;
};

// Leader mixes over patrol configurations; z = (attacker index). The attacker
// picks the simple path with the least interception mass, where configuration
// gamma intercepts a path when it patrols at least one of the path's arcs.
struct SecurityGameSpec {
  std::vector<std::string> node_names;
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::vector<int>> configurations;
  std::vector<std::pair<int, int>> attackers;
  std::size_t path_cap = 100000;
  // Per attacker: the distinct 0/1 interception vectors over configurations,
  // one per class of simple paths. Filled by build_security_game.
  std::vector<std::vector<Vec>> hit_vectors;
};

struct AffinePiece {
  Vec slope;
  double offset = 0.0;
};

struct LatencyPiece {
  double slope = 0.0;
  double offset = 0.0;
};

// l(z, f) = sum_e z_e max_k (slope_k (f_e + z_e) + offset_k) over arcs e.
struct CongestionSpec {
  std::vector<std::vector<LatencyPiece>> arcs;
};

using LossFunction = std::variant<LinearLoss, CanonicalPwl, HingeLoss, MulticlassHingeLoss, AbsoluteLoss, TwoStageSpec,
                                  SecurityGameSpec, CongestionSpec>;

// Sum over groups of the max over each group's pieces, as a function of f for a fixed z.
using MaxAffineSum = std::vector<std::vector<AffinePiece>>;

std::string loss_name(const LossFunction& loss);

// Dimensions of z and f; throws ValidationError on inconsistent payloads.
std::pair<int, int> loss_dims(const LossFunction& loss);

// Checks payload invariants (non-empty scenario sets, shapes, ...).
void validate(const LossFunction& loss);

// Unchecked evaluation of l(z, f).
double evaluate(const LossFunction& loss, const Vec& z, const Vec& f);

// l(., f) restricted to a fixed z as a max-affine sum, or nullopt when the
// variant has no finite piecewise-linear description (two-stage without dual vertices).
std::optional<MaxAffineSum> affine_pieces(const LossFunction& loss, const Vec& z);

// A subgradient in f: the slope of the attaining piece in every group,
// lowest index on ties; the two-stage loss uses the inner LP duals.
Vec subgradient(const LossFunction& loss, const Vec& z, const Vec& f);

struct PwlValue {
  double value = 0.0;
  std::size_t scenario = 0;
};

// Canonical evaluation; throws ValidationError for a z that has no record.
PwlValue pwl_eval(const CanonicalPwl& spec, const Vec& z, const Vec& f);

// Canonical form of the loss on the listed z points. Throws UnsupportedError
// for security and congestion losses and for two-stage losses without dual
// vertices or with bounded recourse variables.
CanonicalPwl to_canonical(const LossFunction& loss, const std::vector<Vec>& zs);

// Throws InfeasibleError when the recourse problem is infeasible and Error when unbounded.
double two_stage_eval(const TwoStageSpec& spec, const Vec& z, const Vec& f);

double security_eval(const SecurityGameSpec& spec, int attacker, const Vec& f);

double congestion_eval(const CongestionSpec& spec, const Vec& z, const Vec& f);

// Validates the graph and enumerates the simple paths of every attacker pair.
SecurityGameSpec build_security_game(std::vector<std::string> node_names, std::vector<std::pair<int, int>> arcs,
                                     std::vector<std::vector<int>> configurations,
                                     std::vector<std::pair<int, int>> attackers, std::size_t path_cap = 100000);

// Edge-list text: `u v` per arc line (arcs indexed in order of appearance),
// `config: i j ...` lists the arc indices patrolled by one configuration,
// `attacker: s t` adds a source/sink pair, `#` starts a comment.
SecurityGameSpec parse_security_graph(const std::string& text, std::size_t path_cap = 100000);

}  // namespace oco
