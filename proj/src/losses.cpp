#include "oco/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "oco/lp.hpp"

namespace oco {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kKeyTol = 1e-9;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

const PwlRecord& find_record(const CanonicalPwl& spec, const Vec& z) {
  for (const auto& rec : spec.records) {
    if (rec.z.size() == z.size() && (rec.z - z).norm() <= kKeyTol) return rec;
  }
  std::ostringstream msg;
  msg << "canonical_pwl: no record for z = (" << z.transpose() << ")";
  throw ValidationError(msg.str());
}

int class_label(double y, int classes) {
  const double r = std::round(y);
  if (std::abs(y - r) > 1e-9 || r < 0 || r >= classes) {
    throw ValidationError("multiclass_hinge: label " + std::to_string(y) + " is not a class index in [0, " +
                          std::to_string(classes) + ")");
  }
  return static_cast<int>(r);
}

int attacker_index(const SecurityGameSpec& spec, const Vec& z) {
  const double r = std::round(z(0));
  if (std::abs(z(0) - r) > 1e-9 || r < 0 || r >= static_cast<double>(spec.attackers.size())) {
    throw ValidationError("security: z = " + std::to_string(z(0)) + " is not an attacker index");
  }
  return static_cast<int>(r);
}

// Features and label of a (x, y) observation; scalar form when features = 0.
std::pair<Vec, double> split_observation(const Vec& z, int features) {
  if (features == 0) return {Vec::Ones(1), z(0)};
  return {z.head(features), z(features)};
}

bool free_recourse(const TwoStageSpec& s) {
  const bool lower_free = s.x_lower.size() == 0 || (s.x_lower.array() == -kInf).all();
  const bool upper_free = s.x_upper.size() == 0 || (s.x_upper.array() == kInf).all();
  return lower_free && upper_free;
}

LpOptimal solve_recourse(const TwoStageSpec& spec, const Vec& z, const Vec& f) {
  LinearProgram prog;
  prog.objective = spec.c2;
  prog.A = spec.B;
  prog.b = z - spec.A * f;
  prog.lower = spec.x_lower;
  prog.upper = spec.x_upper;
  auto outcome = solve_lp(prog);
  if (std::holds_alternative<LpInfeasible>(outcome)) {
    std::ostringstream msg;
    msg << "two_stage: recourse problem infeasible at z = (" << z.transpose() << "), f = (" << f.transpose() << ")";
    throw InfeasibleError(msg.str());
  }
  if (std::holds_alternative<LpUnbounded>(outcome)) {
    std::ostringstream msg;
    msg << "two_stage: recourse problem unbounded at z = (" << z.transpose() << "), f = (" << f.transpose() << ")";
    throw Error(msg.str());
  }
  return std::get<LpOptimal>(std::move(outcome));
}

PwlRecord record_from_pieces(const Vec& z, const std::vector<AffinePiece>& pieces) {
  const auto k = static_cast<Eigen::Index>(pieces.size());
  PwlRecord rec;
  rec.z = z;
  rec.C = Mat(k, pieces.front().slope.size());
  rec.c = Vec(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    rec.C.row(i) = pieces[static_cast<std::size_t>(i)].slope.transpose();
    rec.c(i) = pieces[static_cast<std::size_t>(i)].offset;
    rec.scenarios.push_back(Vec::Unit(k, i));
  }
  return rec;
}

}  // namespace

std::string loss_name(const LossFunction& loss) {
  static const char* const names[] = {"linear",   "canonical_pwl", "hinge",      "multiclass_hinge",
                                      "absolute", "two_stage",     "security",   "congestion"};
  return names[loss.index()];
}

std::pair<int, int> loss_dims(const LossFunction& loss) {
  return std::visit(
      Overloaded{
          [](const LinearLoss& l) { return std::pair{l.dim, l.dim}; },
          [](const CanonicalPwl& l) {
            require(!l.records.empty(), "canonical_pwl: needs at least one record");
            return std::pair{static_cast<int>(l.records.front().z.size()), static_cast<int>(l.records.front().C.cols())};
          },
          [](const HingeLoss& l) { return l.features == 0 ? std::pair{1, 1} : std::pair{l.features + 1, l.features}; },
          [](const MulticlassHingeLoss& l) { return std::pair{l.features + 1, l.classes * l.features}; },
          [](const AbsoluteLoss& l) { return l.features == 0 ? std::pair{1, 1} : std::pair{l.features + 1, l.features}; },
          [](const TwoStageSpec& l) { return std::pair{static_cast<int>(l.A.rows()), static_cast<int>(l.A.cols())}; },
          [](const SecurityGameSpec& l) { return std::pair{1, static_cast<int>(l.configurations.size())}; },
          [](const CongestionSpec& l) {
            const auto e = static_cast<int>(l.arcs.size());
            return std::pair{e, e};
          },
      },
      loss);
}

void validate(const LossFunction& loss) {
  std::visit(
      Overloaded{
          [](const LinearLoss& l) { require(l.dim >= 1, "linear: dimension must be positive"); },
          [](const CanonicalPwl& l) {
            require(!l.records.empty(), "canonical_pwl: needs at least one record");
            const auto dz = l.records.front().z.size();
            const auto df = l.records.front().C.cols();
            for (std::size_t i = 0; i < l.records.size(); ++i) {
              const auto& r = l.records[i];
              const std::string where = "canonical_pwl record " + std::to_string(i) + ": ";
              require(r.z.size() == dz && r.z.allFinite(), where + "z has the wrong dimension or is not finite");
              require(r.C.cols() == df && r.C.allFinite(), where + "C must be finite with " + std::to_string(df) + " columns");
              require(r.c.size() == r.C.rows() && r.c.allFinite(), where + "c must match the rows of C");
              require(!r.scenarios.empty(), where + "scenario set is empty");
              for (const auto& x : r.scenarios) {
                require(x.size() == r.C.rows() && x.allFinite(), where + "scenario dimension must match the rows of C");
              }
              for (std::size_t j = 0; j < i; ++j) {
                require((l.records[j].z - r.z).norm() > kKeyTol, where + "duplicate z key");
              }
            }
          },
          [](const HingeLoss& l) { require(l.features >= 0, "hinge: features must be >= 0"); },
          [](const MulticlassHingeLoss& l) {
            require(l.classes >= 2, "multiclass_hinge: needs at least two classes");
            require(l.features >= 1, "multiclass_hinge: features must be positive");
          },
          [](const AbsoluteLoss& l) { require(l.features >= 0, "absolute: features must be >= 0"); },
          [](const TwoStageSpec& l) {
            const auto m = l.A.rows();
            require(m >= 1 && l.A.cols() >= 1, "two_stage: A must be non-empty");
            require(l.c1.size() == l.A.cols(), "two_stage: c1 must match the columns of A");
            require(l.B.rows() == m, "two_stage: B must have as many rows as A");
            require(l.c2.size() == l.B.cols(), "two_stage: c2 must match the columns of B");
            require(l.x_lower.size() == 0 || l.x_lower.size() == l.B.cols(), "two_stage: x_lower has the wrong size");
            require(l.x_upper.size() == 0 || l.x_upper.size() == l.B.cols(), "two_stage: x_upper has the wrong size");
            require(l.A.allFinite() && l.B.allFinite() && l.c1.allFinite() && l.c2.allFinite(),
                    "two_stage: non-finite coefficient");
            for (const auto& y : l.dual_vertices) {
              require(y.size() == m && (y.array() >= -1e-12).all(), "two_stage: dual vertices must be >= 0 with one entry per row");
              require((l.B.transpose() * y + l.c2).cwiseAbs().maxCoeff() <= 1e-9,
                      "two_stage: dual vertex violates B'y = -c2");
            }
          },
          [](const SecurityGameSpec& l) {
            require(!l.configurations.empty(), "security: needs at least one configuration");
            require(!l.attackers.empty(), "security: needs at least one attacker");
            require(l.hit_vectors.size() == l.attackers.size(), "security: paths not enumerated, use build_security_game");
          },
          [](const CongestionSpec& l) {
            require(!l.arcs.empty(), "congestion: needs at least one arc");
            for (std::size_t e = 0; e < l.arcs.size(); ++e) {
              require(!l.arcs[e].empty(), "congestion: arc " + std::to_string(e) + " has no latency pieces");
              for (const auto& piece : l.arcs[e]) {
                require(std::isfinite(piece.slope) && std::isfinite(piece.offset), "congestion: non-finite latency piece");
              }
            }
          },
      },
      loss);
  loss_dims(loss);
}

double evaluate(const LossFunction& loss, const Vec& z, const Vec& f) {
  return std::visit(Overloaded{
                        [&](const LinearLoss&) { return z.dot(f); },
                        [&](const CanonicalPwl& l) { return pwl_eval(l, z, f).value; },
                        [&](const HingeLoss& l) {
                          const auto [x, y] = split_observation(z, l.features);
                          return std::max(0.0, 1.0 - y * f.dot(x));
                        },
                        [&](const MulticlassHingeLoss& l) {
                          const Vec x = z.head(l.features);
                          const int y = class_label(z(l.features), l.classes);
                          const double own = f.segment(y * l.features, l.features).dot(x);
                          double best = -kInf;
                          for (int j = 0; j < l.classes; ++j) {
                            const double margin = (j == y ? 0.0 : 1.0) + f.segment(j * l.features, l.features).dot(x) - own;
                            best = std::max(best, margin);
                          }
                          return best;
                        },
                        [&](const AbsoluteLoss& l) {
                          const auto [x, y] = split_observation(z, l.features);
                          return std::abs(y - f.dot(x));
                        },
                        [&](const TwoStageSpec& l) { return two_stage_eval(l, z, f); },
                        [&](const SecurityGameSpec& l) { return security_eval(l, attacker_index(l, z), f); },
                        [&](const CongestionSpec& l) { return congestion_eval(l, z, f); },
                    },
                    loss);
}

std::optional<MaxAffineSum> affine_pieces(const LossFunction& loss, const Vec& z) {
  return std::visit(
      Overloaded{
          [&](const LinearLoss&) -> std::optional<MaxAffineSum> { return MaxAffineSum{{AffinePiece{z, 0.0}}}; },
          [&](const CanonicalPwl& l) -> std::optional<MaxAffineSum> {
            const auto& rec = find_record(l, z);
            std::vector<AffinePiece> pieces;
            for (const auto& x : rec.scenarios) pieces.push_back({rec.C.transpose() * x, rec.c.dot(x)});
            return MaxAffineSum{pieces};
          },
          [&](const HingeLoss& l) -> std::optional<MaxAffineSum> {
            const auto [x, y] = split_observation(z, l.features);
            return MaxAffineSum{{AffinePiece{Vec::Zero(x.size()), 0.0}, AffinePiece{-y * x, 1.0}}};
          },
          [&](const MulticlassHingeLoss& l) -> std::optional<MaxAffineSum> {
            const Vec x = z.head(l.features);
            const int y = class_label(z(l.features), l.classes);
            std::vector<AffinePiece> pieces;
            for (int j = 0; j < l.classes; ++j) {
              Vec slope = Vec::Zero(l.classes * l.features);
              slope.segment(j * l.features, l.features) += x;
              slope.segment(y * l.features, l.features) -= x;
              pieces.push_back({slope, j == y ? 0.0 : 1.0});
            }
            return MaxAffineSum{pieces};
          },
          [&](const AbsoluteLoss& l) -> std::optional<MaxAffineSum> {
            const auto [x, y] = split_observation(z, l.features);
            return MaxAffineSum{{AffinePiece{-x, y}, AffinePiece{x, -y}}};
          },
          [&](const TwoStageSpec& l) -> std::optional<MaxAffineSum> {
            if (l.dual_vertices.empty() || !free_recourse(l)) return std::nullopt;
            std::vector<AffinePiece> pieces;
            for (const auto& y : l.dual_vertices) pieces.push_back({l.c1 + l.A.transpose() * y, -y.dot(z)});
            return MaxAffineSum{pieces};
          },
          [&](const SecurityGameSpec& l) -> std::optional<MaxAffineSum> {
            std::vector<AffinePiece> pieces;
            for (const auto& h : l.hit_vectors[static_cast<std::size_t>(attacker_index(l, z))]) pieces.push_back({-h, 0.0});
            return MaxAffineSum{pieces};
          },
          [&](const CongestionSpec& l) -> std::optional<MaxAffineSum> {
            const auto e = static_cast<Eigen::Index>(l.arcs.size());
            MaxAffineSum groups;
            for (Eigen::Index i = 0; i < e; ++i) {
              if (z(i) < 0.0) throw ValidationError("congestion: negative external flow on arc " + std::to_string(i));
              if (z(i) == 0.0) continue;
              std::vector<AffinePiece> pieces;
              for (const auto& piece : l.arcs[static_cast<std::size_t>(i)]) {
                pieces.push_back({z(i) * piece.slope * Vec::Unit(e, i), z(i) * (piece.slope * z(i) + piece.offset)});
              }
              groups.push_back(std::move(pieces));
            }
            if (groups.empty()) groups.push_back({AffinePiece{Vec::Zero(e), 0.0}});
            return groups;
          },
      },
      loss);
}

Vec subgradient(const LossFunction& loss, const Vec& z, const Vec& f) {
  if (const auto* l = std::get_if<TwoStageSpec>(&loss); l != nullptr && !affine_pieces(loss, z)) {
    const auto sol = solve_recourse(*l, z, f);
    return l->c1 - l->A.transpose() * sol.row_duals;
  }
  const auto groups = affine_pieces(loss, z);
  Vec g = Vec::Zero(f.size());
  for (const auto& group : *groups) {
    std::size_t best = 0;
    double value = group[0].slope.dot(f) + group[0].offset;
    for (std::size_t k = 1; k < group.size(); ++k) {
      const double v = group[k].slope.dot(f) + group[k].offset;
      if (v > value) {
        value = v;
        best = k;
      }
    }
    g += group[best].slope;
  }
  return g;
}

PwlValue pwl_eval(const CanonicalPwl& spec, const Vec& z, const Vec& f) {
  const auto& rec = find_record(spec, z);
  if (f.size() != rec.C.cols()) throw ValidationError("canonical_pwl: f has the wrong dimension");
  const Vec affine = rec.C * f + rec.c;
  PwlValue out{affine.dot(rec.scenarios[0]), 0};
  for (std::size_t i = 1; i < rec.scenarios.size(); ++i) {
    const double v = affine.dot(rec.scenarios[i]);
    if (v > out.value) out = {v, i};
  }
  return out;
}

CanonicalPwl to_canonical(const LossFunction& loss, const std::vector<Vec>& zs) {
  if (std::holds_alternative<SecurityGameSpec>(loss) || std::holds_alternative<CongestionSpec>(loss)) {
    throw UnsupportedError("to_canonical: " + loss_name(loss) + " evaluates natively");
  }
  const auto [dz, df] = loss_dims(loss);
  CanonicalPwl out;
  for (const auto& z : zs) {
    if (z.size() != dz) throw ValidationError("to_canonical: z has the wrong dimension");
    PwlRecord rec = std::visit(
        Overloaded{
            [&](const LinearLoss&) {
              return PwlRecord{z, Mat(z.transpose()), Vec::Zero(1), {Vec::Ones(1)}};
            },
            [&](const CanonicalPwl& l) { return find_record(l, z); },
            [&](const HingeLoss& l) {
              const auto [x, y] = split_observation(z, l.features);
              Mat C = Mat::Zero(2, df);
              C.row(1) = x.transpose();
              Vec scenario(2);
              scenario << 1.0, -y;
              return PwlRecord{z, C, Vec::Unit(2, 0), {Vec::Zero(2), scenario}};
            },
            [&](const AbsoluteLoss& l) {
              const auto [x, y] = split_observation(z, l.features);
              return PwlRecord{z, Mat(-x.transpose()), Vec::Constant(1, y), {Vec::Ones(1), -Vec::Ones(1)}};
            },
            [&](const auto&) {
              const auto pieces = affine_pieces(loss, z);
              if (!pieces || pieces->size() != 1) {
                throw UnsupportedError("to_canonical: " + loss_name(loss) + " has no canonical form here");
              }
              return record_from_pieces(z, pieces->front());
            },
        },
        loss);
    out.records.push_back(std::move(rec));
  }
  return out;
}

double two_stage_eval(const TwoStageSpec& spec, const Vec& z, const Vec& f) {
  return spec.c1.dot(f) + solve_recourse(spec, z, f).value;
}

double security_eval(const SecurityGameSpec& spec, int attacker, const Vec& f) {
  if (attacker < 0 || static_cast<std::size_t>(attacker) >= spec.hit_vectors.size()) {
    throw ValidationError("security: attacker index out of range");
  }
  double best = -kInf;
  for (const auto& h : spec.hit_vectors[static_cast<std::size_t>(attacker)]) best = std::max(best, -h.dot(f));
  return best;
}

double congestion_eval(const CongestionSpec& spec, const Vec& z, const Vec& f) {
  double total = 0.0;
  for (std::size_t e = 0; e < spec.arcs.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(e);
    if (z(i) < 0.0) throw ValidationError("congestion: negative external flow on arc " + std::to_string(e));
    double latency = -kInf;
    for (const auto& piece : spec.arcs[e]) latency = std::max(latency, piece.slope * (f(i) + z(i)) + piece.offset);
    total += z(i) * latency;
  }
  return total;
}

SecurityGameSpec build_security_game(std::vector<std::string> node_names, std::vector<std::pair<int, int>> arcs,
                                     std::vector<std::vector<int>> configurations,
                                     std::vector<std::pair<int, int>> attackers, std::size_t path_cap) {
  const auto n = static_cast<int>(node_names.size());
  const auto m = static_cast<int>(arcs.size());
  for (const auto& [u, v] : arcs) require(u >= 0 && u < n && v >= 0 && v < n, "security: arc endpoint out of range");
  require(!configurations.empty(), "security: needs at least one configuration");
  for (const auto& gamma : configurations) {
    for (const int a : gamma) require(a >= 0 && a < m, "security: configuration references arc " + std::to_string(a));
  }
  require(!attackers.empty(), "security: needs at least one attacker");

  std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(n));
  for (int a = 0; a < m; ++a) out_arcs[static_cast<std::size_t>(arcs[static_cast<std::size_t>(a)].first)].push_back(a);
  const auto k = static_cast<Eigen::Index>(configurations.size());
  std::vector<std::vector<bool>> patrols(static_cast<std::size_t>(m), std::vector<bool>(configurations.size(), false));
  for (std::size_t g = 0; g < configurations.size(); ++g) {
    for (const int a : configurations[g]) patrols[static_cast<std::size_t>(a)][g] = true;
  }

  SecurityGameSpec spec;
  for (const auto& [s, t] : attackers) {
    require(s >= 0 && s < n && t >= 0 && t < n && s != t, "security: attacker endpoints must be distinct nodes");
    std::vector<Vec> hits;
    std::size_t paths = 0;
    std::vector<bool> on_path(static_cast<std::size_t>(n), false);
    Vec current = Vec::Zero(k);
    std::function<void(int, Vec&)> dfs = [&](int node, Vec& hit) {
      if (node == t) {
        if (++paths > path_cap) {
          throw BudgetError("security: more than " + std::to_string(path_cap) +
                            " simple paths between an attacker pair; use a smaller graph");
        }
        const bool seen = std::any_of(hits.begin(), hits.end(), [&](const Vec& h) { return h == hit; });
        if (!seen) hits.push_back(hit);
        return;
      }
      on_path[static_cast<std::size_t>(node)] = true;
      for (const int a : out_arcs[static_cast<std::size_t>(node)]) {
        const int next = arcs[static_cast<std::size_t>(a)].second;
        if (on_path[static_cast<std::size_t>(next)]) continue;
        Vec extended = hit;
        for (Eigen::Index g = 0; g < k; ++g) {
          if (patrols[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)]) extended(g) = 1.0;
        }
        dfs(next, extended);
      }
      on_path[static_cast<std::size_t>(node)] = false;
    };
    dfs(s, current);
    if (hits.empty()) {
      throw ValidationError("security: attacker " + node_names[static_cast<std::size_t>(s)] + " -> " +
                            node_names[static_cast<std::size_t>(t)] + " has no path");
    }
    spec.hit_vectors.push_back(std::move(hits));
  }
  spec.node_names = std::move(node_names);
  spec.arcs = std::move(arcs);
  spec.configurations = std::move(configurations);
  spec.attackers = std::move(attackers);
  spec.path_cap = path_cap;
  return spec;
}

SecurityGameSpec parse_security_graph(const std::string& text, std::size_t path_cap) {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  auto node = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, static_cast<int>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::vector<int>> configurations;
  std::vector<std::pair<std::string, std::string>> attacker_names;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = "security graph line " + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    if (head == "config:") {
      std::vector<int> gamma;
      std::string token;
      while (fields >> token) {
        try {
          std::size_t used = 0;
          const int a = std::stoi(token, &used);
          if (used != token.size()) throw std::invalid_argument(token);
          gamma.push_back(a);
        } catch (const std::exception&) {
          throw ValidationError(where + "arc index expected, got '" + token + "'");
        }
      }
      configurations.push_back(std::move(gamma));
    } else if (head == "attacker:") {
      std::string s, t, extra;
      if (!(fields >> s >> t) || (fields >> extra)) throw ValidationError(where + "expected 'attacker: source sink'");
      attacker_names.emplace_back(s, t);
    } else {
      std::string v, extra;
      if (!(fields >> v) || (fields >> extra)) throw ValidationError(where + "expected an arc 'u v'");
      const int from = node(head);
      arcs.emplace_back(from, node(v));
    }
  }
  std::vector<std::pair<int, int>> attackers;
  for (const auto& [s, t] : attacker_names) {
    if (!index.count(s) || !index.count(t)) throw ValidationError("security graph: attacker references unknown node");
    attackers.emplace_back(index.at(s), index.at(t));
  }
  return build_security_game(std::move(names), std::move(arcs), std::move(configurations), std::move(attackers),
                             path_cap);
}

}  // namespace oco
