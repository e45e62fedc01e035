#include "oco/equivalence.hpp"

#include <cmath>
#include <functional>

namespace oco {

EquivalencePartition equivalence_classes(const std::vector<Vec>& points, const Game& game, double tol) {
  for (const auto& f : points) {
    if (f.size() != game.dim_f()) throw ValidationError("equivalence_classes: point has the wrong dimension");
  }
  // gap(i, j) returns a separating z (empty when equivalent).
  std::function<Vec(const Vec&, const Vec&)> separate;
  if (is_finite(game.opponents())) {
    const auto& zs = std::get<FinitePoints>(game.opponents()).points;
    separate = [&game, &zs, tol](const Vec& a, const Vec& b) {
      for (const auto& z : zs) {
        if (std::abs(game.evaluate(z, a) - game.evaluate(z, b)) > tol) return z;
      }
      return Vec();
    };
  } else if (std::holds_alternative<LinearLoss>(game.loss())) {
    const std::vector<Vec> probes = probe_points(game.opponents());
    const Mat basis = span_basis(probes);
    separate = [probes, basis, tol](const Vec& a, const Vec& b) {
      const Vec diff = a - b;
      if ((basis.transpose() * diff).norm() <= tol) return Vec();
      std::size_t best = 0;
      for (std::size_t i = 1; i < probes.size(); ++i) {
        if (std::abs(probes[i].dot(diff)) > std::abs(probes[best].dot(diff))) best = i;
      }
      return probes[best];
    };
  } else {
    throw UnsupportedError("equivalence_classes: continuous Z with " + loss_name(game.loss()) +
                           " loss; reduce Z with finite_witness first");
  }

  EquivalencePartition out;
  for (const auto& f : points) {
    int cls = -1;
    for (int c = 0; c < out.num_classes(); ++c) {
      if (separate(out.representatives[static_cast<std::size_t>(c)], f).size() == 0) {
        cls = c;
        break;
      }
    }
    if (cls < 0) {
      cls = out.num_classes();
      out.representatives.push_back(f);
    }
    out.class_of.push_back(cls);
  }
  for (int a = 0; a < out.num_classes(); ++a) {
    for (int b = a + 1; b < out.num_classes(); ++b) {
      out.witnesses.push_back(
          {a, b, separate(out.representatives[static_cast<std::size_t>(a)], out.representatives[static_cast<std::size_t>(b)])});
    }
  }
  return out;
}

}  // namespace oco
