#pragma once

#include <cstddef>
#include <vector>

namespace nlneumann {

enum class Grading { uniform, layer };

/// Node distribution on [0, 1]. A layer mesh puts ceil(fraction * n) nodes in
/// [1 - width, 1]; with `min_cell` set, the cells inside the layer grow
/// geometrically from `min_cell` at x = 1 (capped at twice the uniform layer
/// cell) instead of being uniform.
struct GradingSpec {
  Grading kind = Grading::layer;
  double width = 0.0;     // 0 selects min(1/2, 8 eps)
  double fraction = 0.5;
  double min_cell = 0.0;  // 0 keeps the layer uniform

  bool operator==(const GradingSpec&) const = default;
};

struct Mesh {
  std::vector<double> nodes;  // x_0 = 0 < ... < x_n = 1
  GradingSpec grading;        // with width resolved

  std::size_t cells() const noexcept { return nodes.size() - 1; }
  double cell(std::size_t e) const { return nodes[e + 1] - nodes[e]; }
};

/// Throws PreconditionError for n < 32, width outside (0, 1) or fraction
/// outside (0, 1).
Mesh build_mesh(double epsilon, int n, const GradingSpec& grading = {});

}  // namespace nlneumann
