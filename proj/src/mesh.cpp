#include "nlneumann/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlneumann/errors.hpp"

namespace nlneumann {

namespace {

// Smallest cell kept at x = 1; below this, 1 - s loses most of its digits.
constexpr double kSmallestCell = 2e-14;

double capped_geometric_sum(double h0, double ratio, double cap, int count) {
  double sum = 0.0;
  double h = h0;
  for (int k = 0; k < count; ++k) {
    sum += std::min(h, cap);
    h *= ratio;
  }
  return sum;
}

// Distances s_0 = 0 < ... < s_count = width from x = 1.
std::vector<double> layer_offsets(double width, int count, double min_cell) {
  std::vector<double> s(count + 1);
  const double uniform = width / count;
  if (min_cell <= 0.0 || min_cell >= uniform || count < 2) {
    for (int k = 0; k <= count; ++k) s[k] = width * k / count;
    s[count] = width;
    return s;
  }
  const double h0 = std::max(min_cell, kSmallestCell);
  const double cap = 2.0 * uniform;
  double lo = 1.0;
  double hi = 2.0;
  while (capped_geometric_sum(h0, hi, cap, count) < width) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (capped_geometric_sum(h0, mid, cap, count) < width) lo = mid;
    else hi = mid;
  }
  const double ratio = hi;
  double h = h0;
  s[0] = 0.0;
  for (int k = 0; k < count; ++k) {
    s[k + 1] = s[k] + std::min(h, cap);
    h *= ratio;
  }
  // Absorb the bisection residue proportionally so the layer ends at width.
  const double stretch = width / s[count];
  for (auto& value : s) value *= stretch;
  s[count] = width;
  return s;
}

}  // namespace

Mesh build_mesh(double epsilon, int n, const GradingSpec& grading) {
  if (n < 32) throw PreconditionError("mesh needs n >= 32 cells, got " + std::to_string(n));
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw PreconditionError("mesh needs epsilon > 0");

  Mesh mesh;
  mesh.grading = grading;
  mesh.nodes.resize(n + 1);

  if (grading.kind == Grading::uniform) {
    for (int i = 0; i <= n; ++i) mesh.nodes[i] = static_cast<double>(i) / n;
    mesh.nodes[n] = 1.0;
    return mesh;
  }

  const double width = grading.width > 0.0 ? grading.width : std::min(0.5, 8.0 * epsilon);
  if (!(width > 0.0 && width < 1.0)) throw PreconditionError("layer width must lie in (0, 1)");
  if (!(grading.fraction > 0.0 && grading.fraction < 1.0)) {
    throw PreconditionError("layer fraction must lie in (0, 1)");
  }
  mesh.grading.width = width;

  const int layer_nodes = static_cast<int>(std::ceil(grading.fraction * n));
  const int layer_cells = std::clamp(layer_nodes - 1, 1, n - 1);
  const int outer_cells = n - layer_cells;

  const double start = 1.0 - width;
  for (int i = 0; i < outer_cells; ++i) mesh.nodes[i] = start * i / outer_cells;
  mesh.nodes[outer_cells] = start;

  const auto s = layer_offsets(width, layer_cells, grading.min_cell);
  for (int k = 0; k < layer_cells; ++k) mesh.nodes[n - k] = 1.0 - s[k];
  mesh.nodes[n] = 1.0;

  for (int i = 0; i < n; ++i) {
    if (!(mesh.nodes[i + 1] > mesh.nodes[i])) {
      throw PreconditionError("layer grading produced coincident nodes; raise min_cell");
    }
  }
  return mesh;
}

}  // namespace nlneumann
