#include "core/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace monodg {

namespace {
uint64_t cell_key(int level, int64_t ix, int64_t iy) {
  return (uint64_t(level) << 56) | (uint64_t(ix & 0xFFFFFFF) << 28) |
         uint64_t(iy & 0xFFFFFFF);
}
}  // namespace

Snapshot take_snapshot(const ForestMesh& mesh, const Basis&,
                       const FieldState& f, double time) {
  if (f.generation != mesh.generation())
    throw LayoutError("take_snapshot: field does not match the mesh generation");
  Snapshot s;
  s.time = time;
  s.generation = mesh.generation();
  s.n_dofs = f.n_dofs;
  s.n_states = f.n_states;
  s.elems.assign(f.elems.begin(), f.elems.end());
  s.boxes.reserve(s.elems.size());
  s.levels.reserve(s.elems.size());
  for (ElementId e : s.elems) {
    s.boxes.push_back(mesh.box(e));
    s.levels.push_back(int8_t(mesh.level(e)));
  }
  s.phi = f.phi;
  s.states = f.states;
  return s;
}

void Snapshot::build_locator(std::array<double, 2> extent,
                             std::array<int, 2> counts) const {
  extent_ = extent;
  counts_ = counts;
  locator_.clear();
  locator_.reserve(elems.size());
  max_level_ = 0;
  for (int8_t l : levels) max_level_ = std::max(max_level_, int(l));
  for (size_t i = 0; i < elems.size(); ++i) {
    const int lvl = levels[i];
    const double h0 = extent[0] / counts[0];
    const int64_t ix = int64_t(std::llround(boxes[i].lo[0] / (h0 / (int64_t(1) << lvl))));
    int64_t iy = 0;
    if (boxes[i].size[1] > 0.0) {
      const double h1 = extent[1] / counts[1];
      iy = int64_t(std::llround(boxes[i].lo[1] / (h1 / (int64_t(1) << lvl))));
    }
    locator_[cell_key(lvl, ix, iy)] = int(i);
  }
}

double Snapshot::eval(const Basis& basis, std::array<double, 2> x, int state) const {
  if (locator_.empty())
    throw std::logic_error("Snapshot::eval: build_locator was not called");
  const int dim = basis.dim();
  for (int lvl = max_level_; lvl >= 0; --lvl) {
    const double hx = extent_[0] / counts_[0] / double(int64_t(1) << lvl);
    int64_t ix = int64_t(std::floor(x[0] / hx));
    ix = std::min(std::max(ix, int64_t(0)), int64_t(counts_[0]) * (int64_t(1) << lvl) - 1);
    int64_t iy = 0;
    if (dim == 2) {
      const double hy = extent_[1] / counts_[1] / double(int64_t(1) << lvl);
      iy = int64_t(std::floor(x[1] / hy));
      iy = std::min(std::max(iy, int64_t(0)),
                    int64_t(counts_[1]) * (int64_t(1) << lvl) - 1);
    }
    auto it = locator_.find(cell_key(lvl, ix, iy));
    if (it == locator_.end()) continue;
    const int slot = it->second;
    if (state < 0) {
      return eval_element(basis, boxes[slot],
                          {&phi[size_t(slot) * n_dofs], size_t(n_dofs)}, x);
    }
    // Interpolate one state component through the same nodal basis.
    std::vector<double> comp(n_dofs);
    for (int node = 0; node < n_dofs; ++node)
      comp[node] = states[(size_t(slot) * n_dofs + node) * n_states + state];
    return eval_element(basis, boxes[slot], comp, x);
  }
  throw std::out_of_range("Snapshot::eval: point not covered by any element");
}

void Trajectory::append(Snapshot s) {
  if (!snaps.empty() && !(s.time > snaps.back().time))
    throw std::invalid_argument("Trajectory: snapshot times must be strictly increasing");
  s.build_locator(extent, counts);
  snaps.push_back(std::move(s));
}

}  // namespace monodg
