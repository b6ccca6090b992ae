#ifndef MONODG_CORE_TRAJECTORY_HPP
#define MONODG_CORE_TRAJECTORY_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/basis.hpp"
#include "core/field.hpp"
#include "core/mesh.hpp"

namespace monodg {

// Self-contained copy of one time level: element geometry plus nodal values,
// evaluable without the (since mutated) mesh.
struct Snapshot {
  double time = 0.0;
  uint64_t generation = 0;
  int n_dofs = 0, n_states = 0;
  std::vector<ElementId> elems;
  std::vector<ElementBox> boxes;
  std::vector<int8_t> levels;
  std::vector<double> phi;
  std::vector<double> states;

  // Point evaluation; `state` < 0 evaluates phi, otherwise that component.
  double eval(const Basis& basis, std::array<double, 2> x, int state = -1) const;

  void build_locator(std::array<double, 2> extent, std::array<int, 2> counts) const;

 private:
  mutable std::unordered_map<uint64_t, int> locator_;
  mutable std::array<double, 2> extent_{};
  mutable std::array<int, 2> counts_{};
  mutable int max_level_ = 0;
};

Snapshot take_snapshot(const ForestMesh& mesh, const Basis& basis,
                       const FieldState& f, double time);

// Ordered snapshots of one run.
struct Trajectory {
  std::vector<Snapshot> snaps;
  std::string config_hash;
  std::array<double, 2> extent{};
  std::array<int, 2> counts{};
  int dim = 1;

  bool empty() const { return snaps.empty(); }
  void append(Snapshot s);
};

}  // namespace monodg

#endif
