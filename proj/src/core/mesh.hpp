#ifndef MONODG_CORE_MESH_HPP
#define MONODG_CORE_MESH_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace monodg {

using ElementId = int32_t;
constexpr ElementId kNoElement = -1;

// Axis-aligned box of an element, in mm.
struct ElementBox {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> size{0.0, 0.0};  // size[1] == 0 in 1D
};

enum class FaceKind : uint8_t { conforming, hanging };

// One interior interface, listed once. For hanging interfaces the finer
// element owns the face and the face geometry is the finer element's full
// face, contained in the coarser neighbor's face.
struct FaceInfo {
  ElementId owner = kNoElement;
  ElementId neighbor = kNoElement;
  int owner_face_index = -1;     // axis*2 + side on the owner
  int neighbor_face_index = -1;  // opposite local face on the neighbor
  FaceKind kind = FaceKind::conforming;
  int axis = 0;                 // face normal axis
  double normal_sign = 1.0;     // outward from owner along `axis`
  double h_face = 0.0;          // characteristic face size, mm (finer side)
  double weight = 1.0;          // surface transformation weight, mm^(dim-1)
  // Offset of the owner's face within the neighbor's face along the
  // tangential axis: 0 or 1 when hanging, -1 when conforming.
  int hanging_half = -1;
};

// Result of one refine/coarsen call. Applying the delta's inverse restores
// the previous active set exactly (element ids are stable).
struct RefinementDelta {
  struct Split {
    ElementId parent;
    std::array<ElementId, 4> children;  // 2^dim used
  };
  struct Collapse {
    std::array<ElementId, 4> children;
    ElementId parent;
  };
  std::vector<Split> refined;
  std::vector<Collapse> coarsened;
  std::vector<ElementId> balance_induced;  // parents refined only for 2:1 balance
  std::vector<ElementId> skipped;          // marked ids at max_level, not refined
  uint64_t generation_before = 0;
  uint64_t generation_after = 0;
  bool empty() const { return refined.empty() && coarsened.empty(); }
};

// Forest-of-trees mesh over a Cartesian root grid of line (1D) or
// quadrilateral (2D) elements. Refinement replaces a parent with 2^dim
// equally sized children; 2:1 balance across faces is enforced on every
// topology change. Element ids are stable: a coarsened child keeps its id
// and is reused if the same region is refined again.
class ForestMesh {
 public:
  ForestMesh(std::array<double, 2> extent, std::array<int, 2> counts, int dim,
             int max_level = 6);

  int dim() const { return dim_; }
  int max_level() const { return max_level_; }
  uint64_t generation() const { return generation_; }
  std::array<double, 2> extent() const { return extent_; }
  std::array<int, 2> root_counts() const { return counts_; }

  // Active leaves in canonical (ascending id) order.
  std::span<const ElementId> active_elements() const { return active_; }
  int n_active() const { return int(active_.size()); }

  bool is_active(ElementId e) const;
  int level(ElementId e) const;
  ElementBox box(ElementId e) const;
  double measure(ElementId e) const;

  // Siblings of e (including e itself); empty for level-0 elements.
  std::array<ElementId, 4> siblings(ElementId e) const;
  ElementId parent(ElementId e) const;

  // Refine the marked active elements (plus any 2:1-balance ripple).
  // Marked ids already at max_level are skipped and reported in the delta.
  RefinementDelta refine(std::span<const ElementId> marked);

  // Collapse complete sibling families whose members are all marked, if the
  // collapse preserves 2:1 balance; other families are skipped.
  RefinementDelta coarsen(std::span<const ElementId> marked);

  // Every interior geometric interface exactly once; hanging interfaces per
  // fine sub-face with the fine element as owner. Rebuilt on demand and
  // cached per generation.
  const std::vector<FaceInfo>& face_list() const;

  // kNoElement if (axis, side) is the domain boundary; otherwise the
  // adjacent leaf, which is at the same level or one coarser. A finer
  // neighbor pair is reported through the `finer` out-array instead.
  struct NeighborQuery {
    ElementId same_or_coarser = kNoElement;
    bool is_boundary = false;
    bool is_finer = false;
    std::array<ElementId, 2> finer{kNoElement, kNoElement};
  };
  NeighborQuery neighbor(ElementId e, int axis, int side) const;

  // Debug checks: exact domain partition and 2:1 balance.
  void check_invariants() const;

 private:
  struct Node {
    ElementId parent = kNoElement;
    std::array<ElementId, 4> child{kNoElement, kNoElement, kNoElement, kNoElement};
    int8_t level = 0;
    int64_t ix = 0, iy = 0;  // integer coords at `level`
    bool active = false;
    bool has_children = false;
  };

  ElementId make_child(ElementId parent_id, int cx, int cy);
  void split(ElementId e, RefinementDelta& delta, bool balance_induced);
  void refine_to_satisfy_balance(ElementId e, RefinementDelta& delta);
  // Finest active leaf level adjacent to cell (level, ix, iy) across (axis, side).
  int finest_adjacent_level(int level, int64_t ix, int64_t iy, int axis, int side) const;
  // Active leaf covering cell (level, ix, iy): walks down from the root.
  // Returns kNoElement with *found_finer = true if the covering node is
  // refined below `level`.
  ElementId leaf_covering(int level, int64_t ix, int64_t iy, bool* found_finer) const;
  void bump_generation();
  double root_size(int axis) const { return extent_[axis] / counts_[axis]; }

  int dim_;
  int max_level_;
  std::array<double, 2> extent_;
  std::array<int, 2> counts_;
  std::vector<Node> nodes_;
  std::vector<ElementId> active_;
  uint64_t generation_ = 1;

  mutable std::vector<FaceInfo> faces_;
  mutable uint64_t faces_generation_ = 0;
};

}  // namespace monodg

#endif
