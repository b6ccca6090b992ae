#ifndef MONODG_CORE_SIPG_HPP
#define MONODG_CORE_SIPG_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/basis.hpp"
#include "core/dense.hpp"
#include "core/mesh.hpp"

namespace monodg {

// Constant symmetric positive-semidefinite diffusion tensor, mm^2/ms.
struct DiffusionTensor {
  double dxx = 0.0, dyy = 0.0, dxy = 0.0;

  double operator()(int a, int b) const {
    if (a == b) return a == 0 ? dxx : dyy;
    return dxy;
  }
  void validate(int dim) const;
};

// Per-element interior-penalty operators of the semi-discrete diffusion
// system: diagonal inverse mass matrices, volume stiffness blocks, and the
// four coupling blocks per interior face. Blocks act on nodal values; the
// global action is symmetric and has constants in its kernel.
//
// On an axis-aligned forest with constant D, blocks depend only on the
// refinement level and the face configuration (axis, side, level pair,
// sub-face position), never on position. The cache is keyed accordingly:
// reassembly after mesh adaptation builds at most the handful of
// configurations never seen before, and the whole operator set stays
// cache-resident however large the mesh grows.
class ElementOps {
 public:
  ElementOps(const ForestMesh& mesh, const Basis& basis, const DiffusionTensor& d,
             double gamma);

  void update(const ForestMesh& mesh);

  uint64_t generation() const { return generation_; }
  const Basis& basis() const { return *basis_; }
  const DiffusionTensor& diffusion() const { return d_; }
  double gamma() const { return gamma_; }
  int n_dofs() const { return basis_->nodes_per_element(); }
  int n_slots() const { return int(elems_.size()); }
  std::span<const ElementId> elements() const { return elems_; }

  std::span<const double> minv_diag(int slot) const;
  std::span<const double> mass_diag(int slot) const;
  const Mat& kvol(int slot) const;

  // One side of a face, from the perspective of the element that occupies
  // `slot`: self rows, other-element columns. The self-self face blocks are
  // folded into the per-element self matrix together with the volume block.
  struct FaceCoupling {
    int other_slot;
    const Mat* a_self_other;
  };
  std::span<const FaceCoupling> couplings(int slot) const {
    return couplings_[slot];
  }

  // Volume block plus every self-self face block: the element's own column
  // block of the global K.
  const Mat& self_block(int slot) const { return *slot_self_[slot]; }

  // rate = Minv * (Kvol * own + sum_F A_ss * own + A_so * neighbor_F).
  // neighbor_values[k] must supply nodal values for couplings(slot)[k],
  // time-interpolated by the caller.
  void diffusion_rate(int slot, std::span<const double> own,
                      std::span<const std::span<const double>> neighbor_values,
                      std::span<double> rate) const;

  // Reciprocal of the largest Gershgorin row radius of Minv * K over the
  // element's rows (volume block plus all face couplings). Infinity when
  // every row is zero (no diffusion).
  double gershgorin_dt_bound(int slot) const;

  // Normal-flux traces (D grad N) . n_owner at the face quadrature points,
  // rows = quadrature points, columns = element dofs. Used by the flux-jump
  // error indicator.
  struct FaceFlux {
    const Mat* owner;
    const Mat* neighbor;
  };
  FaceFlux face_flux(const ForestMesh& mesh, const FaceInfo& f) const;

  // Assembly effort counters for cache behavior checks.
  int64_t volume_blocks_built() const { return n_volume_built_; }
  int64_t face_blocks_built() const { return n_face_built_; }

 private:
  struct VolumeEntry {
    std::vector<double> mass, minv;
    Mat kvol;
  };
  struct FaceBlocks {
    Mat a_oo, a_on, a_no, a_nn;
    Mat flux_o, flux_n;  // [quad point][dof]
  };

  const VolumeEntry& volume_entry(const ForestMesh& mesh, ElementId e);
  const FaceBlocks& face_blocks(const ForestMesh& mesh, const FaceInfo& f);
  void rebuild(const ForestMesh& mesh);

  const Basis* basis_;
  DiffusionTensor d_;
  double gamma_;
  uint64_t generation_ = 0;

  std::vector<ElementId> elems_;
  std::unordered_map<int, std::unique_ptr<VolumeEntry>> volume_cache_;   // by level
  std::unordered_map<uint32_t, std::unique_ptr<FaceBlocks>> face_cache_; // by config
  std::map<std::vector<uint32_t>, std::unique_ptr<Mat>> self_cache_;  // element config
  std::vector<const VolumeEntry*> slot_volume_;
  std::vector<const Mat*> slot_self_;
  std::vector<std::vector<FaceCoupling>> couplings_;
  int64_t n_volume_built_ = 0;
  int64_t n_face_built_ = 0;
};

}  // namespace monodg

#endif
