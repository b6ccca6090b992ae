#include "core/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "core/errors.hpp"

namespace monodg {

ForestMesh::ForestMesh(std::array<double, 2> extent, std::array<int, 2> counts,
                       int dim, int max_level)
    : dim_(dim), max_level_(max_level), extent_(extent), counts_(counts) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("mesh dim must be 1 or 2");
  if (max_level < 0 || max_level > 20)
    throw std::invalid_argument("max_level out of range");
  if (dim == 1) {
    counts_[1] = 1;
    extent_[1] = 0.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (counts_[a] < 1) throw std::invalid_argument("root counts must be >= 1");
    if (!(extent_[a] > 0.0)) throw std::invalid_argument("extents must be > 0");
  }
  nodes_.reserve(size_t(counts_[0]) * counts_[1]);
  for (int64_t iy = 0; iy < counts_[1]; ++iy) {
    for (int64_t ix = 0; ix < counts_[0]; ++ix) {
      Node n;
      n.level = 0;
      n.ix = ix;
      n.iy = iy;
      n.active = true;
      active_.push_back(ElementId(nodes_.size()));
      nodes_.push_back(n);
    }
  }
}

bool ForestMesh::is_active(ElementId e) const {
  return e >= 0 && e < ElementId(nodes_.size()) && nodes_[e].active;
}

int ForestMesh::level(ElementId e) const { return nodes_[e].level; }

ElementBox ForestMesh::box(ElementId e) const {
  const Node& n = nodes_[e];
  ElementBox b;
  for (int a = 0; a < dim_; ++a) {
    const double h = root_size(a) / double(int64_t(1) << n.level);
    const int64_t c = (a == 0) ? n.ix : n.iy;
    b.lo[a] = c * h;
    b.size[a] = h;
  }
  return b;
}

double ForestMesh::measure(ElementId e) const {
  const ElementBox b = box(e);
  double m = b.size[0];
  if (dim_ == 2) m *= b.size[1];
  return m;
}

ElementId ForestMesh::parent(ElementId e) const { return nodes_[e].parent; }

std::array<ElementId, 4> ForestMesh::siblings(ElementId e) const {
  const ElementId p = nodes_[e].parent;
  if (p == kNoElement) return {kNoElement, kNoElement, kNoElement, kNoElement};
  return nodes_[p].child;
}

ElementId ForestMesh::leaf_covering(int level, int64_t ix, int64_t iy,
                                    bool* found_finer) const {
  *found_finer = false;
  if (ix < 0 || iy < 0) return kNoElement;
  const int64_t nx = int64_t(counts_[0]) << level;
  const int64_t ny = int64_t(counts_[1]) << level;
  if (ix >= nx || (dim_ == 2 && iy >= ny)) return kNoElement;
  const int64_t rx = ix >> level, ry = iy >> level;
  ElementId cur = ElementId(ry * counts_[0] + rx);
  int l = 0;
  while (!nodes_[cur].active) {
    if (l == level) {
      // Refined below the query cell: the neighbor is finer.
      *found_finer = true;
      return cur;
    }
    ++l;
    const int cx = int((ix >> (level - l)) & 1);
    const int cy = (dim_ == 2) ? int((iy >> (level - l)) & 1) : 0;
    cur = nodes_[cur].child[cx + 2 * cy];
    assert(cur != kNoElement);
  }
  return cur;
}

ForestMesh::NeighborQuery ForestMesh::neighbor(ElementId e, int axis, int side) const {
  const Node& n = nodes_[e];
  NeighborQuery q;
  int64_t ix = n.ix, iy = n.iy;
  (axis == 0 ? ix : iy) += side ? 1 : -1;
  bool finer = false;
  const ElementId hit = leaf_covering(n.level, ix, iy, &finer);
  if (hit == kNoElement) {
    q.is_boundary = true;
    return q;
  }
  if (!finer) {
    q.same_or_coarser = hit;
    return q;
  }
  q.is_finer = true;
  // 2:1 balance: the finer side is exactly one level down. Collect the two
  // children of `hit` touching the shared face (one child in 1D).
  const Node& h = nodes_[hit];
  const int cx = (axis == 0) ? (side ? 0 : 1) : -1;  // face-adjacent child column
  const int cy = (axis == 1) ? (side ? 0 : 1) : -1;
  int k = 0;
  for (int jy = 0; jy < (dim_ == 2 ? 2 : 1); ++jy) {
    for (int jx = 0; jx < 2; ++jx) {
      if (cx >= 0 && jx != cx) continue;
      if (cy >= 0 && jy != cy) continue;
      const ElementId c = h.child[jx + 2 * jy];
      assert(c != kNoElement && nodes_[c].active);
      q.finer[k++] = c;
    }
  }
  return q;
}

ElementId ForestMesh::make_child(ElementId parent_id, int cx, int cy) {
  const Node& p = nodes_[parent_id];
  Node c;
  c.parent = parent_id;
  c.level = int8_t(p.level + 1);
  c.ix = 2 * p.ix + cx;
  c.iy = (dim_ == 2) ? 2 * p.iy + cy : 0;
  c.active = false;
  nodes_.push_back(c);
  return ElementId(nodes_.size() - 1);
}

void ForestMesh::split(ElementId e, RefinementDelta& delta, bool balance_induced) {
  Node& n = nodes_[e];
  assert(n.active && n.level < max_level_);
  if (!n.has_children) {
    for (int cy = 0; cy < (dim_ == 2 ? 2 : 1); ++cy)
      for (int cx = 0; cx < 2; ++cx)
        nodes_[e].child[cx + 2 * cy] = make_child(e, cx, cy);
    nodes_[e].has_children = true;
  }
  nodes_[e].active = false;
  RefinementDelta::Split s;
  s.parent = e;
  s.children = {kNoElement, kNoElement, kNoElement, kNoElement};
  int k = 0;
  for (int cy = 0; cy < (dim_ == 2 ? 2 : 1); ++cy) {
    for (int cx = 0; cx < 2; ++cx) {
      const ElementId c = nodes_[e].child[cx + 2 * cy];
      nodes_[c].active = true;
      s.children[k++] = c;
    }
  }
  delta.refined.push_back(s);
  if (balance_induced) delta.balance_induced.push_back(e);
}

void ForestMesh::refine_to_satisfy_balance(ElementId e, RefinementDelta& delta) {
  // Children of e will live at level(e)+1; any face-adjacent leaf at
  // level(e)-1 must be split first.
  const int lvl = nodes_[e].level;
  for (int axis = 0; axis < dim_; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const NeighborQuery q = neighbor(e, axis, side);
      if (q.same_or_coarser != kNoElement && nodes_[q.same_or_coarser].level < lvl) {
        ElementId coarse = q.same_or_coarser;
        refine_to_satisfy_balance(coarse, delta);
        split(coarse, delta, /*balance_induced=*/true);
      }
    }
  }
}

RefinementDelta ForestMesh::refine(std::span<const ElementId> marked) {
  RefinementDelta delta;
  delta.generation_before = generation_;
  std::vector<ElementId> order(marked.begin(), marked.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (ElementId e : order) {
    if (!is_active(e)) {
      // A marked element may have been consumed by the balance ripple of an
      // earlier split in the same call; only ids never valid are an error.
      if (e < 0 || e >= ElementId(nodes_.size()))
        throw StaleTopologyError("refine: unknown element id");
      continue;
    }
    if (nodes_[e].level >= max_level_) {
      delta.skipped.push_back(e);
      continue;
    }
    refine_to_satisfy_balance(e, delta);
    split(e, delta, /*balance_induced=*/false);
  }
  if (!delta.refined.empty()) {
    active_.clear();
    for (ElementId i = 0; i < ElementId(nodes_.size()); ++i)
      if (nodes_[i].active) active_.push_back(i);
  }
  bump_generation();
  delta.generation_after = generation_;
#ifndef NDEBUG
  check_invariants();
#endif
  return delta;
}

RefinementDelta ForestMesh::coarsen(std::span<const ElementId> marked) {
  RefinementDelta delta;
  delta.generation_before = generation_;

  std::set<ElementId> marks;
  for (ElementId e : marked) {
    if (!is_active(e)) throw StaleTopologyError("coarsen: inactive element id");
    marks.insert(e);
  }
  // Group into complete families.
  std::map<ElementId, int> family_count;
  for (ElementId e : marks) {
    const ElementId p = nodes_[e].parent;
    if (p != kNoElement) family_count[p]++;
  }
  const int family_size = (dim_ == 2) ? 4 : 2;
  for (auto [p, count] : family_count) {
    if (count != family_size) continue;
    bool all_leaves = true;
    for (int k = 0; k < family_size; ++k)
      all_leaves = all_leaves && is_active(nodes_[p].child[k]);
    if (!all_leaves) continue;

    // Collapsing puts p (level L-1) next to leaves of level up to L+1 if a
    // child's neighbor is refined; that would break 2:1 balance.
    const int child_level = nodes_[p].level + 1;
    bool balance_ok = true;
    for (int axis = 0; axis < dim_ && balance_ok; ++axis) {
      for (int side = 0; side < 2 && balance_ok; ++side) {
        const int adj = finest_adjacent_level(nodes_[p].level, nodes_[p].ix,
                                              nodes_[p].iy, axis, side);
        if (adj > child_level) balance_ok = false;
      }
    }
    if (!balance_ok) continue;

    RefinementDelta::Collapse c;
    c.parent = p;
    c.children = nodes_[p].child;
    for (int k = 0; k < family_size; ++k) nodes_[nodes_[p].child[k]].active = false;
    nodes_[p].active = true;
    delta.coarsened.push_back(c);
  }
  if (!delta.coarsened.empty()) {
    active_.clear();
    for (ElementId i = 0; i < ElementId(nodes_.size()); ++i)
      if (nodes_[i].active) active_.push_back(i);
  }
  bump_generation();
  delta.generation_after = generation_;
#ifndef NDEBUG
  check_invariants();
#endif
  return delta;
}

int ForestMesh::finest_adjacent_level(int level, int64_t ix, int64_t iy, int axis,
                                      int side) const {
  // Scan the strip of cells one past the (axis, side) face of cell
  // (level, ix, iy) at the finest representable depth.
  int finest = -1;
  const int probe_level = std::min(level + 2, max_level_ + 1);
  const int shift = probe_level - level;
  const int64_t n_tang = int64_t(1) << shift;
  for (int64_t t = 0; t < (dim_ == 2 ? n_tang : 1); ++t) {
    int64_t px, py;
    if (axis == 0) {
      px = side ? ((ix + 1) << shift) : ((ix << shift) - 1);
      py = (iy << shift) + t;
    } else {
      py = side ? ((iy + 1) << shift) : ((iy << shift) - 1);
      px = (ix << shift) + t;
    }
    bool finer = false;
    const ElementId leaf = leaf_covering(probe_level, px, py, &finer);
    if (leaf == kNoElement) continue;  // domain boundary
    finest = std::max(finest, finer ? probe_level + 1 : int(nodes_[leaf].level));
  }
  return finest;
}

const std::vector<FaceInfo>& ForestMesh::face_list() const {
  if (faces_generation_ == generation_) return faces_;
  faces_.clear();
  for (ElementId e : active_) {
    const Node& n = nodes_[e];
    for (int axis = 0; axis < dim_; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const NeighborQuery q = neighbor(e, axis, side);
        if (q.is_boundary) continue;     // zero-flux boundary: no face
        if (q.is_finer) continue;        // finer side owns the interface
        const ElementId nb = q.same_or_coarser;
        const bool hanging = nodes_[nb].level < n.level;
        if (!hanging && nb < e) continue;  // conforming faces listed once
        FaceInfo f;
        f.owner = e;
        f.neighbor = nb;
        f.owner_face_index = axis * 2 + side;
        f.neighbor_face_index = axis * 2 + (1 - side);
        f.kind = hanging ? FaceKind::hanging : FaceKind::conforming;
        f.axis = axis;
        f.normal_sign = side ? 1.0 : -1.0;
        const ElementBox be = box(e);
        f.h_face = be.size[axis];
        f.weight = (dim_ == 2) ? be.size[1 - axis] : 1.0;
        if (hanging) {
          // Position of the fine face inside the coarse face along the
          // tangential axis.
          const int tang = 1 - axis;
          const int64_t tc = (tang == 0) ? n.ix : n.iy;
          f.hanging_half = int(tc & 1);
        }
        faces_.push_back(f);
      }
    }
  }
  faces_generation_ = generation_;
  return faces_;
}

void ForestMesh::bump_generation() {
  ++generation_;
}

void ForestMesh::check_invariants() const {
  double total = 0.0;
  for (ElementId e : active_) total += measure(e);
  double domain = extent_[0];
  if (dim_ == 2) domain *= extent_[1];
  if (std::abs(total - domain) > 1e-12 * domain)
    throw std::logic_error("mesh invariant violated: active leaves do not partition the domain");
  for (ElementId e : active_) {
    if (nodes_[e].level > max_level_)
      throw std::logic_error("mesh invariant violated: level above max_level");
    for (int axis = 0; axis < dim_; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const NeighborQuery q = neighbor(e, axis, side);
        if (q.same_or_coarser != kNoElement &&
            std::abs(nodes_[q.same_or_coarser].level - nodes_[e].level) > 1)
          throw std::logic_error("mesh invariant violated: 2:1 balance");
      }
    }
  }
}

}  // namespace monodg
