#include "core/field.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

#include "core/errors.hpp"

namespace monodg {

int FieldState::slot_of(ElementId e) const {
  auto it = std::lower_bound(elems.begin(), elems.end(), e);
  if (it == elems.end() || *it != e) return -1;
  return int(it - elems.begin());
}

FieldState make_field_state(const ForestMesh& mesh, const Basis& basis,
                            int n_states, double t0) {
  FieldState f;
  f.generation = mesh.generation();
  f.n_dofs = basis.nodes_per_element();
  f.n_states = n_states;
  f.elems.assign(mesh.active_elements().begin(), mesh.active_elements().end());
  const size_t n = f.elems.size();
  f.phi.assign(n * f.n_dofs, 0.0);
  f.phi_prev.assign(n * f.n_dofs, 0.0);
  f.states.assign(n * f.n_dofs * n_states, 0.0);
  f.states_prev.assign(n * f.n_dofs * n_states, 0.0);
  f.t_curr.assign(n, t0);
  f.t_prev.assign(n, t0);
  return f;
}

std::array<double, 2> node_position(const Basis& basis, const ElementBox& box,
                                    int node) {
  const auto [ix, iy] = basis.node_coords(node);
  std::array<double, 2> x{box.lo[0] + basis.nodes_1d()[ix] * box.size[0], 0.0};
  if (basis.dim() == 2) x[1] = box.lo[1] + basis.nodes_1d()[iy] * box.size[1];
  return x;
}

double eval_element(const Basis& basis, const ElementBox& box,
                    std::span<const double> nodal, std::array<double, 2> x) {
  const int n = basis.nodes_per_axis();
  double lx[4], ly[4];
  const double rx = (x[0] - box.lo[0]) / box.size[0];
  lagrange_values(basis.nodes_1d(), rx, {lx, size_t(n)});
  if (basis.dim() == 1) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += lx[i] * nodal[i];
    return v;
  }
  const double ry = (x[1] - box.lo[1]) / box.size[1];
  lagrange_values(basis.nodes_1d(), ry, {ly, size_t(n)});
  double v = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v += lx[i] * ly[j] * nodal[basis.node_index(i, j)];
  return v;
}

namespace {

// One element's worth of nodal data while a delta is replayed.
struct ElemData {
  std::vector<double> phi, phi_prev, states, states_prev;
  double t_curr = 0.0, t_prev = 0.0;
};

// dst = (embed applied to src) per tensor axis; Accumulate adds instead.
template <bool Accumulate>
void apply_tensor(const Basis& basis, const Mat& mx, const Mat& my,
                  std::span<const double> src, std::span<double> dst, int stride,
                  int comp) {
  const int n = basis.nodes_per_axis();
  if (basis.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) acc += mx(i, a) * src[size_t(a) * stride + comp];
      if constexpr (Accumulate)
        dst[size_t(i) * stride + comp] += acc;
      else
        dst[size_t(i) * stride + comp] = acc;
    }
    return;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) {
        double inner = 0.0;
        for (int a = 0; a < n; ++a)
          inner += mx(i, a) * src[size_t(basis.node_index(a, b)) * stride + comp];
        acc += my(j, b) * inner;
      }
      const int node = basis.node_index(i, j);
      if constexpr (Accumulate)
        dst[size_t(node) * stride + comp] += acc;
      else
        dst[size_t(node) * stride + comp] = acc;
    }
  }
}

template <bool Accumulate>
void apply_all(const Basis& basis, const Mat& mx, const Mat& my,
               const ElemData& src, ElemData& dst, int ns) {
  apply_tensor<Accumulate>(basis, mx, my, src.phi, dst.phi, 1, 0);
  apply_tensor<Accumulate>(basis, mx, my, src.phi_prev, dst.phi_prev, 1, 0);
  for (int s = 0; s < ns; ++s) {
    apply_tensor<Accumulate>(basis, mx, my, src.states, dst.states, ns, s);
    apply_tensor<Accumulate>(basis, mx, my, src.states_prev, dst.states_prev, ns, s);
  }
}

}  // namespace

FieldState transfer_field(const Basis& basis, const RefinementDelta& delta,
                          const FieldState& old) {
  if (old.generation != delta.generation_before)
    throw LayoutError("transfer_field: field does not match the pre-delta layout");
  const int nd = old.n_dofs, ns = old.n_states;
  const int family = (basis.dim() == 2) ? 4 : 2;

  std::unordered_map<ElementId, ElemData> work;
  work.reserve(old.elems.size() + 4 * delta.refined.size());
  for (int slot = 0; slot < old.n_elems(); ++slot) {
    ElemData d;
    d.phi.assign(old.phi_at(slot).begin(), old.phi_at(slot).end());
    d.phi_prev.assign(old.phi_prev_at(slot).begin(), old.phi_prev_at(slot).end());
    d.states.assign(old.states_at(slot).begin(), old.states_at(slot).end());
    d.states_prev.assign(old.states_prev_at(slot).begin(),
                         old.states_prev_at(slot).end());
    d.t_curr = old.t_curr[slot];
    d.t_prev = old.t_prev[slot];
    work.emplace(old.elems[slot], std::move(d));
  }

  // Splits in recorded order: balance ripples may split freshly created
  // children, so order matters.
  for (const auto& s : delta.refined) {
    auto pit = work.find(s.parent);
    if (pit == work.end())
      throw LayoutError("transfer_field: split parent has no values");
    const ElemData parent = std::move(pit->second);
    work.erase(pit);
    for (int k = 0; k < family; ++k) {
      ElemData child;
      child.phi.resize(nd);
      child.phi_prev.resize(nd);
      child.states.resize(size_t(nd) * ns);
      child.states_prev.resize(size_t(nd) * ns);
      apply_all<false>(basis, basis.child_embed(k & 1),
                       basis.child_embed((k >> 1) & 1), parent, child, ns);
      child.t_curr = parent.t_curr;
      child.t_prev = parent.t_prev;
      work.emplace(s.children[k], std::move(child));
    }
  }

  for (const auto& c : delta.coarsened) {
    ElemData parent;
    parent.phi.assign(nd, 0.0);
    parent.phi_prev.assign(nd, 0.0);
    parent.states.assign(size_t(nd) * ns, 0.0);
    parent.states_prev.assign(size_t(nd) * ns, 0.0);
    for (int k = 0; k < family; ++k) {
      auto cit = work.find(c.children[k]);
      if (cit == work.end())
        throw LayoutError("transfer_field: collapse child has no values");
      apply_all<true>(basis, basis.child_restrict(k & 1),
                      basis.child_restrict((k >> 1) & 1), cit->second, parent, ns);
      if (k == 0) {
        parent.t_curr = cit->second.t_curr;
        parent.t_prev = cit->second.t_prev;
      }
      work.erase(cit);
    }
    work.emplace(c.parent, std::move(parent));
  }

  FieldState out;
  out.generation = delta.generation_after;
  out.n_dofs = nd;
  out.n_states = ns;
  out.elems.reserve(work.size());
  for (const auto& [e, d] : work) out.elems.push_back(e);
  std::sort(out.elems.begin(), out.elems.end());
  const size_t n = out.elems.size();
  out.phi.resize(n * nd);
  out.phi_prev.resize(n * nd);
  out.states.resize(n * nd * ns);
  out.states_prev.resize(n * nd * ns);
  out.t_curr.resize(n);
  out.t_prev.resize(n);
  for (int slot = 0; slot < int(n); ++slot) {
    const ElemData& d = work.at(out.elems[slot]);
    std::copy(d.phi.begin(), d.phi.end(), &out.phi[size_t(slot) * nd]);
    std::copy(d.phi_prev.begin(), d.phi_prev.end(), &out.phi_prev[size_t(slot) * nd]);
    std::copy(d.states.begin(), d.states.end(), &out.states[size_t(slot) * nd * ns]);
    std::copy(d.states_prev.begin(), d.states_prev.end(),
              &out.states_prev[size_t(slot) * nd * ns]);
    out.t_curr[slot] = d.t_curr;
    out.t_prev[slot] = d.t_prev;
  }
  return out;
}

void fill_field(const ForestMesh& mesh, const Basis& basis, FieldState& f,
                const std::function<double(std::array<double, 2>)>& phi_fn,
                const std::function<void(std::array<double, 2>, std::span<double>)>& state_fn) {
  if (f.generation != mesh.generation())
    throw LayoutError("fill_field: field does not match the mesh generation");
  for (int slot = 0; slot < f.n_elems(); ++slot) {
    const ElementBox b = mesh.box(f.elems[slot]);
    for (int node = 0; node < f.n_dofs; ++node) {
      const auto x = node_position(basis, b, node);
      f.phi[size_t(slot) * f.n_dofs + node] = phi_fn(x);
      if (f.n_states > 0 && state_fn)
        state_fn(x, {&f.states[(size_t(slot) * f.n_dofs + node) * f.n_states],
                     size_t(f.n_states)});
    }
  }
  f.phi_prev = f.phi;
  f.states_prev = f.states;
}

}  // namespace monodg
