#include "core/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/field.hpp"

namespace monodg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void write_vtk(const Snapshot& snap, const Basis& basis, const std::string& path,
               const std::vector<CellArray>& cell_arrays) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write VTK file '" + path + "'");
  const int dim = basis.dim();
  const int nd = snap.n_dofs;
  const int ncell = int(snap.elems.size());
  const size_t npoints = size_t(ncell) * nd;

  out << "# vtk DataFile Version 3.0\n";
  out << "monodg snapshot\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << npoints << " double\n";
  for (int c = 0; c < ncell; ++c) {
    for (int node = 0; node < nd; ++node) {
      const auto x = node_position(basis, snap.boxes[c], node);
      out << fmt(x[0]) << " " << fmt(dim == 2 ? x[1] : 0.0) << " 0\n";
    }
  }

  const int corners = dim == 2 ? 4 : 2;
  out << "CELLS " << ncell << " " << ncell * (corners + 1) << "\n";
  const int p = basis.order();
  for (int c = 0; c < ncell; ++c) {
    const size_t base = size_t(c) * nd;
    if (dim == 1) {
      out << "2 " << base << " " << base + p << "\n";
    } else {
      // Counterclockwise outermost nodes.
      out << "4 " << base + basis.node_index(0, 0) << " "
          << base + basis.node_index(p, 0) << " " << base + basis.node_index(p, p)
          << " " << base + basis.node_index(0, p) << "\n";
    }
  }
  out << "CELL_TYPES " << ncell << "\n";
  for (int c = 0; c < ncell; ++c) out << (dim == 2 ? 9 : 3) << "\n";

  out << "POINT_DATA " << npoints << "\n";
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (double v : snap.phi) out << fmt(v) << "\n";
  for (int s = 0; s < snap.n_states; ++s) {
    out << "SCALARS state" << s << " double 1\nLOOKUP_TABLE default\n";
    for (size_t i = 0; i < npoints; ++i)
      out << fmt(snap.states[i * snap.n_states + s]) << "\n";
  }

  out << "CELL_DATA " << ncell << "\n";
  out << "SCALARS level int 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < ncell; ++c) out << int(snap.levels[c]) << "\n";
  for (const CellArray& arr : cell_arrays) {
    if (int(arr.values.size()) != ncell)
      throw std::invalid_argument("write_vtk: cell array '" + arr.name +
                                  "' has the wrong length");
    out << "SCALARS " << arr.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : arr.values) out << fmt(v) << "\n";
  }
  if (!out) throw std::runtime_error("write failed for VTK file '" + path + "'");
}

Snapshot read_vtk(const std::string& path, const Basis& basis) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open VTK file '" + path + "'");
  std::string tok;
  size_t npoints = 0;
  Snapshot snap;
  const int nd = basis.nodes_per_element();
  const int dim = basis.dim();

  std::vector<std::array<double, 2>> pts;
  while (in >> tok) {
    if (tok == "POINTS") {
      std::string type;
      in >> npoints >> type;
      pts.resize(npoints);
      for (size_t i = 0; i < npoints; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        pts[i] = {x, y};
      }
      if (npoints % nd != 0)
        throw std::runtime_error("read_vtk: point count does not match the basis");
      const int ncell = int(npoints / nd);
      snap.n_dofs = nd;
      snap.elems.resize(ncell);
      snap.boxes.resize(ncell);
      snap.levels.assign(ncell, 0);
      // Recover each element box from its extreme nodes: the 1D nodes span
      // [x0, xp] inside (0,1), so lo = min - x0 * h with
      // h = (max - min)/(xp - x0).
      const double n0 = basis.nodes_1d().front();
      const double np = basis.nodes_1d().back();
      for (int c = 0; c < ncell; ++c) {
        snap.elems[c] = c;
        for (int a = 0; a < dim; ++a) {
          double lo = 1e300, hi = -1e300;
          for (int node = 0; node < nd; ++node) {
            lo = std::min(lo, pts[size_t(c) * nd + node][a]);
            hi = std::max(hi, pts[size_t(c) * nd + node][a]);
          }
          const double h = (hi - lo) / (np - n0);
          snap.boxes[c].lo[a] = lo - n0 * h;
          snap.boxes[c].size[a] = h;
        }
      }
    } else if (tok == "SCALARS") {
      std::string name, type;
      int comps;
      in >> name >> type >> comps;
      in >> tok >> tok;  // LOOKUP_TABLE default
      if (name == "phi") {
        snap.phi.resize(npoints);
        for (size_t i = 0; i < npoints; ++i) in >> snap.phi[i];
      } else if (name.rfind("state", 0) == 0 && name.size() > 5) {
        const int s = std::stoi(name.substr(5));
        if (s + 1 > snap.n_states) {
          std::vector<double> grown(npoints * size_t(s + 1), 0.0);
          for (size_t i = 0; i < npoints; ++i)
            for (int k = 0; k < snap.n_states; ++k)
              grown[i * size_t(s + 1) + k] = snap.states[i * snap.n_states + k];
          snap.states = std::move(grown);
          snap.n_states = s + 1;
        }
        for (size_t i = 0; i < npoints; ++i)
          in >> snap.states[i * snap.n_states + s];
      } else if (name == "level") {
        for (size_t c = 0; c < snap.levels.size(); ++c) {
          int lvl;
          in >> lvl;
          snap.levels[c] = int8_t(lvl);
        }
      } else {
        // Skip any other array (one value per cell).
        double dump;
        for (size_t c = 0; c < snap.levels.size(); ++c) in >> dump;
      }
    }
  }
  if (snap.phi.empty())
    throw std::runtime_error("read_vtk: no phi field in '" + path + "'");
  return snap;
}

std::pair<int, int> probe_vtk_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open VTK file '" + path + "'");
  std::string tok;
  size_t npoints = 0, ncells = 0;
  int cell_type = 0;
  while (in >> tok) {
    if (tok == "POINTS") {
      std::string type;
      in >> npoints >> type;
    } else if (tok == "CELLS") {
      size_t total;
      in >> ncells >> total;
    } else if (tok == "CELL_TYPES") {
      size_t n;
      in >> n >> cell_type;
      break;
    }
  }
  if (npoints == 0 || ncells == 0 || cell_type == 0)
    throw std::runtime_error("unrecognized VTK layout in '" + path + "'");
  const int dim = cell_type == 9 ? 2 : 1;
  const size_t per_cell = npoints / ncells;
  int order = 1;
  while (size_t((order + 2) * (dim == 2 ? (order + 2) : 1)) <= per_cell) ++order;
  return {dim, order};
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<double, std::string>>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
  for (size_t i = 0; i < entries.size(); ++i)
    out << i << " " << fmt(entries[i].first) << " " << entries[i].second << "\n";
}

std::vector<std::pair<double, std::string>> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
  std::vector<std::pair<double, std::string>> entries;
  size_t index;
  double time;
  std::string file;
  while (in >> index >> time >> file) entries.emplace_back(time, file);
  return entries;
}

}  // namespace monodg
