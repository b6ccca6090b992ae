#ifndef MONODG_CORE_VTK_HPP
#define MONODG_CORE_VTK_HPP

#include <string>
#include <vector>

#include "core/basis.hpp"
#include "core/trajectory.hpp"

namespace monodg {

// Extra per-cell scalar array (indicator values, substep counts, ...).
struct CellArray {
  std::string name;
  std::vector<double> values;
};

// Legacy ASCII unstructured grid. One cell per leaf (VTK_LINE / VTK_QUAD
// spanning the outermost DG nodes), every DG node duplicated per element as
// a point, nodal fields as POINT_DATA, refinement level and the extra
// arrays as CELL_DATA. Byte output is deterministic for fixed inputs.
void write_vtk(const Snapshot& snap, const Basis& basis, const std::string& path,
               const std::vector<CellArray>& cell_arrays = {});

// Reads files produced by write_vtk back into a Snapshot (geometry
// reconstructed from the node layout). The stored time is not part of the
// file; the caller sets it (manifests carry it).
Snapshot read_vtk(const std::string& path, const Basis& basis);

// Infer (dim, order) of a file produced by write_vtk from its cell type
// and points-per-cell count.
std::pair<int, int> probe_vtk_layout(const std::string& path);

// Plain-text index: one line per snapshot, "index time_ms filename".
void write_manifest(const std::string& path,
                    const std::vector<std::pair<double, std::string>>& entries);
std::vector<std::pair<double, std::string>> read_manifest(const std::string& path);

}  // namespace monodg

#endif
