#ifndef MONODG_CORE_LAT_HPP
#define MONODG_CORE_LAT_HPP

#include <array>
#include <vector>

#include "core/basis.hpp"
#include "core/trajectory.hpp"

namespace monodg {

// Local activation times at fixed sample points: first upward crossing of
// the threshold, linearly interpolated in time between snapshots.
// kNeverActivated marks points that never cross within the trajectory.
constexpr double kNeverActivated = -1.0;

std::vector<double> compute_lat(const Trajectory& traj, const Basis& basis,
                                const std::vector<std::array<double, 2>>& points,
                                double threshold_mv);

// Evenly spaced probe line between two endpoints (inclusive).
std::vector<std::array<double, 2>> probe_line(std::array<double, 2> from,
                                              std::array<double, 2> to, int n);

}  // namespace monodg

#endif
