#include "core/lat.hpp"

#include <stdexcept>

namespace monodg {

std::vector<double> compute_lat(const Trajectory& traj, const Basis& basis,
                                const std::vector<std::array<double, 2>>& points,
                                double threshold_mv) {
  if (traj.snaps.size() < 2)
    throw std::invalid_argument("compute_lat: need at least two snapshots");
  std::vector<double> lat(points.size(), kNeverActivated);
  std::vector<double> prev_val(points.size());
  for (size_t p = 0; p < points.size(); ++p)
    prev_val[p] = traj.snaps.front().eval(basis, points[p]);
  double prev_t = traj.snaps.front().time;

  for (size_t p = 0; p < points.size(); ++p)
    if (prev_val[p] > threshold_mv) lat[p] = prev_t;

  for (size_t k = 1; k < traj.snaps.size(); ++k) {
    const Snapshot& snap = traj.snaps[k];
    for (size_t p = 0; p < points.size(); ++p) {
      if (lat[p] != kNeverActivated) continue;
      const double v = snap.eval(basis, points[p]);
      if (v > threshold_mv) {
        // prev_val <= threshold < v: linear interpolation in time.
        const double alpha = (threshold_mv - prev_val[p]) / (v - prev_val[p]);
        lat[p] = prev_t + alpha * (snap.time - prev_t);
      }
      prev_val[p] = v;
    }
    prev_t = snap.time;
  }
  return lat;
}

std::vector<std::array<double, 2>> probe_line(std::array<double, 2> from,
                                              std::array<double, 2> to, int n) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = (n == 1) ? 0.0 : double(i) / (n - 1);
    pts.push_back({from[0] + a * (to[0] - from[0]), from[1] + a * (to[1] - from[1])});
  }
  return pts;
}

}  // namespace monodg
