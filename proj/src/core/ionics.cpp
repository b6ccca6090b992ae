#include "core/ionics.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace monodg {

namespace {

void require_finite(double phi, std::span<const double> s) {
  bool ok = std::isfinite(phi);
  for (double v : s) ok = ok && std::isfinite(v);
  if (!ok) throw NumericalDomainError("cell model evaluated at non-finite state");
}

}  // namespace

void MitchellSchaeffer::eval(double phi, std::span<const double> s,
                             IonicRates& out) const {
  require_finite(phi, s);
  const double v = (phi - phi_rest_mv) / phi_scale_mv;
  const double h = s[0];
  const double j_in = h * v * v * (1.0 - v) / tau_in;
  const double j_out = -v / tau_out;
  out.dphi = phi_scale_mv * (j_in + j_out);
  if (v < v_gate) {
    out.h_inf[0] = 1.0;
    out.tau[0] = tau_open;
  } else {
    out.h_inf[0] = 0.0;
    out.tau[0] = tau_close;
  }
  out.ds[0] = (out.h_inf[0] - h) / out.tau[0];
}

void MitchellSchaeffer::set_parameter(const std::string& key, double value) {
  if (key == "tau_in")
    tau_in = value;
  else if (key == "tau_out")
    tau_out = value;
  else if (key == "tau_open")
    tau_open = value;
  else if (key == "tau_close")
    tau_close = value;
  else if (key == "v_gate")
    v_gate = value;
  else
    throw std::invalid_argument("mitchell-schaeffer has no parameter '" + key + "'");
}

void FitzHughNagumo::eval(double phi, std::span<const double> s,
                          IonicRates& out) const {
  require_finite(phi, s);
  const double v = (phi - phi_rest_mv) / phi_scale_mv;
  const double w = s[0];
  out.dphi = phi_scale_mv * (c1 * v * (v - a) * (1.0 - v) - c2 * v * w);
  out.ds[0] = b * (v - d * w);
  out.h_inf[0] = 0.0;
  out.tau[0] = 0.0;
}

void FitzHughNagumo::set_parameter(const std::string& key, double value) {
  if (key == "a")
    a = value;
  else if (key == "b")
    b = value;
  else if (key == "c1")
    c1 = value;
  else if (key == "c2")
    c2 = value;
  else if (key == "d")
    d = value;
  else
    throw std::invalid_argument("fitzhugh-nagumo has no parameter '" + key + "'");
}

std::unique_ptr<CellModel> make_cell_model(
    const std::string& name, const std::map<std::string, double>& overrides) {
  std::unique_ptr<CellModel> model;
  if (name == "mitchell-schaeffer")
    model = std::make_unique<MitchellSchaeffer>();
  else if (name == "fitzhugh-nagumo")
    model = std::make_unique<FitzHughNagumo>();
  else
    throw std::invalid_argument("unknown cell model '" + name + "'");
  for (const auto& [key, value] : overrides) model->set_parameter(key, value);
  return model;
}

void rush_larsen_step(const CellModel& model, const IonicRates& rates,
                      std::span<double> s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rush_larsen_step: dt must be > 0");
  for (int k = 0; k < model.n_states(); ++k) {
    if (model.is_gate(k)) {
      if (!(rates.tau[k] > 0.0))
        throw std::invalid_argument("rush_larsen_step: gate time constant must be > 0");
      s[k] = rates.h_inf[k] + (s[k] - rates.h_inf[k]) * std::exp(-dt / rates.tau[k]);
    } else {
      s[k] += dt * rates.ds[k];
    }
  }
}

double StimulusProtocol::eval(std::array<double, 2> x, double t, int dim) const {
  if (shape == Shape::none || amplitude == 0.0) return 0.0;
  if (t < t_start || t > t_end) return 0.0;
  double spatial = 0.0;
  if (shape == Shape::ball) {
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
    spatial = 1.0 - std::sqrt(d2) / radius;
  } else {
    double worst = 0.0;
    for (int a = 0; a < dim; ++a)
      worst = std::max(worst, std::abs(x[a] - center[a]) / half_size[a]);
    spatial = 1.0 - worst;
  }
  if (spatial <= 0.0) return 0.0;
  const double temporal =
      (t_end > t_start) ? (t_end - t) / (t_end - t_start) : 1.0;
  return amplitude * spatial * temporal;
}

}  // namespace monodg
