#ifndef MONODG_CORE_IONICS_HPP
#define MONODG_CORE_IONICS_HPP

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace monodg {

constexpr int kMaxCellStates = 8;

// Per-node reaction evaluation. dphi excludes the stimulus; gates are
// reported as (h_inf, tau) pairs so the exponential update can be applied,
// ds is the plain rate for every component (gates included) for use in the
// temporal error indicator and forward-Euler updates of non-gates.
struct IonicRates {
  double dphi = 0.0;  // mV/ms
  std::array<double, kMaxCellStates> ds{};
  std::array<double, kMaxCellStates> h_inf{};
  std::array<double, kMaxCellStates> tau{};
};

// Cell model interface. Voltage is physical (mV); models that are defined
// on a normalized potential map it internally via phi = phi0 + scale * v.
class CellModel {
 public:
  virtual ~CellModel() = default;
  virtual std::string_view name() const = 0;
  virtual int n_states() const = 0;
  virtual bool is_gate(int k) const = 0;
  virtual double rest_phi() const = 0;
  virtual void rest_states(std::span<double> s) const = 0;
  // Throws NumericalDomainError on non-finite inputs.
  virtual void eval(double phi, std::span<const double> s, IonicRates& out) const = 0;

  // Set a named parameter; throws std::invalid_argument for unknown names.
  virtual void set_parameter(const std::string& key, double value) = 0;
};

// Two-variable excitable membrane with one Hodgkin-Huxley style recovery
// gate h: dv = h v^2 (1-v)/tau_in - v/tau_out, gate opens below v_gate.
class MitchellSchaeffer final : public CellModel {
 public:
  double tau_in = 0.3;
  double tau_out = 6.0;
  double tau_open = 120.0;
  double tau_close = 150.0;
  double v_gate = 0.13;
  double phi_rest_mv = -85.0;
  double phi_scale_mv = 100.0;

  std::string_view name() const override { return "mitchell-schaeffer"; }
  int n_states() const override { return 1; }
  bool is_gate(int k) const override { return k == 0; }
  double rest_phi() const override { return phi_rest_mv; }
  void rest_states(std::span<double> s) const override { s[0] = 1.0; }
  void eval(double phi, std::span<const double> s, IonicRates& out) const override;
  void set_parameter(const std::string& key, double value) override;
};

// Gateless two-variable smoke-test model (Rogers-McCulloch form of the
// FitzHugh-Nagumo equations, time in ms on the same normalized potential).
class FitzHughNagumo final : public CellModel {
 public:
  double a = 0.13;
  double b = 0.013;
  double c1 = 0.26;
  double c2 = 0.1;
  double d = 1.0;
  double phi_rest_mv = -85.0;
  double phi_scale_mv = 100.0;

  std::string_view name() const override { return "fitzhugh-nagumo"; }
  int n_states() const override { return 1; }
  bool is_gate(int) const override { return false; }
  double rest_phi() const override { return phi_rest_mv; }
  void rest_states(std::span<double> s) const override { s[0] = 0.0; }
  void eval(double phi, std::span<const double> s, IonicRates& out) const override;
  void set_parameter(const std::string& key, double value) override;
};

// Factory for "mitchell-schaeffer" / "fitzhugh-nagumo" with parameter
// overrides applied afterwards.
std::unique_ptr<CellModel> make_cell_model(
    const std::string& name, const std::map<std::string, double>& overrides = {});

// One partitioned step: exponential (Rush-Larsen) update for gate
// components, forward Euler for the rest. `rates` must come from eval() at
// (phi, s). Gates stay in [0,1] for any dt > 0.
void rush_larsen_step(const CellModel& model, const IonicRates& rates,
                      std::span<double> s, double dt);

// Box- or ball-supported stimulus with linear spatial decay from the center
// and linear temporal decay over [t_start, t_end]. Returned value is the
// rate contribution to dphi/dt (mV/ms); positive amplitude depolarizes.
struct StimulusProtocol {
  enum class Shape { none, box, ball };
  Shape shape = Shape::none;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> half_size{0.0, 0.0};  // box half-extent per axis, mm
  double radius = 0.0;                        // ball radius, mm
  double amplitude = 0.0;                     // mV/ms at the center at t_start
  double t_start = 0.0, t_end = 0.0;          // ms

  double eval(std::array<double, 2> x, double t, int dim) const;
};

}  // namespace monodg

#endif
