#ifndef MONODG_CORE_ERRORS_HPP
#define MONODG_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace monodg {

// Thrown when a cached object (operators, field layout) is used against a
// mesh generation it was not built for, or when ids refer to inactive
// elements.
struct StaleTopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Field vector does not match the active-element layout it is used with.
struct LayoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometrically degenerate element (zero or negative measure).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values fed into a cell model.
struct NumericalDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solution left the representable range during time marching.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, double t_first_bad)
      : std::runtime_error(what), t_first_bad(t_first_bad) {}
  double t_first_bad;
};

// Configuration file problem; carries the key path and line when known.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, std::string key = {}, int line = 0)
      : std::runtime_error(what), key(std::move(key)), line(line) {}
  std::string key;
  int line;
};

}  // namespace monodg

#endif
