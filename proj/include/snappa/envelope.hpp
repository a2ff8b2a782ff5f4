#pragma once

#include <cmath>

#include "snappa/errors.hpp"
#include "snappa/linalg.hpp"

namespace snappa {

enum class RampShape { sin2 };

/// Flat-top pulse with sin^2 edges. `ramp_up_only` keeps the amplitude on after
/// the rise; calibration sweeps use it to read a whole duration scan off one trajectory.
struct EnvelopeSpec {
  double total_duration = 4.2e-6;
  double ramp_duration = 100e-9;
  RampShape ramp_shape = RampShape::sin2;
  bool ramp_up_only = false;

  void validate() const {
    if (!(total_duration > 0.0)) throw InvariantError("envelope duration must be positive");
    if (ramp_duration < 0.0) throw InvariantError("envelope ramp must be non-negative");
    if (!ramp_up_only && 2.0 * ramp_duration > total_duration) {
      throw InvariantError("envelope ramps longer than the pulse");
    }
  }

  /// Integral of envelope^2 over [0, total_duration]: the sideband pulse area per unit coupling.
  double squared_area() const {
    if (ramp_up_only) return total_duration - 0.625 * ramp_duration;
    return total_duration - 1.25 * ramp_duration;
  }
};

/// Envelope value in [0, 1]; zero outside [0, total_duration].
inline double envelope_value(const EnvelopeSpec& env, double t) {
  if (t < 0.0 || t > env.total_duration) return 0.0;
  const double r = env.ramp_duration;
  if (r <= 0.0) return 1.0;
  auto edge = [r](double x) {
    const double s = std::sin(0.5 * kPi * x / r);
    return s * s;
  };
  if (t < r) return edge(t);
  if (!env.ramp_up_only && t > env.total_duration - r) return edge(env.total_duration - t);
  return 1.0;
}

}  // namespace snappa
