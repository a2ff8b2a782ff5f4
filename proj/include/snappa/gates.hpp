#pragma once

// Ideal gate operators: photon addition / subtraction with Fock-selective phases,
// SNAP phase gates, cavity frame rotations and the displacement-SNAP preparation
// sequence used to make the initial cavity states.

#include <array>
#include <cstdint>
#include <vector>

#include "snappa/hilbert.hpp"

namespace snappa {

enum class Direction { addition, subtraction };

struct Transition {
  int n = 0;
  double theta = 0.0;
};

struct SnappaSpec {
  std::vector<Transition> transitions;
  Direction direction = Direction::addition;
  bool parity_recovery = false;  ///< require every n to be odd

  void validate(const HilbertDims& dims) const;
};

/// |n,g> -> e^{i theta}|n+1,e> on each listed block, identity elsewhere.
Operator snappa_ideal(const SnappaSpec& spec, const HilbertDims& dims);
/// |n+1,g> -> e^{i theta}|n,e> on each listed block, identity elsewhere.
Operator snapps_ideal(const SnappaSpec& spec, const HilbertDims& dims);
/// Dispatches on spec.direction.
Operator ideal_gate(const SnappaSpec& spec, const HilbertDims& dims);

/// Diagonal e^{i phi_n} on the cavity, the same for both qubit states. Fock levels
/// beyond the list keep phase zero.
Operator snap_ideal(const std::vector<double>& phases, const HilbertDims& dims);

/// exp(i angle a^dag a) on the cavity.
Operator cavity_rotation(double angle, const HilbertDims& dims);
State kerr_rotation_compensation(const State& state, double angle);

struct PrepProgram {
  std::array<Complex, 3> displacements{};
  std::array<std::vector<double>, 2> snap_phases;
};

struct PrepOptions {
  int work_levels = 24;  ///< padded cavity space the sequence runs in
  int snap_levels = 10;  ///< Fock levels each SNAP addresses
  int starts = 12;
  std::uint32_t seed = 20240611;
  double target_overlap = 0.999;
  int max_iterations = 600;
};

/// Cavity amplitudes of D3 S2 D2 S1 D1 |0> in a space of `levels` Fock states.
Vector prep_cavity_amplitudes(const PrepProgram& program, int levels);

/// Runs the program in the padded space, truncates to dims and renormalises; the
/// qubit is left in |g>.
State prepare_state(const PrepProgram& program, const HilbertDims& dims, const PrepOptions& options = {});

/// Overlap |<target|psi>|^2 of the padded-space output with a cavity target.
double prep_overlap(const PrepProgram& program, const Vector& target, const PrepOptions& options = {});

/// Multi-start quasi-Newton search for a program reaching options.target_overlap.
/// Throws ConvergenceError carrying the best overlap otherwise.
PrepProgram solve_prep(const Vector& target, const PrepOptions& options = {});

}  // namespace snappa
