#pragma once

// Closed and open-system propagation under H'(t).
//
// Both integrators use piecewise-constant midpoint propagators. The generator is
// split into the independent blocks of its sparsity pattern (for H' these are the
// 2x2 {|n,g>, |n+1,e>} pairs) and each block is exponentiated exactly. The open
// system is advanced with a symmetric split: half a dissipator step, the exact
// unitary step, half a dissipator step.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "snappa/hamiltonian.hpp"

namespace snappa {

struct CollapseOperator {
  Operator op;
  double rate = 0.0;
};

/// Qubit decay (1/T1q), qubit pure dephasing and cavity decay (1/T1c). Dephasing
/// uses q^dag q at rate 2/T_phi so coherences decay as exp(-t/T2).
std::vector<CollapseOperator> collapse_set(const SystemParams& params, const HilbertDims& dims);

using HamiltonianFn = std::function<Matrix(double)>;
/// Called with (time, state) at every sample point, including t = 0 and the end.
using Observer = std::function<void(double, const State&)>;

struct EvolutionRequest {
  State initial;
  std::vector<DriveTone> tones;
  double duration = 0.0;
  double step = 1e-9;
  bool open_system = false;
  /// Derived from params when empty and open_system is set.
  std::optional<std::vector<CollapseOperator>> collapse;
  SystemParams params = SystemParams::table_s1();
  StarkFit fit = StarkFit::fitted();
  ModelOptions options{};
  /// Observer cadence in steps; 0 disables the observer.
  int sample_every = 0;
  Observer observer;
};

/// Largest step the invariant step <= 1 / (50 * scale) allows, with scale in Hz.
double max_step(const EffectiveHamiltonian& h);

State evolve_unitary(const EvolutionRequest& req);
State evolve_lindblad(const EvolutionRequest& req);
/// Dispatches on req.open_system.
State evolve(const EvolutionRequest& req);

/// Propagator for a generic time-dependent Hamiltonian with automatic block detection.
class BlockPropagator {
 public:
  /// `probe_times` are used to discover which basis states can ever couple.
  BlockPropagator(HamiltonianFn h, int dim, const std::vector<double>& probe_times);

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  /// exp(-i H(t_mid) dt) as a dense matrix.
  Matrix step(double t_mid, double dt) const;
  /// psi <- exp(-i H(t_mid) dt) psi, block by block.
  void apply(Vector& psi, double t_mid, double dt) const;

 private:
  HamiltonianFn h_;
  int dim_;
  std::vector<std::vector<int>> blocks_;
};

/// Pure-state propagation of an arbitrary Hamiltonian over [0, duration].
Vector propagate(const HamiltonianFn& h, Vector psi, double duration, double step,
                 const std::function<void(double, const Vector&)>& sample = {}, int sample_every = 0,
                 const std::vector<double>& probe_times = {});

/// Records expectation values of named observables along a trajectory.
class TraceRecorder {
 public:
  void add(std::string name, Operator op);
  void record(double t, const State& state);
  Observer observer();
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  /// CSV with header "time,<name>,..." (real parts of the expectation values).
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> names_;
  std::vector<Operator> ops_;
  std::vector<double> times_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace snappa
