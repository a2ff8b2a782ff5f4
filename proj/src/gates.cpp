#include "snappa/gates.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "snappa/errors.hpp"
#include "snappa/optimize.hpp"

namespace snappa {

void SnappaSpec::validate(const HilbertDims& dims) const {
  dims.validate();
  std::set<int> seen;
  for (const Transition& t : transitions) {
    if (t.n < 0) throw InvariantError("negative Fock index in gate spec");
    if (t.n + 1 >= dims.cavity_levels) {
      throw DimensionError("transition " + std::to_string(t.n) + " -> " + std::to_string(t.n + 1) +
                           " outside the cavity truncation");
    }
    if (!seen.insert(t.n).second) throw InvariantError("duplicate Fock index in gate spec");
    if (parity_recovery && t.n % 2 == 0) throw InvariantError("parity recovery needs odd Fock indices");
  }
}

namespace {

/// Swap-with-phase on the pair (lower -> upper): |lower> -> e^{i theta}|upper>.
Operator block_gate(const SnappaSpec& spec, const HilbertDims& dims, bool adding) {
  spec.validate(dims);
  Matrix u = Matrix::Identity(dims.size(), dims.size());
  for (const Transition& t : spec.transitions) {
    const int from = adding ? dims.index(0, t.n) : dims.index(0, t.n + 1);
    const int to = adding ? dims.index(1, t.n + 1) : dims.index(1, t.n);
    const Complex ph = std::polar(1.0, t.theta);
    u(from, from) = 0.0;
    u(to, to) = 0.0;
    u(to, from) = ph;
    u(from, to) = std::conj(ph);
  }
  return Operator(dims, std::move(u));
}

Vector pad(const Vector& v, int levels) {
  if (v.size() > levels) {
    if (v.tail(v.size() - levels).norm() > 1e-12) throw DimensionError("target exceeds the padded space");
    return v.head(levels);
  }
  Vector out = Vector::Zero(levels);
  out.head(v.size()) = v;
  return out;
}

Vector run_program(const PrepProgram& p, const DisplacementBasis<double>& basis) {
  const int levels = basis.levels();
  Vector psi = Vector::Zero(levels);
  psi[0] = 1.0;
  for (int stage = 0; stage < 3; ++stage) {
    psi = basis.apply(p.displacements[stage], psi);
    if (stage < 2) {
      const auto& phases = p.snap_phases[stage];
      const int k_max = std::min<int>(levels, static_cast<int>(phases.size()));
      for (int k = 0; k < k_max; ++k) psi[k] *= std::polar(1.0, phases[k]);
    }
  }
  return psi;
}

PrepProgram unpack(const RVector<double>& x, int snap_levels) {
  PrepProgram p;
  for (int i = 0; i < 3; ++i) p.displacements[i] = Complex(x[2 * i], x[2 * i + 1]);
  for (int s = 0; s < 2; ++s) {
    p.snap_phases[s].resize(snap_levels);
    for (int k = 0; k < snap_levels; ++k) p.snap_phases[s][k] = x[6 + s * snap_levels + k];
  }
  return p;
}

}  // namespace

Operator snappa_ideal(const SnappaSpec& spec, const HilbertDims& dims) { return block_gate(spec, dims, true); }

Operator snapps_ideal(const SnappaSpec& spec, const HilbertDims& dims) { return block_gate(spec, dims, false); }

Operator ideal_gate(const SnappaSpec& spec, const HilbertDims& dims) {
  return spec.direction == Direction::addition ? snappa_ideal(spec, dims) : snapps_ideal(spec, dims);
}

Operator snap_ideal(const std::vector<double>& phases, const HilbertDims& dims) {
  if (static_cast<int>(phases.size()) > dims.cavity_levels) throw DimensionError("more SNAP phases than Fock levels");
  Matrix u = Matrix::Identity(dims.size(), dims.size());
  for (int q = 0; q < dims.qubit_levels; ++q) {
    for (std::size_t n = 0; n < phases.size(); ++n) {
      const int i = dims.index(q, static_cast<int>(n));
      u(i, i) = std::polar(1.0, phases[n]);
    }
  }
  return Operator(dims, std::move(u));
}

Operator cavity_rotation(double angle, const HilbertDims& dims) {
  std::vector<double> phases(dims.cavity_levels);
  for (int n = 0; n < dims.cavity_levels; ++n) phases[n] = angle * n;
  return snap_ideal(phases, dims);
}

State kerr_rotation_compensation(const State& state, double angle) {
  const HilbertDims& dims = state.dims();
  Vector diag(dims.size());
  for (int q = 0; q < dims.qubit_levels; ++q) {
    for (int n = 0; n < dims.cavity_levels; ++n) diag[dims.index(q, n)] = std::polar(1.0, angle * n);
  }
  if (state.is_pure()) return State::pure(dims, diag.cwiseProduct(state.vector()));
  const Matrix rho = diag.asDiagonal() * state.density() * diag.conjugate().asDiagonal();
  return State::mixed(dims, rho);
}

Vector prep_cavity_amplitudes(const PrepProgram& program, int levels) {
  return run_program(program, DisplacementBasis<double>(levels));
}

State prepare_state(const PrepProgram& program, const HilbertDims& dims, const PrepOptions& options) {
  dims.validate();
  const int work = std::max(options.work_levels, dims.cavity_levels);
  const Vector full = prep_cavity_amplitudes(program, work);
  Vector cavity = full.head(dims.cavity_levels);
  if (cavity.norm() < 0.5) throw InvariantError("prepared state leaks out of the cavity truncation");
  cavity /= cavity.norm();
  return product_state(dims, cavity, 0);
}

double prep_overlap(const PrepProgram& program, const Vector& target, const PrepOptions& options) {
  const Vector t = pad(target, options.work_levels).normalized();
  return std::norm(t.dot(prep_cavity_amplitudes(program, options.work_levels)));
}

PrepProgram solve_prep(const Vector& target, const PrepOptions& options) {
  const int work = options.work_levels;
  const int k = options.snap_levels;
  if (k > work) throw InvariantError("SNAP levels exceed the padded space");
  const Vector t = pad(target, work).normalized();
  int support = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) > 1e-12) support = static_cast<int>(i);
  }
  if (support > 6) throw InvariantError("preparation targets must live on Fock levels 0..6");

  const DisplacementBasis<double> basis(work);
  const ObjectiveFn cost = [&](const RVector<double>& x) {
    return 1.0 - std::norm(t.dot(run_program(unpack(x, k), basis)));
  };

  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> disp(-1.5, 1.5);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  BfgsOptions bfgs;
  bfgs.max_iterations = options.max_iterations;
  bfgs.value_tolerance = 1e-6;
  bfgs.gradient_tolerance = 1e-10;

  RVector<double> best;
  double best_cost = 2.0;
  for (int start = 0; start < options.starts; ++start) {
    RVector<double> x0(6 + 2 * k);
    for (int i = 0; i < 6; ++i) x0[i] = disp(rng);
    for (int i = 6; i < x0.size(); ++i) x0[i] = phase(rng);
    const BfgsResult r = minimize_bfgs(cost, x0, bfgs);
    if (r.value < best_cost) {
      best_cost = r.value;
      best = r.x;
    }
    if (best_cost <= bfgs.value_tolerance) break;
  }
  const double overlap = 1.0 - best_cost;
  if (overlap < options.target_overlap) {
    std::ostringstream msg;
    msg << "state preparation search reached overlap " << overlap << " < " << options.target_overlap;
    throw ConvergenceError(msg.str(), overlap);
  }
  return unpack(best, k);
}

}  // namespace snappa
