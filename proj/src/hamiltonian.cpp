#include "snappa/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace snappa {

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kkHz = kTwoPi * 1e3;

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

SystemParams SystemParams::table_s1() {
  SystemParams p;
  p.omega_q = 5523.0 * kMHz;
  p.omega_c = 3581.0 * kMHz;
  p.chi = 1.44 * kMHz;
  p.chi_prime = 3.0 * kkHz;
  p.kerr_c = 2.2 * kkHz;
  p.alpha_q = 231.0 * kMHz;
  p.t1_qubit = 80e-6;
  p.t2_qubit = 20e-6;
  p.t1_cavity = 567e-6;
  p.delta = 30.0 * kMHz;
  return p;
}

void SystemParams::validate() const {
  for (double f : {omega_q, omega_c, chi, alpha_q, delta}) {
    if (!(std::isfinite(f) && f > 0.0)) throw InvariantError("system frequencies must be positive");
  }
  if (!finite_nonnegative(chi_prime) || !finite_nonnegative(kerr_c)) {
    throw InvariantError("chi_prime and kerr_c must be non-negative");
  }
  if (!(alpha_q > delta)) throw InvariantError("drive detuning must stay below the qubit anharmonicity");
  for (double t : {t1_qubit, t2_qubit, t1_cavity}) {
    if (!finite_nonnegative(t)) throw InvariantError("coherence times must be non-negative");
  }
  if (t1_qubit > 0.0 && t2_qubit > 2.0 * t1_qubit) throw InvariantError("T2 exceeds 2 T1");
}

double SystemParams::pure_dephasing_rate() const {
  if (t2_qubit <= 0.0) return 0.0;
  const double relax = t1_qubit > 0.0 ? 1.0 / (2.0 * t1_qubit) : 0.0;
  return std::max(0.0, 1.0 / t2_qubit - relax);
}

void StarkFit::validate() const {
  if (!finite_nonnegative(eta1) || !finite_nonnegative(eta2) || !finite_nonnegative(eta12)) {
    throw InvariantError("Stark fit multipliers must be finite and non-negative");
  }
}

Operator static_hamiltonian(const SystemParams& params, const HilbertDims& dims) {
  Matrix h = Matrix::Zero(dims.size(), dims.size());
  for (int q = 0; q < dims.qubit_levels; ++q) {
    for (int n = 0; n < dims.cavity_levels; ++n) {
      const double pairs = 0.5 * n * (n - 1);
      double e = -params.kerr_c * pairs;
      if (q == 1) e += -params.chi * n - params.chi_prime * pairs;
      h(dims.index(q, n), dims.index(q, n)) = e;
    }
  }
  return Operator(dims, std::move(h));
}

StarkShift stark_shifts(double xi_q, std::span<const double> xi_c, const SystemParams& params,
                        const StarkFit& fit) {
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  for (double x : xi_c) {
    sum_sq += x * x;
    sum_abs += std::abs(x);
  }
  const double q2 = xi_q * xi_q;
  const double cross = fit.eta12 * params.chi * std::abs(xi_q) * sum_abs;
  StarkShift s;
  s.qubit = -2.0 * fit.eta1 * params.alpha_q * q2 - fit.eta2 * params.chi * sum_sq + cross;
  s.cavity = -2.0 * fit.eta2 * params.kerr_c * sum_sq - fit.eta1 * params.chi * q2 + cross;
  return s;
}

double resonance_frequency(const SystemParams& params, int n, const StarkShift& stark) {
  return (params.omega_q + stark.qubit) + (params.omega_c + stark.cavity - (n + 1) * params.chi);
}

double model_resonance_correction(const SystemParams& params, int n, const StarkShift& stark) {
  return stark.sum() - params.kerr_c * n - 0.5 * params.chi_prime * n * (n + 1);
}

double pi_pulse_cavity_amplitude(const SystemParams& params, int n, double xi_q, const EnvelopeSpec& env) {
  if (xi_q == 0.0) throw InvariantError("qubit amplitude must be non-zero");
  return kPi / (2.0 * std::sqrt(n + 1.0) * env.squared_area() * params.chi * std::abs(xi_q));
}

EffectiveHamiltonian::EffectiveHamiltonian(const SystemParams& params, const HilbertDims& dims,
                                           std::vector<DriveTone> tones, const StarkFit& fit,
                                           ModelOptions options)
    : dims_(dims), params_(params), tones_(std::move(tones)), fit_(fit), options_(options) {
  fit_.validate();
  std::set<int> targets;
  int cavity_tones = 0;
  for (std::size_t k = 0; k < tones_.size(); ++k) {
    const DriveTone& tone = tones_[k];
    tone.envelope.validate();
    if (tone.target == Mode::qubit) {
      if (qubit_tone_ >= 0) throw InvariantError("more than one qubit tone");
      qubit_tone_ = static_cast<int>(k);
      continue;
    }
    ++cavity_tones;
    if (tone.n_target < 0) throw InvariantError("negative Fock target");
    if (!targets.insert(tone.n_target).second) {
      throw InvariantError("duplicate cavity tone for n = " + std::to_string(tone.n_target));
    }
    n_max_ = std::max(n_max_, tone.n_target + 1);
  }
  if (!tones_.empty()) {
    if (qubit_tone_ < 0) throw InvariantError("tone set has no qubit tone");
    if (cavity_tones == 0) throw InvariantError("tone set has no cavity tone");
    const double xq = tones_[qubit_tone_].amplitude;
    for (const DriveTone& tone : tones_) {
      if (tone.target == Mode::cavity && !(std::abs(xq * tone.amplitude) < 1.0)) {
        throw InvariantError("selectivity bound |xi_q xi_c| < 1 violated for n = " +
                             std::to_string(tone.n_target));
      }
    }
  }
  dims_.validate(n_max_ > 0 ? n_max_ - 1 : 0);

  const int d = dims_.size();
  static_diag_ = static_hamiltonian(params_, dims_).matrix().diagonal().real();
  if (!options_.free_kerr) {
    for (int q = 0; q < dims_.qubit_levels; ++q)
      for (int n = 0; n < dims_.cavity_levels; ++n)
        static_diag_[dims_.index(q, n)] += params_.kerr_c * 0.5 * n * (n - 1);
  }
  n_qubit_ = RVector<double>::Zero(d);
  n_cavity_ = RVector<double>::Zero(d);
  for (int q = 0; q < dims_.qubit_levels; ++q) {
    for (int n = 0; n < dims_.cavity_levels; ++n) {
      n_qubit_[dims_.index(q, n)] = q;
      n_cavity_[dims_.index(q, n)] = n;
    }
  }
  sideband_ = (creation(dims_, Mode::qubit) * creation(dims_, Mode::cavity)).matrix();
}

StarkShift EffectiveHamiltonian::stark_at(double t) const {
  if (tones_.empty()) return {};
  const DriveTone& qt = tones_[qubit_tone_];
  const double xq = qt.amplitude * envelope_value(qt.envelope, t);
  std::vector<double> xc;
  for (const DriveTone& tone : tones_) {
    if (tone.target == Mode::cavity) xc.push_back(tone.amplitude * envelope_value(tone.envelope, t));
  }
  return stark_shifts(xq, xc, params_, fit_);
}

StarkShift EffectiveHamiltonian::plateau_stark() const {
  if (tones_.empty()) return {};
  std::vector<double> xc;
  for (const DriveTone& tone : tones_)
    if (tone.target == Mode::cavity) xc.push_back(tone.amplitude);
  return stark_shifts(tones_[qubit_tone_].amplitude, xc, params_, fit_);
}

Matrix EffectiveHamiltonian::matrix_at(double t) const {
  const StarkShift s = stark_at(t);
  const RVector<double> diag = static_diag_ + s.qubit * n_qubit_ + s.cavity * n_cavity_;
  Matrix h = diag.cast<Complex>().asDiagonal();
  if (tones_.empty()) return h;

  const DriveTone& qt = tones_[qubit_tone_];
  const double xq = qt.amplitude * envelope_value(qt.envelope, t);
  for (const DriveTone& tone : tones_) {
    if (tone.target != Mode::cavity) continue;
    const double xc = tone.amplitude * envelope_value(tone.envelope, t);
    if (xq == 0.0 || xc == 0.0) continue;
    const double rotation = ((tone.n_target + 1) * params_.chi - tone.stark_correction) * t;
    const Complex g = -params_.chi * xq * xc * std::polar(1.0, rotation + tone.phase + qt.phase);
    // Every tone couples every |n,g> to |n+1,e>; selectivity comes from the rotation.
    for (int n = 0; n + 1 < dims_.cavity_levels; ++n) {
      const int row = dims_.index(1, n + 1);
      const int col = dims_.index(0, n);
      const Complex v = g * sideband_(row, col);
      h(row, col) += v;
      h(col, row) += std::conj(v);
    }
  }
  return h;
}

double EffectiveHamiltonian::frequency_scale() const {
  double scale = (n_max_ + 1) * params_.chi;
  if (tones_.empty()) return scale;
  scale = std::max(scale, std::abs(plateau_stark().sum()));
  const double xq = tones_[qubit_tone_].amplitude;
  for (const DriveTone& tone : tones_) {
    if (tone.target != Mode::cavity) continue;
    scale = std::max(scale, std::abs(effective_coupling(params_, xq, tone.amplitude)) * std::sqrt(n_max_ + 1.0));
  }
  return scale;
}

double EffectiveHamiltonian::pulse_duration() const {
  double d = 0.0;
  for (const DriveTone& tone : tones_) d = std::max(d, tone.envelope.total_duration);
  return d;
}

Operator effective_hamiltonian(const SystemParams& params, const HilbertDims& dims,
                               const std::vector<DriveTone>& tones, const StarkFit& fit, double t,
                               ModelOptions options) {
  return EffectiveHamiltonian(params, dims, tones, fit, options).at(t);
}

Operator conserved_charge(const HilbertDims& dims) {
  return number_op(dims, Mode::cavity) - number_op(dims, Mode::qubit);
}

}  // namespace snappa
