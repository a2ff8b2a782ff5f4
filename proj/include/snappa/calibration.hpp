#pragma once

// Simulated calibration of the off-resonant drives: amplitude relation scans,
// Rabi chevrons, the iterative multi-tone loop and Wigner-point phase
// calibration. "Measurements" are exact expectation values unless a shot count
// is set, in which case each one is replaced by a binomial sample.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "snappa/config.hpp"
#include "snappa/dynamics.hpp"

namespace snappa {

struct ToneCalibration {
  int n = 0;
  double amplitude = 0.0;  ///< xi_c
  double frequency = 0.0;  ///< dw_n, rad/s
  double phase = 0.0;      ///< tone phase that gives Fock n+1 zero relative phase
};

struct CalibrationSnapshot {
  int step = 0;
  int cycle = 0;
  int target_n = -1;  ///< tone updated in this step, -1 for the starting point
  double qubit_amplitude = 0.0;
  std::vector<ToneCalibration> tones;
};

struct CalibrationTolerance {
  double amplitude = 0.01;           ///< relative
  double frequency = kTwoPi * 10e3;  ///< rad/s
};

struct CalibrationState {
  double qubit_amplitude = 0.04;
  EnvelopeSpec envelope{4.2e-6, 100e-9};
  std::vector<ToneCalibration> tones;  ///< ascending n
  std::vector<CalibrationSnapshot> history;
  bool converged = false;
  int cycles = 0;

  std::vector<int> fock_targets() const;
  const ToneCalibration& tone(int n) const;
  ToneCalibration& tone(int n);
  /// Qubit tone first, then one cavity tone per entry. `thetas` (by n) are the
  /// desired relative phases and are added to the calibrated phase offsets.
  std::vector<DriveTone> drive_tones(const std::map<int, double>& thetas = {}) const;
  CalibrationSnapshot snapshot(int step, int cycle, int target_n) const;
  void validate() const;
};

/// Analytic starting point: pi-pulse amplitudes for the given qubit amplitude and
/// plateau Stark corrections from the shift model. Phases zero.
CalibrationState analytic_calibration(const SystemParams& params, const std::vector<int>& fock_targets,
                                      double qubit_amplitude, const EnvelopeSpec& envelope,
                                      const StarkFit& fit = StarkFit::fitted());

struct MeasurementOptions {
  HilbertDims dims{2, 12};
  double step = 1e-9;
  StarkFit fit = StarkFit::fitted();
  ModelOptions model{};
  int shots = 0;  ///< 0: exact expectation values
  std::uint64_t seed = 20240611;
};

/// Applies shot noise to probabilities when options.shots > 0.
class Sampler {
 public:
  explicit Sampler(const MeasurementOptions& options) : shots_(options.shots), rng_(options.seed) {}
  double probability(double p);
  /// Parity-type signal in [-1, 1] measured as a two-outcome probability.
  double signed_value(double s) { return 2.0 * probability(0.5 * (1.0 + s)) - 1.0; }

 private:
  int shots_;
  std::mt19937_64 rng_;
};

struct AmplitudeScan {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> ridge_aq;
  std::vector<double> ridge_ac;
  std::vector<double> ridge_population;
  Eigen::MatrixXd populations;  ///< rows follow aq_values, columns ac_values
};

/// Excited-state population after a fixed-length pulse from |n>|g> for every
/// (A_q, A_c) pair. The drive frequency follows the Stark model for each pair.
/// The ridge is the per-column argmax (refined by a parabola through its
/// neighbours) and A_c = a A_q + b is a population-weighted fit through it.
AmplitudeScan amplitude_rabi_scan(const SystemParams& params, int n, const std::vector<double>& aq_values,
                                  const std::vector<double>& ac_values, const EnvelopeSpec& envelope,
                                  const MeasurementOptions& options = {});

struct ChevronWindow {
  double max_duration = 12e-6;
  double sample_spacing = 20e-9;
  double detuning_lo = -kTwoPi * 400e3;  ///< relative to the tone's current dw_n
  double detuning_hi = kTwoPi * 400e3;
  int detuning_count = 15;
  double rate_max = kTwoPi * 3e6;
  double residual_limit = 0.05;
};

struct ChevronResult {
  double pi_duration = 0.0;       ///< on resonance, for the window's ramp-up-only envelope
  double frequency_offset = 0.0;  ///< add to dw_n to reach resonance
  double rabi_rate = 0.0;         ///< on-resonance angular Rabi frequency
  double fit_quality = 0.0;       ///< rms residual of the duration fits
  double curvature = 0.0;         ///< d^2(rate^2)/d(detuning)^2 / 2, ideally 1
  std::vector<double> detunings;
  std::vector<double> rates;
  Eigen::MatrixXd populations;    ///< rows follow detunings
  std::vector<double> times;
};

/// Duration x detuning scan of the target tone with every tone on. Each detuning
/// is one ramp-up-only trajectory sampled along the plateau; a sinusoid fit gives
/// its Rabi rate and a parabola in rate^2 gives the centre and the on-resonance rate.
ChevronResult chevron_search(const SystemParams& params, const std::vector<DriveTone>& tones, int target_n,
                             const ChevronWindow& window = {}, const MeasurementOptions& options = {});

struct IterativeOptions {
  CalibrationTolerance tolerance{};
  int max_cycles = 20;
  ChevronWindow window{};
};

/// Visits the tones in zig-zag order (1, 3, 5, 3, 1, ...), re-running the chevron
/// for one tone per step with all tones on and resetting that tone's amplitude
/// and dw_n. A cycle is one sweep; the loop stops after the first cycle whose
/// parameters moved less than the tolerance.
CalibrationState iterative_multidrive_calibration(const SystemParams& params, CalibrationState guess,
                                                  const IterativeOptions& iterative = {},
                                                  const MeasurementOptions& options = {});

struct PhaseCalibration {
  double phi0 = 0.0;    ///< peak of the cosine, relative to the probe's current phase
  double offset = 0.0;  ///< absolute tone phase that maps to zero relative phase
  double contrast = 0.0;
  double background = 0.0;
  double residual = 0.0;
  std::vector<double> sweep;
  std::vector<double> signal;  ///< parity units, W pi / 2
};

/// Prepares (|n_ref> + |n_probe>)/sqrt2 |g>, applies every tone while stepping the
/// probe tone's phase and records the Wigner value at alpha.
PhaseCalibration phase_calibration(const SystemParams& params, const CalibrationState& calib, int n_ref,
                                   int n_probe, Complex alpha, const MeasurementOptions& options = {},
                                   int sweep_points = 8);

/// Phase calibration of every tone against `reference` (the lowest tone if it is
/// not driven); stores the offsets in calib.
std::map<int, PhaseCalibration> calibrate_phases(const SystemParams& params, CalibrationState& calib, int reference,
                                                 const std::map<int, Complex>& wigner_points = {},
                                                 const MeasurementOptions& options = {});

struct SelectivityRow {
  int fock = 0;
  bool driven = false;
  double qubit_population = 0.0;
  double cavity_fidelity = 0.0;  ///< to |n+1> when driven, |n> otherwise
};

std::vector<SelectivityRow> verify_selectivity(const SystemParams& params, const CalibrationState& calib,
                                               const std::vector<int>& probe_focks,
                                               const MeasurementOptions& options = {});

struct PipelineOptions {
  double qubit_amplitude = 0.04;
  EnvelopeSpec envelope{4.2e-6, 100e-9};
  int reference = 1;
  std::map<int, Complex> wigner_points;  ///< by probe n; defaults fill the rest
  std::vector<double> scan_aq{0.03, 0.035, 0.04, 0.045, 0.05};
  int scan_ac_points = 17;
  IterativeOptions iterative{};
};

struct PipelineReport {
  CalibrationState state;
  std::map<int, AmplitudeScan> scans;
  std::map<int, PhaseCalibration> phases;
};

/// Amplitude scans, single-tone chevron on the lowest tone, the iterative loop and
/// phase calibration of every other tone against the reference.
PipelineReport run_calibration_pipeline(const SystemParams& params, const std::vector<int>& fock_targets,
                                        const PipelineOptions& pipeline = {},
                                        const MeasurementOptions& options = {});

/// Wigner point used when none is configured for a probe tone.
Complex default_wigner_point(int n_ref, int n_probe);

void write_calibration(Config& config, const CalibrationState& calib, const std::string& prefix = "calibration");
CalibrationState read_calibration(const Config& config, const std::string& prefix = "calibration");
/// step,cycle,target_n,qubit_amplitude, then amplitude/frequency_hz/phase per tone.
void write_history_csv(const std::string& path, const CalibrationState& calib);

/// Section prefix used for a tone set inside a calibration document, e.g. "set.1.3".
std::string calibration_prefix(const std::vector<int>& fock_targets);

}  // namespace snappa
