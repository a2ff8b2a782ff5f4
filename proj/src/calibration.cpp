#include "snappa/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "snappa/optimize.hpp"
#include "snappa/tomography.hpp"

namespace snappa {

namespace {

double wrap_phase(double x) {
  x = std::remainder(x, kTwoPi);
  return x <= -kPi ? x + kTwoPi : x;
}

State run_pulse(const SystemParams& params, const State& initial, const std::vector<DriveTone>& tones,
                double duration, const MeasurementOptions& options, const Observer& observer = {},
                int sample_every = 0) {
  EvolutionRequest req{initial};
  req.tones = tones;
  req.duration = duration;
  req.step = options.step;
  req.params = params;
  req.fit = options.fit;
  req.options = options.model;
  req.observer = observer;
  req.sample_every = sample_every;
  return evolve_unitary(req);
}

double pulse_length(const std::vector<DriveTone>& tones) {
  double t = 0.0;
  for (const DriveTone& tone : tones) t = std::max(t, tone.envelope.total_duration);
  return t;
}

// Vertex of the parabola through three points, clamped to their span.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d1 = (y1 - y0) / (x1 - x0);
  const double d2 = (y2 - y1) / (x2 - x1);
  const double curv = (d2 - d1) / (x2 - x0);
  if (curv >= 0.0) return x1;
  const double v = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
  return std::clamp(v, x0, x2);
}

bool within(const std::vector<ToneCalibration>& a, const std::vector<ToneCalibration>& b,
            const CalibrationTolerance& tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].amplitude - b[i].amplitude) > tol.amplitude * std::abs(b[i].amplitude)) return false;
    if (std::abs(a[i].frequency - b[i].frequency) > tol.frequency) return false;
  }
  return true;
}

double largest_relative_change(const std::vector<ToneCalibration>& a, const std::vector<ToneCalibration>& b,
                               const CalibrationTolerance& tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i].amplitude - b[i].amplitude) / (tol.amplitude * std::abs(b[i].amplitude)));
    worst = std::max(worst, std::abs(a[i].frequency - b[i].frequency) / tol.frequency);
  }
  return worst;
}

Vector two_level_superposition(int a, int b, double theta, int levels) {
  Vector v = Vector::Zero(levels);
  v[a] += 1.0;
  v[b] += std::polar(1.0, theta);
  return v.normalized();
}

}  // namespace

std::vector<int> CalibrationState::fock_targets() const {
  std::vector<int> ns;
  for (const ToneCalibration& t : tones) ns.push_back(t.n);
  return ns;
}

const ToneCalibration& CalibrationState::tone(int n) const {
  for (const ToneCalibration& t : tones) {
    if (t.n == n) return t;
  }
  throw InvariantError("no calibrated tone for n = " + std::to_string(n));
}

ToneCalibration& CalibrationState::tone(int n) {
  return const_cast<ToneCalibration&>(static_cast<const CalibrationState&>(*this).tone(n));
}

std::vector<DriveTone> CalibrationState::drive_tones(const std::map<int, double>& thetas) const {
  for (const auto& [n, theta] : thetas) tone(n);
  std::vector<DriveTone> out;
  out.push_back(DriveTone{Mode::qubit, 0, 0.0, qubit_amplitude, 0.0, envelope});
  for (const ToneCalibration& t : tones) {
    const auto it = thetas.find(t.n);
    const double theta = it == thetas.end() ? 0.0 : it->second;
    out.push_back(DriveTone{Mode::cavity, t.n, t.frequency, t.amplitude, t.phase + theta, envelope});
  }
  return out;
}

CalibrationSnapshot CalibrationState::snapshot(int step, int cycle, int target_n) const {
  return CalibrationSnapshot{step, cycle, target_n, qubit_amplitude, tones};
}

void CalibrationState::validate() const {
  envelope.validate();
  if (!(qubit_amplitude > 0.0 && std::isfinite(qubit_amplitude))) {
    throw InvariantError("qubit amplitude must be positive");
  }
  if (tones.empty()) throw InvariantError("calibration has no cavity tones");
  for (std::size_t i = 0; i < tones.size(); ++i) {
    const ToneCalibration& t = tones[i];
    if (t.n < 0) throw InvariantError("negative Fock target");
    if (i > 0 && t.n <= tones[i - 1].n) throw InvariantError("tones must be listed by increasing n without repeats");
    if (!(t.amplitude > 0.0) || !std::isfinite(t.frequency) || !std::isfinite(t.phase)) {
      throw InvariantError("tone n = " + std::to_string(t.n) + " has an invalid setting");
    }
  }
}

CalibrationState analytic_calibration(const SystemParams& params, const std::vector<int>& fock_targets,
                                      double qubit_amplitude, const EnvelopeSpec& envelope, const StarkFit& fit) {
  std::vector<int> ns = fock_targets;
  std::sort(ns.begin(), ns.end());
  CalibrationState c;
  c.qubit_amplitude = qubit_amplitude;
  c.envelope = envelope;
  std::vector<double> amps;
  for (int n : ns) amps.push_back(pi_pulse_cavity_amplitude(params, n, qubit_amplitude, envelope));
  const StarkShift s = stark_shifts(qubit_amplitude, amps, params, fit);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    c.tones.push_back({ns[i], amps[i], model_resonance_correction(params, ns[i], s), 0.0});
  }
  c.validate();
  c.history.push_back(c.snapshot(0, 0, -1));
  return c;
}

double Sampler::probability(double p) {
  p = std::clamp(p, 0.0, 1.0);
  if (shots_ <= 0) return p;
  std::binomial_distribution<int> draw(shots_, p);
  return static_cast<double>(draw(rng_)) / shots_;
}

AmplitudeScan amplitude_rabi_scan(const SystemParams& params, int n, const std::vector<double>& aq_values,
                                  const std::vector<double>& ac_values, const EnvelopeSpec& envelope,
                                  const MeasurementOptions& options) {
  if (aq_values.empty() || ac_values.size() < 3) throw InvariantError("amplitude scan needs values on both axes");
  for (double v : aq_values) {
    if (!(v >= 0.0 && std::isfinite(v))) throw InvariantError("qubit amplitudes must be non-negative");
  }
  for (std::size_t j = 0; j < ac_values.size(); ++j) {
    if (!(ac_values[j] > 0.0 && std::isfinite(ac_values[j]))) throw InvariantError("cavity amplitudes must be positive");
    if (j > 0 && ac_values[j] <= ac_values[j - 1]) throw InvariantError("cavity amplitudes must increase");
  }

  Sampler sampler(options);
  AmplitudeScan scan;
  scan.populations.resize(static_cast<Eigen::Index>(aq_values.size()), static_cast<Eigen::Index>(ac_values.size()));
  const State initial = State::basis(options.dims, 0, n);
  for (std::size_t i = 0; i < aq_values.size(); ++i) {
    for (std::size_t j = 0; j < ac_values.size(); ++j) {
      const double aq = aq_values[i], ac = ac_values[j];
      const StarkShift s = stark_shifts(aq, std::vector<double>{ac}, params, options.fit);
      const std::vector<DriveTone> tones{
          {Mode::qubit, 0, 0.0, aq, 0.0, envelope},
          {Mode::cavity, n, model_resonance_correction(params, n, s), ac, 0.0, envelope}};
      const State out = run_pulse(params, initial, tones, envelope.total_duration, options);
      scan.populations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sampler.probability(qubit_population(out));
    }
  }

  const Eigen::Index m = scan.populations.cols();
  for (Eigen::Index i = 0; i < scan.populations.rows(); ++i) {
    Eigen::Index j = 0;
    const double peak = scan.populations.row(i).maxCoeff(&j);
    if (peak < 0.1) continue;
    double ac = ac_values[j];
    if (j > 0 && j + 1 < m) {
      ac = parabola_vertex(ac_values[j - 1], scan.populations(i, j - 1), ac_values[j], peak, ac_values[j + 1],
                           scan.populations(i, j + 1));
    }
    scan.ridge_aq.push_back(aq_values[i]);
    scan.ridge_ac.push_back(ac);
    scan.ridge_population.push_back(peak);
  }
  if (scan.ridge_aq.empty()) throw FitError("no ridge: every population stays below 0.1");
  if (std::set<double>(scan.ridge_aq.begin(), scan.ridge_aq.end()).size() < 2) {
    throw FitError("ridge found for a single qubit amplitude only");
  }

  const Eigen::Index k = static_cast<Eigen::Index>(scan.ridge_aq.size());
  Eigen::MatrixXd design(k, 2);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const double w = std::sqrt(scan.ridge_population[r]);
    design(r, 0) = w * scan.ridge_aq[r];
    design(r, 1) = w;
    rhs[r] = w * scan.ridge_ac[r];
  }
  const Eigen::Vector2d c = design.colPivHouseholderQr().solve(rhs);
  scan.slope = c[0];
  scan.intercept = c[1];
  return scan;
}

ChevronResult chevron_search(const SystemParams& params, const std::vector<DriveTone>& tones, int target_n,
                             const ChevronWindow& window, const MeasurementOptions& options) {
  int target = -1;
  for (std::size_t k = 0; k < tones.size(); ++k) {
    if (tones[k].target == Mode::cavity && tones[k].n_target == target_n) target = static_cast<int>(k);
  }
  if (target < 0) throw InvariantError("chevron target n = " + std::to_string(target_n) + " has no tone");
  if (!(window.detuning_hi > window.detuning_lo) || window.detuning_count < 3) {
    throw InvariantError("chevron needs at least three increasing detunings");
  }
  const double ramp = tones[target].envelope.ramp_duration;
  if (!(window.max_duration > ramp + 8 * window.sample_spacing)) throw InvariantError("chevron window too short");

  std::vector<DriveTone> base = tones;
  for (DriveTone& t : base) {
    t.envelope.total_duration = window.max_duration;
    t.envelope.ramp_up_only = true;
  }
  const int every = std::max(1, static_cast<int>(std::lround(window.sample_spacing / options.step)));
  const double plateau = window.max_duration - ramp;

  Sampler sampler(options);
  ChevronResult out;
  std::vector<double> weights;
  std::vector<std::vector<double>> rows;
  double rss = 0.0;
  int samples = 0;
  for (int j = 0; j < window.detuning_count; ++j) {
    const double delta =
        window.detuning_lo + (window.detuning_hi - window.detuning_lo) * j / (window.detuning_count - 1);
    std::vector<DriveTone> trial = base;
    trial[target].stark_correction += delta;
    std::vector<double> times, pops;
    run_pulse(params, State::basis(options.dims, 0, target_n), trial, window.max_duration, options,
              [&](double t, const State& s) {
                times.push_back(t);
                pops.push_back(sampler.probability(qubit_population(s)));
              },
              every);
    std::vector<double> ft, fy;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= ramp) {
        ft.push_back(times[i]);
        fy.push_back(pops[i]);
      }
    }
    const SinusoidFit fit = fit_sinusoid(ft, fy, kPi / plateau, window.rate_max);
    rss += fit.rms * fit.rms * ft.size();
    samples += static_cast<int>(ft.size());
    out.detunings.push_back(delta);
    out.rates.push_back(fit.frequency);
    weights.push_back(fit.amplitude());
    rows.push_back(pops);
    if (out.times.empty()) out.times = times;
  }
  out.populations.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.times.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      out.populations(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][i];
    }
  }
  out.fit_quality = std::sqrt(rss / samples);
  if (out.fit_quality > window.residual_limit) {
    throw FitError("chevron duration fits have rms residual " + std::to_string(out.fit_quality));
  }

  // rate^2 = rate0^2 + (delta - centre)^2, fitted as a general parabola.
  const Eigen::Index k = static_cast<Eigen::Index>(out.detunings.size());
  const double scale = window.detuning_hi - window.detuning_lo;
  Eigen::MatrixXd design(k, 3);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const double x = out.detunings[r] / scale;
    const double w = weights[r];
    design(r, 0) = w;
    design(r, 1) = w * x;
    design(r, 2) = w * x * x;
    rhs[r] = w * out.rates[r] * out.rates[r] / (scale * scale);
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
  out.curvature = c[2];
  if (!(c[2] > 0.5 && c[2] < 2.0)) {
    throw FitError("chevron parabola curvature " + std::to_string(c[2]) + " is not close to one");
  }
  const double centre = -c[1] / (2.0 * c[2]) * scale;
  if (centre < window.detuning_lo || centre > window.detuning_hi) {
    throw FitError("chevron centre lies outside the detuning window");
  }
  const double rate2 = (c[0] - c[1] * c[1] / (4.0 * c[2])) * scale * scale;
  if (!(rate2 > 0.0)) throw FitError("chevron parabola has no positive minimum");
  out.frequency_offset = centre;
  out.rabi_rate = std::sqrt(rate2);
  out.pi_duration = kPi / out.rabi_rate + 0.625 * ramp;
  return out;
}

CalibrationState iterative_multidrive_calibration(const SystemParams& params, CalibrationState state,
                                                  const IterativeOptions& iterative, const MeasurementOptions& options) {
  state.validate();
  state.converged = false;
  state.cycles = 0;
  if (state.history.empty()) state.history.push_back(state.snapshot(0, 0, -1));
  int step = state.history.back().step;
  const double target_rate = kPi / state.envelope.squared_area();
  const std::vector<int> ns = state.fock_targets();

  bool ascending = true;
  int last = -1;
  double worst = 0.0;
  std::set<int> settled;
  for (int cycle = 1; cycle <= iterative.max_cycles; ++cycle) {
    std::vector<int> order = ns;
    if (!ascending) std::reverse(order.begin(), order.end());
    if (order.size() > 1 && order.front() == last) order.erase(order.begin());

    const std::vector<ToneCalibration> before = state.tones;
    for (int n : order) {
      const ChevronResult r = chevron_search(params, state.drive_tones(), n, iterative.window, options);
      ToneCalibration& t = state.tone(n);
      const ToneCalibration old = t;
      t.frequency += r.frequency_offset;
      t.amplitude *= target_rate / r.rabi_rate;
      state.history.push_back(state.snapshot(++step, cycle, n));
      last = n;
      // A tone only counts as settled if no other tone moved after it was checked.
      if (within({t}, {old}, iterative.tolerance)) {
        settled.insert(n);
      } else {
        settled.clear();
      }
    }
    state.cycles = cycle;
    if (settled.size() == ns.size()) {
      state.converged = true;
      return state;
    }
    worst = largest_relative_change(state.tones, before, iterative.tolerance);
    ascending = !ascending;
  }
  throw ConvergenceError("calibration did not converge in " + std::to_string(iterative.max_cycles) + " cycles",
                         worst);
}

Complex default_wigner_point(int n_ref, int n_probe) {
  const int a = std::min(n_ref, n_probe), b = std::max(n_ref, n_probe);
  if (a == 1 && b == 3) return {0.44, 0.0};
  if (a == 1 && b == 5) return {0.0, 1.09};
  // Largest |<ref+1| W(alpha) |probe+1>| on a coarse grid, i.e. the best contrast.
  const int levels = b + 2;
  const WignerKernel kernel(levels, 1.5 * std::sqrt(2.0));
  Complex best_alpha = 0.0;
  double best = -1.0;
  for (int i = -15; i <= 15; ++i) {
    for (int j = -15; j <= 15; ++j) {
      const Complex alpha(0.1 * i, 0.1 * j);
      const double c = std::abs(kernel(alpha)(n_ref + 1, n_probe + 1));
      if (c > best + 1e-12) {
        best = c;
        best_alpha = alpha;
      }
    }
  }
  return best_alpha;
}

PhaseCalibration phase_calibration(const SystemParams& params, const CalibrationState& calib, int n_ref, int n_probe,
                                   Complex alpha, const MeasurementOptions& options, int sweep_points) {
  calib.tone(n_ref);
  const ToneCalibration& probe = calib.tone(n_probe);
  if (n_ref == n_probe) throw InvariantError("phase calibration needs two different tones");
  if (sweep_points < 4) throw InvariantError("phase sweep needs at least four points");

  const int levels = options.dims.cavity_levels;
  const State initial = product_state(options.dims, two_level_superposition(n_ref, n_probe, 0.0, levels), 0);
  Sampler sampler(options);
  PhaseCalibration out;
  std::vector<double> ideal;
  for (int j = 0; j < sweep_points; ++j) {
    const double phi = kTwoPi * j / sweep_points;
    const std::vector<DriveTone> tones = calib.drive_tones({{n_probe, phi}});
    const State final = run_pulse(params, initial, tones, pulse_length(tones), options);
    const double w = wigner_point(reduce_cavity(final), alpha);
    out.sweep.push_back(phi);
    out.signal.push_back(sampler.signed_value(w * kPi / 2.0));
    const Vector target = two_level_superposition(n_ref + 1, n_probe + 1, phi, levels);
    ideal.push_back(wigner_point(target * target.adjoint(), alpha) * kPi / 2.0);
  }

  double rss = 0.0;
  const Eigen::Vector3d c = fit_sinusoid_fixed(out.sweep, out.signal, 1.0, &rss);
  out.background = c[0];
  out.contrast = std::hypot(c[1], c[2]);
  out.residual = std::sqrt(rss / sweep_points);
  if (out.contrast < 0.1) {
    throw FitError("phase sweep contrast " + std::to_string(out.contrast) + " is below 0.1 at this Wigner point");
  }
  out.phi0 = std::atan2(c[2], c[1]);
  const Eigen::Vector3d ci = fit_sinusoid_fixed(out.sweep, ideal, 1.0);
  const double theta_peak = std::atan2(ci[2], ci[1]);
  out.offset = wrap_phase(probe.phase + out.phi0 - theta_peak);
  return out;
}

std::vector<SelectivityRow> verify_selectivity(const SystemParams& params, const CalibrationState& calib,
                                               const std::vector<int>& probe_focks, const MeasurementOptions& options) {
  const std::vector<int> ns = calib.fock_targets();
  const std::vector<DriveTone> tones = calib.drive_tones();
  std::vector<SelectivityRow> rows;
  for (int n : probe_focks) {
    SelectivityRow row;
    row.fock = n;
    row.driven = std::find(ns.begin(), ns.end(), n) != ns.end();
    const State final = run_pulse(params, State::basis(options.dims, 0, n), tones, pulse_length(tones), options);
    row.qubit_population = qubit_population(final);
    Vector target = Vector::Zero(options.dims.cavity_levels);
    target[row.driven ? n + 1 : n] = 1.0;
    row.cavity_fidelity = fidelity(reduce_cavity(final), target);
    rows.push_back(row);
  }
  return rows;
}

PipelineReport run_calibration_pipeline(const SystemParams& params, const std::vector<int>& fock_targets,
                                        const PipelineOptions& pipeline, const MeasurementOptions& options) {
  std::vector<int> ns = fock_targets;
  std::sort(ns.begin(), ns.end());
  if (ns.empty()) throw InvariantError("no tones to calibrate");
  PipelineReport report;
  const double aq = pipeline.qubit_amplitude;

  // 1. Amplitude relation per tone, evaluated at the chosen qubit amplitude.
  CalibrationState state;
  state.qubit_amplitude = aq;
  state.envelope = pipeline.envelope;
  for (int n : ns) {
    // The sideband matrix element grows as sqrt(n+1); the range keeps only the first lobe.
    std::vector<double> ac_values;
    for (int j = 0; j < pipeline.scan_ac_points; ++j) {
      ac_values.push_back((0.1 + 1.6 * j / (pipeline.scan_ac_points - 1)) / std::sqrt(n + 1.0));
    }
    const AmplitudeScan scan = amplitude_rabi_scan(params, n, pipeline.scan_aq, ac_values, pipeline.envelope, options);
    state.tones.push_back({n, scan.slope * aq + scan.intercept, 0.0, 0.0});
    report.scans.emplace(n, scan);
  }
  std::vector<double> amps;
  for (const ToneCalibration& t : state.tones) amps.push_back(t.amplitude);
  const StarkShift all = stark_shifts(aq, amps, params, options.fit);
  for (ToneCalibration& t : state.tones) t.frequency = model_resonance_correction(params, t.n, all);

  // 2. Single-tone chevron on the lowest transition.
  {
    ToneCalibration& low = state.tones.front();
    const StarkShift alone = stark_shifts(aq, std::vector<double>{low.amplitude}, params, options.fit);
    const double single = model_resonance_correction(params, low.n, alone);
    CalibrationState solo = state;
    solo.tones = {low};
    solo.tones.front().frequency = single;
    const ChevronResult r = chevron_search(params, solo.drive_tones(), low.n, pipeline.iterative.window, options);
    low.amplitude *= (kPi / pipeline.envelope.squared_area()) / r.rabi_rate;
    low.frequency += r.frequency_offset;
  }

  // 3. Iterative loop with every tone on.
  state.history = {state.snapshot(0, 0, -1)};
  state = iterative_multidrive_calibration(params, state, pipeline.iterative, options);

  // 4. Phases relative to the reference tone.
  report.phases = calibrate_phases(params, state, pipeline.reference, pipeline.wigner_points, options);
  report.state = state;
  return report;
}

std::map<int, PhaseCalibration> calibrate_phases(const SystemParams& params, CalibrationState& calib, int reference,
                                                 const std::map<int, Complex>& wigner_points,
                                                 const MeasurementOptions& options) {
  const std::vector<int> ns = calib.fock_targets();
  if (std::find(ns.begin(), ns.end(), reference) == ns.end()) reference = ns.front();
  std::map<int, PhaseCalibration> out;
  for (int n : ns) {
    if (n == reference) continue;
    const auto it = wigner_points.find(n);
    const Complex alpha = it != wigner_points.end() ? it->second : default_wigner_point(reference, n);
    const PhaseCalibration p = phase_calibration(params, calib, reference, n, alpha, options);
    calib.tone(n).phase = p.offset;
    out.emplace(n, p);
  }
  return out;
}

std::string calibration_prefix(const std::vector<int>& fock_targets) {
  std::vector<int> ns = fock_targets;
  std::sort(ns.begin(), ns.end());
  std::string out = "set";
  for (int n : ns) out += "." + std::to_string(n);
  return out;
}

void write_calibration(Config& config, const CalibrationState& calib, const std::string& prefix) {
  std::string list;
  for (const ToneCalibration& t : calib.tones) list += (list.empty() ? "" : ", ") + std::to_string(t.n);
  config.set(prefix, "tones", list);
  config.set(prefix, "qubit_amplitude", format_number(calib.qubit_amplitude));
  config.set(prefix, "pulse_duration", format_time(calib.envelope.total_duration));
  config.set(prefix, "ramp_duration", format_time(calib.envelope.ramp_duration));
  config.set(prefix, "converged", calib.converged ? "true" : "false");
  config.set(prefix, "cycles", std::to_string(calib.cycles));
  for (const ToneCalibration& t : calib.tones) {
    const std::string s = prefix + ".tone." + std::to_string(t.n);
    config.set(s, "amplitude", format_number(t.amplitude));
    config.set(s, "frequency", format_frequency(t.frequency));
    config.set(s, "phase", format_number(t.phase));
  }
}

CalibrationState read_calibration(const Config& config, const std::string& prefix) {
  CalibrationState c;
  c.qubit_amplitude = config.get(prefix, "qubit_amplitude");
  c.envelope.total_duration = config.get_or(prefix, "pulse_duration", Quantity::time, c.envelope.total_duration);
  c.envelope.ramp_duration = config.get_or(prefix, "ramp_duration", Quantity::time, c.envelope.ramp_duration);
  c.converged = config.get_bool_or(prefix, "converged", false);
  c.cycles = config.get_int_or(prefix, "cycles", 0);
  for (const std::string& item : config.get_list(prefix, "tones")) {
    const int n = static_cast<int>(eval_expression(item));
    const std::string s = prefix + ".tone." + std::to_string(n);
    c.tones.push_back({n, config.get(s, "amplitude"), config.get(s, "frequency", Quantity::frequency),
                       config.get_or(s, "phase", Quantity::phase, 0.0)});
  }
  try {
    c.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(config.origin() + ": [" + prefix + "] " + e.what());
  }
  c.history.push_back(c.snapshot(0, c.cycles, -1));
  return c;
}

void write_history_csv(const std::string& path, const CalibrationState& calib) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "step,cycle,target_n,qubit_amplitude";
  for (const ToneCalibration& t : calib.tones) {
    out << ",amplitude_" << t.n << ",frequency_hz_" << t.n << ",phase_" << t.n;
  }
  out << '\n';
  for (const CalibrationSnapshot& s : calib.history) {
    out << s.step << ',' << s.cycle << ',' << s.target_n << ',' << format_number(s.qubit_amplitude);
    for (const ToneCalibration& t : s.tones) {
      out << ',' << format_number(t.amplitude) << ',' << format_number(t.frequency / kTwoPi) << ','
          << format_number(t.phase);
    }
    out << '\n';
  }
}

}  // namespace snappa
