#include "snappa/experiments.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <random>
#include <thread>

#include "snappa/optimize.hpp"

#ifndef SNAPPA_VERSION
#define SNAPPA_VERSION "0.0.0"
#endif

namespace snappa {

namespace {

[[noreturn]] void bad_entry(const Config& config, const std::string& section, const std::string& key,
                            const std::string& why) {
  throw ConfigError(config.origin() + ": [" + section + "] " + key + ": " + why);
}

double wrap_phase(double x) {
  x = std::remainder(x, kTwoPi);
  return x <= -kPi ? x + kTwoPi : x;
}

std::optional<double> optional_number(const Config& c, const std::string& s, const std::string& key) {
  if (!c.has(s, key)) return std::nullopt;
  const std::string v = c.get_string(s, key);
  if (v == "-") return std::nullopt;
  return c.get(s, key);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string amplitude_key(const Vector& v) {
  std::string key;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == Complex(0.0)) continue;
    key += std::to_string(i) + ":" + format_number(v[i].real()) + "," + format_number(v[i].imag()) + ";";
  }
  return key;
}

std::pair<int, int> support_range(const Vector& v) {
  int lo = -1, hi = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 1e-12) continue;
    if (lo < 0) lo = static_cast<int>(i);
    hi = static_cast<int>(i);
  }
  return {lo, hi};
}

}  // namespace

Vector parse_cavity_amplitudes(std::string_view text, int levels) {
  Vector v = Vector::Zero(levels);
  for (const std::string& item : split_list(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("amplitude '" + item + "' is not of the form n:value");
    const double nd = eval_expression(item.substr(0, colon));
    const int n = static_cast<int>(nd);
    if (nd != n || n < 0 || n >= levels) throw ConfigError("Fock index in '" + item + "' is outside 0.." + std::to_string(levels - 1));
    std::string rest = item.substr(colon + 1);
    double phase = 0.0;
    if (const auto at = rest.find('@'); at != std::string::npos) {
      phase = parse_quantity(rest.substr(at + 1), Quantity::phase);
      rest = rest.substr(0, at);
    }
    v[n] += std::polar(eval_expression(rest), phase);
  }
  const double norm = v.norm();
  if (!(norm > 0.0)) throw ConfigError("amplitude list '" + std::string(text) + "' is empty or zero");
  return v / norm;
}

SnappaSpec CatalogEntry::gate_spec() const {
  SnappaSpec spec;
  for (int n : tones) {
    const auto it = thetas.find(n);
    spec.transitions.push_back({n, it == thetas.end() ? 0.0 : it->second});
  }
  return spec;
}

std::vector<CatalogEntry> load_catalog(const Config& c, int levels) {
  std::vector<CatalogEntry> out;
  for (const std::string& s : c.sections()) {
    CatalogEntry e;
    e.name = s;
    e.row = c.get_string_or(s, "row", "");
    e.note = c.get_string_or(s, "note", "");
    try {
      e.initial = parse_cavity_amplitudes(c.get_string(s, "initial"), levels);
      e.target = parse_cavity_amplitudes(c.get_string(s, "target"), levels);
    } catch (const ConfigError& err) {
      bad_entry(c, s, "initial/target", err.what());
    }
    const std::string gate = c.get_string_or(s, "gate", "add");
    if (gate != "add" && gate != "none") bad_entry(c, s, "gate", "expected add or none");
    e.apply_gate = gate == "add";
    if (c.has(s, "tones")) {
      for (const std::string& t : c.get_list(s, "tones")) e.tones.push_back(static_cast<int>(eval_expression(t)));
    }
    std::sort(e.tones.begin(), e.tones.end());
    if (e.apply_gate && e.tones.empty()) bad_entry(c, s, "tones", "a gate needs at least one tone");
    if (std::adjacent_find(e.tones.begin(), e.tones.end()) != e.tones.end()) bad_entry(c, s, "tones", "duplicate tone");
    if (c.has(s, "thetas")) {
      const std::vector<std::string> th = c.get_list(s, "thetas");
      std::vector<int> raw;
      for (const std::string& t : c.get_list(s, "tones")) raw.push_back(static_cast<int>(eval_expression(t)));
      if (th.size() != raw.size()) bad_entry(c, s, "thetas", "needs one phase per tone");
      for (std::size_t i = 0; i < th.size(); ++i) e.thetas[raw[i]] = parse_quantity(th[i], Quantity::phase);
    }
    const std::string q = c.get_string_or(s, "target_qubit", "g");
    if (q != "g" && q != "e") bad_entry(c, s, "target_qubit", "expected g or e");
    e.target_qubit = q == "e" ? 1 : 0;
    e.table_population = optional_number(c, s, "table_population");
    e.table_fidelity = optional_number(c, s, "table_fidelity");
    e.tolerance = c.get_or(s, "tolerance", Quantity::dimensionless, e.tolerance);
    const std::string comp = c.get_string_or(s, "compensation", "none");
    if (comp != "none" && comp != "fit") bad_entry(c, s, "compensation", "expected none or fit");
    e.fit_compensation = comp == "fit";
    e.driven_overlap_min = c.get_or(s, "driven_overlap_min", Quantity::dimensionless, e.driven_overlap_min);
    e.population_min = optional_number(c, s, "population_min");
    e.population_max = optional_number(c, s, "population_max");
    e.ideal_fidelity_min = c.get_or(s, "ideal_fidelity_min", Quantity::dimensionless, e.ideal_fidelity_min);
    if (!(e.tolerance >= 0.0)) bad_entry(c, s, "tolerance", "must be non-negative");
    out.push_back(std::move(e));
  }
  return out;
}

bool RunRecord::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string version_string() { return SNAPPA_VERSION; }

bool glob_match(std::string_view pattern, std::string_view text) {
  if (pattern.empty()) return true;
  return fnmatch(std::string(pattern).c_str(), std::string(text).c_str(), 0) == 0;
}

double best_rotation(const Matrix& rho, const Vector& target) {
  const Eigen::Index n = std::min<Eigen::Index>(rho.rows(), target.size());
  auto infidelity = [&](double phi) {
    Complex f = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      for (Eigen::Index k = 0; k < n; ++k) {
        f += std::conj(target[m]) * rho(m, k) * target[k] * std::polar(1.0, phi * static_cast<double>(m - k));
      }
    }
    return -f.real();
  };
  const int grid = 720;
  double best = 0.0, best_value = infidelity(0.0);
  for (int j = 1; j < grid; ++j) {
    const double phi = -kPi + kTwoPi * j / grid;
    const double v = infidelity(phi);
    if (v < best_value) {
      best_value = v;
      best = phi;
    }
  }
  const double h = kTwoPi / grid;
  return wrap_phase(golden_section_minimize(infidelity, best - h, best + h, 1e-12));
}

struct Lab::Cache {
  std::mutex mutex;
  std::map<std::string, std::shared_future<CalibrationState>> calibrations;
  std::map<std::string, std::shared_future<PrepProgram>> preps;

  template <class T, class F>
  T get(std::map<std::string, std::shared_future<T>>& map, const std::string& key, F compute) {
    std::promise<T> promise;
    std::shared_future<T> future;
    bool owner = false;
    {
      std::lock_guard<std::mutex> lock(mutex);
      auto it = map.find(key);
      if (it == map.end()) {
        future = promise.get_future().share();
        map.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }
};

Lab::Lab(RunSettings settings) : settings_(std::move(settings)), cache_(std::make_unique<Cache>()) {
  params_ = SystemParams::table_s1();
  fit_ = StarkFit::fitted();
  if (!settings_.system_config.empty()) {
    const Config system = Config::load(settings_.system_config);
    params_ = system_params_from(system);
    fit_ = stark_fit_from(system);
    settings_.model = model_options_from(system);
  }
  catalog_ = load_catalog(Config::load(settings_.catalog), settings_.cavity_levels);
  if (settings_.mode == GateMode::driven && settings_.calibration != "ideal") {
    book_ = Config::load(settings_.calibration);
  }
}

Lab::~Lab() = default;

const CatalogEntry& Lab::entry(const std::string& name) const {
  for (const CatalogEntry& e : catalog_) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

CalibrationState Lab::calibration_for(const std::vector<int>& tones) const {
  const std::string prefix = calibration_prefix(tones);
  return cache_->get(cache_->calibrations, prefix, [&]() {
    if (book_) {
      if (!book_->has_section(prefix)) {
        throw ConfigError(book_->origin() + ": no calibration section [" + prefix + "]");
      }
      return read_calibration(*book_, prefix);
    }
    MeasurementOptions options;
    options.dims = {2, settings_.cavity_levels};
    options.step = settings_.step;
    options.fit = fit_;
    options.model = settings_.model;
    CalibrationState state = analytic_calibration(params_, tones, 0.04, EnvelopeSpec{4.2e-6, 100e-9}, fit_);
    calibrate_phases(params_, state, 1, {}, options);
    return state;
  });
}

PrepProgram Lab::prep_for(const Vector& target) const {
  static Cache shared;
  const std::string key = std::to_string(settings_.seed) + "|" + amplitude_key(target);
  return shared.get(shared.preps, key, [&]() {
    PrepOptions options;
    options.seed = static_cast<std::uint32_t>(settings_.seed);
    options.target_overlap = 0.9999;
    return solve_prep(target, options);
  });
}

RunRecord Lab::run_experiment(const std::string& name) const {
  const auto start = std::chrono::steady_clock::now();
  const CatalogEntry& e = entry(name);
  const HilbertDims dims{2, settings_.cavity_levels};
  RunRecord rec;
  rec.name = e.name;
  rec.row = e.row;
  rec.note = e.note;
  rec.table_fidelity = e.table_fidelity;
  rec.table_population = e.table_population;
  rec.settings = settings_;
  rec.params = params_;
  rec.version = version_string();

  const PrepProgram program = prep_for(e.initial);
  const State prepared = prepare_state(program, dims);
  rec.metrics["prep_overlap"] = fidelity(reduce_cavity(prepared), e.initial);

  State state = prepared;
  if (settings_.decoherence) {
    EvolutionRequest idle{prepared};
    idle.duration = settings_.prep_duration;
    idle.step = settings_.step;
    idle.open_system = true;
    idle.params = params_;
    idle.fit = fit_;
    idle.options.free_kerr = false;
    state = evolve_lindblad(idle);
  }

  State reference = prepared;
  if (e.apply_gate) {
    const Operator gate = ideal_gate(e.gate_spec(), dims);
    reference = apply(gate, prepared);
    if (settings_.mode == GateMode::ideal) {
      state = apply(gate, state);
    } else {
      const CalibrationState calib = calibration_for(e.tones);
      EvolutionRequest req{state};
      req.tones = calib.drive_tones(e.thetas);
      req.duration = calib.envelope.total_duration;
      req.step = settings_.step;
      req.open_system = settings_.decoherence;
      req.params = params_;
      req.fit = fit_;
      req.options = settings_.model;
      state = evolve(req);
    }
  }

  if (e.fit_compensation) {
    const double phi = best_rotation(reduce_cavity(state), e.target);
    state = kerr_rotation_compensation(state, phi);
    const auto [lo, hi] = support_range(e.target);
    rec.metrics["compensation_angle"] = phi;
    rec.metrics["passthrough_phase"] = wrap_phase(-phi * (hi - lo));
  }

  const Vector& ref = reference.vector();
  rec.metrics["overlap"] = (ref.adjoint() * state.density() * ref)(0, 0).real();
  rec.metrics["qubit_population"] = qubit_population(state);

  const Matrix rho_c = reduce_cavity(state);
  rec.metrics["fidelity_exact"] = fidelity(rho_c, e.target);
  WignerGrid grid = wigner_grid(rho_c);
  if (settings_.wigner_noise > 0.0) {
    std::mt19937_64 rng(settings_.seed ^ fnv1a(e.name));
    std::normal_distribution<double> noise(0.0, settings_.wigner_noise);
    for (double& w : grid.values) w += noise(rng);
  }
  grid.meta["experiment"] = e.name;
  grid.meta["mode"] = settings_.mode == GateMode::ideal ? "ideal" : "driven";
  grid.meta["decoherence"] = settings_.decoherence ? "on" : "off";
  grid.meta["fock_cut"] = std::to_string(settings_.fock_cut);

  if (settings_.write_files) {
    const std::filesystem::path dir = std::filesystem::path(settings_.output_dir) / e.name;
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "wigner.csv").string();
    write_wigner_csv(csv, grid);
    grid = read_wigner_csv(csv);
    rec.artifacts.push_back(csv);
    const std::string prep = (dir / "prep_program.cfg").string();
    write_prep_program(prep, program);
    rec.artifacts.push_back(prep);
  }
  const ReconstructionResult recon = reconstruct(grid, settings_.fock_cut);
  rec.metrics["fidelity"] = fidelity(recon.rho, e.target);
  rec.metrics["reconstruction_residual"] = recon.residual;

  auto add = [&rec](const std::string& n, double v, double lo, double hi) {
    rec.checks.push_back({n, v, lo, hi, v >= lo && v <= hi});
  };
  const double f = rec.metrics["fidelity"], pe = rec.metrics["qubit_population"];
  if (settings_.decoherence) {
    if (e.table_fidelity) add("fidelity_band", f, *e.table_fidelity - e.tolerance, *e.table_fidelity + e.tolerance);
    if (e.table_population) {
      add("population_band", pe, *e.table_population - e.tolerance, *e.table_population + e.tolerance);
    }
  } else if (settings_.mode == GateMode::ideal) {
    add("fidelity", f, e.ideal_fidelity_min, 1.0 + 1e-9);
  } else {
    add("overlap", rec.metrics["overlap"], e.driven_overlap_min, 1.0 + 1e-9);
    if (e.population_min || e.population_max) {
      add("qubit_population", pe, e.population_min.value_or(0.0), e.population_max.value_or(1.0));
    }
  }

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (settings_.write_files) {
    const std::string path = (std::filesystem::path(settings_.output_dir) / e.name / "metrics.cfg").string();
    rec.artifacts.push_back(path);
    write_run_record(path, rec);
  }
  return rec;
}

std::vector<RunRecord> Lab::run_suite(const std::string& filter, int parallel) const {
  std::vector<std::string> names;
  for (const CatalogEntry& e : catalog_) {
    if (glob_match(filter, e.name)) names.push_back(e.name);
  }
  std::vector<RunRecord> records(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      try {
        records[i] = run_experiment(names[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(parallel, 1, std::max(1, static_cast<int>(names.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  if (settings_.write_files && !records.empty()) {
    std::filesystem::create_directories(settings_.output_dir);
    write_suite_summary((std::filesystem::path(settings_.output_dir) / "summary.csv").string(), records);
  }
  return records;
}

void write_run_record(const std::string& path, const RunRecord& r) {
  Config c;
  c.set("run", "name", r.name);
  if (!r.row.empty()) c.set("run", "row", r.row);
  c.set("run", "mode", r.settings.mode == GateMode::ideal ? "ideal" : "driven");
  c.set("run", "decoherence", r.settings.decoherence ? "on" : "off");
  c.set("run", "calibration", r.settings.calibration);
  c.set("run", "seed", std::to_string(r.settings.seed));
  c.set("run", "cavity_levels", std::to_string(r.settings.cavity_levels));
  c.set("run", "step", format_time(r.settings.step));
  c.set("run", "version", r.version);
  c.set("run", "wall_seconds", format_number(r.wall_seconds));
  c.set("run", "passed", r.passed() ? "true" : "false");
  if (!r.note.empty()) c.set("run", "note", r.note);
  write_system_params(c, r.params);
  for (const auto& [k, v] : r.metrics) c.set("metrics", k, format_number(v));
  for (const Check& ch : r.checks) {
    c.set("checks", ch.name, format_number(ch.value) + " in [" + format_number(ch.lo) + ", " + format_number(ch.hi) +
                                 "] " + (ch.pass ? "pass" : "FAIL"));
  }
  for (std::size_t i = 0; i < r.artifacts.size(); ++i) c.set("artifacts", "file_" + std::to_string(i + 1), r.artifacts[i]);
  c.save(path);
}

void write_prep_program(const std::string& path, const PrepProgram& p) {
  Config c;
  for (std::size_t i = 0; i < p.displacements.size(); ++i) {
    const std::string k = "displacement_" + std::to_string(i + 1);
    c.set("prep", k + "_re", format_number(p.displacements[i].real()));
    c.set("prep", k + "_im", format_number(p.displacements[i].imag()));
  }
  for (std::size_t i = 0; i < p.snap_phases.size(); ++i) {
    std::string list;
    for (double v : p.snap_phases[i]) list += (list.empty() ? "" : ", ") + format_number(v);
    c.set("prep", "snap_" + std::to_string(i + 1), list);
  }
  c.save(path);
}

void write_suite_summary(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  auto field = [](const std::map<std::string, double>& m, const std::string& k) {
    const auto it = m.find(k);
    return it == m.end() ? std::string() : format_number(it->second);
  };
  out << "name,row,pass,fidelity,qubit_population,overlap,table_fidelity,table_population\n";
  for (const RunRecord& r : records) {
    out << r.name << ',' << r.row << ',' << (r.passed() ? "pass" : "FAIL") << ',' << field(r.metrics, "fidelity") << ','
        << field(r.metrics, "qubit_population") << ',' << field(r.metrics, "overlap") << ',';
    out << (r.table_fidelity ? format_number(*r.table_fidelity) : "") << ','
        << (r.table_population ? format_number(*r.table_population) : "") << '\n';
  }
}

std::string default_output_dir(const std::string& fallback) {
  const char* env = std::getenv("SNAPPA_OUT_DIR");
  return env && *env ? std::string(env) : fallback;
}

}  // namespace snappa
