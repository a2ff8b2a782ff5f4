#pragma once

// Catalog-driven runs of the state-mapping experiments: prepare the cavity,
// apply the gate (ideal operator or calibrated drives), optionally undo the
// passthrough rotation, sample a Wigner grid and reconstruct the cavity state.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snappa/calibration.hpp"
#include "snappa/config.hpp"
#include "snappa/gates.hpp"
#include "snappa/tomography.hpp"

namespace snappa {

/// "n:expr[@phase], ..." -> normalised cavity amplitudes, e.g. "0:1, 1:1@pi".
Vector parse_cavity_amplitudes(std::string_view text, int levels);

enum class GateMode { ideal, driven };

struct CatalogEntry {
  std::string name;
  std::string row;  ///< reference table row, e.g. "2(b)"
  Vector initial;
  std::vector<int> tones;  ///< ascending
  std::map<int, double> thetas;
  bool apply_gate = true;
  Vector target;
  int target_qubit = 0;
  std::optional<double> table_population;
  std::optional<double> table_fidelity;
  double tolerance = 0.05;
  bool fit_compensation = false;
  double driven_overlap_min = 0.98;
  std::optional<double> population_min;
  std::optional<double> population_max;
  double ideal_fidelity_min = 0.999;
  std::string note;

  SnappaSpec gate_spec() const;
};

/// One entry per section, in file order.
std::vector<CatalogEntry> load_catalog(const Config& config, int cavity_levels);

struct RunSettings {
  std::string system_config;  ///< empty: built-in device values
  std::string catalog = "config/catalog.cfg";
  std::string calibration = "config/calibration.cfg";  ///< or "ideal"
  GateMode mode = GateMode::driven;
  bool decoherence = false;
  std::string output_dir = "out";
  bool write_files = true;
  std::uint64_t seed = 20240611;
  int cavity_levels = 12;
  int fock_cut = 8;
  double step = 1e-9;
  double prep_duration = 2.15e-6;  ///< idle time standing in for the preparation sequence
  double wigner_noise = 0.0;       ///< Gaussian sigma added to the sampled grid
  ModelOptions model{};
};

struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct RunRecord {
  std::string name;
  std::string row;
  std::string note;
  std::optional<double> table_fidelity;
  std::optional<double> table_population;
  RunSettings settings;
  SystemParams params;
  std::map<std::string, double> metrics;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;
  std::string version;

  bool passed() const;
};

std::string version_string();

/// Loads configs once and caches preparation programs and calibrations, so
/// experiments can share it across threads.
class Lab {
 public:
  explicit Lab(RunSettings settings);
  ~Lab();
  Lab(const Lab&) = delete;
  Lab& operator=(const Lab&) = delete;

  const RunSettings& settings() const { return settings_; }
  const SystemParams& params() const { return params_; }
  const StarkFit& stark_fit() const { return fit_; }
  const std::vector<CatalogEntry>& catalog() const { return catalog_; }
  const CatalogEntry& entry(const std::string& name) const;

  RunRecord run_experiment(const std::string& name) const;
  /// Every entry whose name matches the glob; an empty filter selects all.
  std::vector<RunRecord> run_suite(const std::string& filter = "", int parallel = 1) const;

  CalibrationState calibration_for(const std::vector<int>& tones) const;
  PrepProgram prep_for(const Vector& target) const;

 private:
  struct Cache;
  RunSettings settings_;
  SystemParams params_;
  StarkFit fit_;
  std::vector<CatalogEntry> catalog_;
  std::optional<Config> book_;
  std::unique_ptr<Cache> cache_;
};

bool glob_match(std::string_view pattern, std::string_view text);

/// Cavity rotation exp(i phi a^dag a) that maximises the fidelity of rho to the target.
double best_rotation(const Matrix& rho_cavity, const Vector& target);

void write_run_record(const std::string& path, const RunRecord& record);
void write_prep_program(const std::string& path, const PrepProgram& program);
/// name,row,pass,fidelity,qubit_population,overlap,table_fidelity,table_population
void write_suite_summary(const std::string& path, const std::vector<RunRecord>& records);

/// SNAPPA_OUT_DIR when set and non-empty, the fallback otherwise.
std::string default_output_dir(const std::string& fallback = "out");

}  // namespace snappa
