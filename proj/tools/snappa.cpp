// snappa: run the catalogued experiments, calibrate the drives and work with
// Wigner grids from the command line.
//
// Exit status: 0 success, 1 a check failed, 2 bad configuration or arguments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "snappa/calibration.hpp"
#include "snappa/config.hpp"
#include "snappa/experiments.hpp"
#include "snappa/tomography.hpp"

using namespace snappa;

namespace {

struct CommonFlags {
  std::string config = "config/system.cfg";
  std::string catalog = "config/catalog.cfg";
  std::string calibration = "config/calibration.cfg";
  bool ideal = false;
  bool driven = false;
  std::string decoherence = "off";
  std::string out;
  std::uint64_t seed = 20240611;
  int parallel = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "system configuration")->capture_default_str();
  cmd->add_option("--catalog", f.catalog, "experiment catalog")->capture_default_str();
  cmd->add_option("--calibration", f.calibration, "calibration document, or 'ideal'")->capture_default_str();
  auto* ideal = cmd->add_flag("--ideal", f.ideal, "apply the ideal gate operator");
  cmd->add_flag("--driven", f.driven, "simulate the calibrated drives (default)")->excludes(ideal);
  cmd->add_option("--decoherence", f.decoherence, "on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd->add_option("--out", f.out, "output directory (default $SNAPPA_OUT_DIR or ./out)");
  cmd->add_option("--seed", f.seed, "seed for every random choice")->capture_default_str();
}

RunSettings settings_from(const CommonFlags& f) {
  RunSettings s;
  s.system_config = f.config;
  s.catalog = f.catalog;
  s.calibration = f.calibration;
  s.mode = f.ideal ? GateMode::ideal : GateMode::driven;
  s.decoherence = f.decoherence == "on";
  s.output_dir = f.out.empty() ? default_output_dir() : f.out;
  s.seed = f.seed;
  return s;
}

std::string number(const std::map<std::string, double>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", it->second);
  return buf;
}

int report(const std::vector<RunRecord>& records) {
  std::printf("%-8s %-6s %-9s %-9s %-9s %-6s  %s\n", "name", "row", "fidelity", "pop_e", "overlap", "result", "checks");
  int failed = 0;
  for (const RunRecord& r : records) {
    std::string checks;
    for (const Check& c : r.checks) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s%s=%.4f [%.3g, %.3g]", checks.empty() ? "" : "; ", c.name.c_str(), c.value,
                    c.lo, c.hi);
      checks += buf;
      if (!c.pass) checks += " FAIL";
    }
    std::printf("%-8s %-6s %-9s %-9s %-9s %-6s  %s\n", r.name.c_str(), r.row.c_str(), number(r.metrics, "fidelity").c_str(),
                number(r.metrics, "qubit_population").c_str(), number(r.metrics, "overlap").c_str(),
                r.passed() ? "PASS" : "FAIL", checks.c_str());
    if (!r.passed()) ++failed;
  }
  std::printf("%zu run(s), %d failed\n", records.size(), failed);
  return failed == 0 ? 0 : 1;
}

std::vector<int> parse_tones(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split_list(text)) out.push_back(static_cast<int>(eval_expression(item)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number-selective photon addition: simulation and calibration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  CommonFlags flags;
  std::string name, filter, csv, state_text, target_text, wigner_out = "wigner.csv";
  std::vector<std::string> tone_sets{"1,3", "1,3,5", "0,1"};
  int fock_cut = 8;
  double extent = 3.2, spacing = 0.16;

  auto* run = app.add_subcommand("run", "run one catalogued experiment ('tableI' runs them all)");
  run->add_option("name", name, "experiment name, e.g. fig2b")->required();
  add_common(run, flags);

  auto* suite = app.add_subcommand("suite", "run every experiment matching a glob");
  suite->add_option("filter", filter, "glob over experiment names, e.g. 'fig3*'");
  add_common(suite, flags);
  suite->add_option("--parallel", flags.parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* calibrate = app.add_subcommand("calibrate", "run the calibration pipeline and write a calibration document");
  calibrate->add_option("--config", flags.config, "system configuration")->capture_default_str();
  calibrate->add_option("--calibration", flags.calibration, "document to write")->capture_default_str();
  calibrate->add_option("--tones", tone_sets, "tone sets, e.g. --tones 1,3 --tones 1,3,5")->capture_default_str();
  calibrate->add_option("--out", flags.out, "directory for the calibration histories");

  auto* wigner = app.add_subcommand("wigner", "sample the Wigner function of a cavity state");
  wigner->add_option("--state", state_text, "amplitudes n:value[@phase], e.g. '1:1, 3:1'")->required();
  wigner->add_option("--out", wigner_out, "CSV to write")->capture_default_str();
  wigner->add_option("--extent", extent, "half width of the grid")->capture_default_str();
  wigner->add_option("--spacing", spacing, "grid spacing")->capture_default_str();

  auto* recon = app.add_subcommand("reconstruct", "reconstruct a density matrix from a Wigner CSV");
  recon->add_option("csv", csv, "grid written by 'wigner' or 'run'")->required()->check(CLI::ExistingFile);
  recon->add_option("--fock-cut", fock_cut, "number of Fock levels to fit")->capture_default_str();
  recon->add_option("--target", target_text, "report the fidelity to these amplitudes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run || *suite) {
      const Lab lab(settings_from(flags));
      std::vector<RunRecord> records;
      if (*run && name != "tableI") {
        records.push_back(lab.run_experiment(name));
      } else {
        records = lab.run_suite(*run ? "" : filter, flags.parallel);
      }
      std::printf("outputs in %s\n", lab.settings().output_dir.c_str());
      return report(records);
    }

    if (*calibrate) {
      const Config system = Config::load(flags.config);
      const SystemParams params = system_params_from(system);
      MeasurementOptions options;
      options.fit = stark_fit_from(system);
      options.model = model_options_from(system);
      const std::string out_dir = flags.out.empty() ? default_output_dir() : flags.out;
      std::filesystem::create_directories(out_dir);
      Config book;
      for (const std::string& set : tone_sets) {
        const std::vector<int> ns = parse_tones(set);
        const PipelineReport rep = run_calibration_pipeline(params, ns, {}, options);
        const std::string prefix = calibration_prefix(ns);
        write_calibration(book, rep.state, prefix);
        const std::string history = (std::filesystem::path(out_dir) / (prefix + "_history.csv")).string();
        write_history_csv(history, rep.state);
        std::printf("%s: %s after %d cycle(s), %zu steps\n", prefix.c_str(),
                    rep.state.converged ? "converged" : "not converged", rep.state.cycles, rep.state.history.size() - 1);
        for (const ToneCalibration& t : rep.state.tones) {
          std::printf("  n=%d  amplitude %.5f  dw %+.1f kHz  phase %+.4f\n", t.n, t.amplitude,
                      t.frequency / kTwoPi / 1e3, t.phase);
        }
        for (const auto& [n, p] : rep.phases) {
          std::printf("  phase of n=%d: contrast %.3f residual %.2g\n", n, p.contrast, p.residual);
        }
      }
      book.save(flags.calibration);
      std::printf("wrote %s\n", flags.calibration.c_str());
      return 0;
    }

    if (*wigner) {
      const Vector psi = parse_cavity_amplitudes(state_text, 16);
      WignerGrid grid = wigner_grid(psi * psi.adjoint(), extent, spacing);
      grid.meta["state"] = state_text;
      write_wigner_csv(wigner_out, grid);
      std::printf("wrote %s (%d x %d points)\n", wigner_out.c_str(), grid.side, grid.side);
      return 0;
    }

    if (*recon) {
      const WignerGrid grid = read_wigner_csv(csv);
      const ReconstructionResult r = reconstruct(grid, fock_cut);
      std::printf("residual %.3g after %d iterations\n", r.residual, r.iterations);
      std::printf("purity %.6f\n", (r.rho * r.rho).trace().real());
      for (int n = 0; n < r.rho.rows(); ++n) std::printf("  P(%d) = %.6f\n", n, r.rho(n, n).real());
      if (!target_text.empty()) {
        const Vector target = parse_cavity_amplitudes(target_text, static_cast<int>(r.rho.rows()));
        std::printf("fidelity %.8f\n", fidelity(r.rho, target));
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
