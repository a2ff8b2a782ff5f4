#pragma once

// Wigner functions W(alpha) = (2/pi) Tr[D^dag(alpha) rho D(alpha) Pi], the Ramsey
// parity measurement that samples them, and density-matrix reconstruction from a
// sampled grid.
//
// Displaced parity is evaluated in a padded Fock space so that points far from the
// origin do not suffer from the truncation of rho.

#include <map>
#include <string>
#include <vector>

#include "snappa/hamiltonian.hpp"
#include "snappa/hilbert.hpp"

namespace snappa {

inline constexpr double kWignerBound = 2.0 / kPi;

struct WignerGrid {
  std::vector<Complex> alphas;
  std::vector<double> values;
  double half_extent = 3.2;
  double spacing = 0.16;
  int side = 41;
  std::map<std::string, std::string> meta;

  /// Sizes agree and every value satisfies |W| <= 2/pi + 1e-6.
  void validate() const;
  /// Riemann sum of W over the grid cells.
  double integral() const;
};

/// Square grid of sample points, values zeroed. Row-major with Im(alpha) outer.
WignerGrid make_grid(double half_extent = 3.2, double spacing = 0.16);

/// (2/pi) D Pi D^dag restricted to the first `levels` Fock states, so that
/// W(alpha) = Tr[kernel(alpha) rho].
class WignerKernel {
 public:
  WignerKernel(int levels, double max_abs_alpha);
  int levels() const { return levels_; }
  int padded_levels() const { return basis_.levels(); }
  Matrix operator()(Complex alpha) const;

 private:
  int levels_;
  DisplacementBasis<double> basis_;
};

double wigner_point(const Matrix& rho_cavity, Complex alpha);
WignerGrid wigner_grid(const Matrix& rho_cavity, double half_extent = 3.2, double spacing = 0.16);

struct RamseyOptions {
  bool ideal = true;         ///< drop chi' from the free evolution
  bool decoherence = false;  ///< Lindblad free evolution with the coherence times
  double step = 1e-9;
};

/// Displace by -alpha, pi/2 about y, wait pi/chi, pi/2 back; returns <P_g - P_e>.
double ramsey_parity_readout(const State& state, Complex alpha, const SystemParams& params,
                             const RamseyOptions& options = {});

struct ReconstructionResult {
  Matrix rho;
  double residual = 0.0;  ///< rms Wigner misfit
  int iterations = 0;
};

/// Least-squares fit of a physical rho (Fock levels < fock_cut) to the grid,
/// parametrised as rho = T^dag T / Tr[T^dag T].
ReconstructionResult reconstruct(const WignerGrid& grid, int fock_cut);

/// <psi|rho|psi>; the target is zero-padded or must vanish beyond rho's size.
double fidelity(const Matrix& rho, const Vector& target);
double qubit_population(const State& state);

/// "# key = value" metadata lines, then re_alpha,im_alpha,value.
void write_wigner_csv(const std::string& path, const WignerGrid& grid);
WignerGrid read_wigner_csv(const std::string& path);

}  // namespace snappa
