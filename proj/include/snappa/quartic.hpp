#pragma once

// Reference model that keeps the full normal-ordered quartic Josephson term in
// the displaced frame instead of the extracted sideband Hamiltonian. Only terms
// that are static in the frame rotating with the two drives are kept. Used to
// validate the effective model at small dimension.

#include <vector>

#include "snappa/hamiltonian.hpp"

namespace snappa {

struct QuarticDrive {
  int n_target = 0;
  double xi_q = 0.0;
  double xi_c = 0.0;
  double phase_c = 0.0;
  double stark_correction = 0.0;
  EnvelopeSpec envelope{};
};

class DisplacedQuarticModel {
 public:
  DisplacedQuarticModel(const SystemParams& params, const HilbertDims& dims, const QuarticDrive& drive);

  const HilbertDims& dims() const { return dims_; }
  /// Hamiltonian in the frame co-rotating with both drives.
  Matrix matrix_at(double t) const;
  /// Self-Kerr implied by the junction expansion, chi^2 / (4 alpha_q).
  double implied_kerr() const { return params_.chi * params_.chi / (4.0 * params_.alpha_q); }
  std::size_t term_count() const { return terms_.size(); }

 private:
  struct Term {
    int pow_xq = 0;
    int pow_xq_conj = 0;
    int pow_xc = 0;
    int pow_xc_conj = 0;
    double coefficient = 0.0;
    Matrix op;
  };

  HilbertDims dims_;
  SystemParams params_;
  QuarticDrive drive_;
  std::vector<Term> terms_;
  Matrix frame_;
};

struct ExtractedSideband {
  double stark_correction = 0.0;  ///< dw_n at which the dressed pair is resonant
  double coupling = 0.0;          ///< half the minimum splitting, i.e. |xi_eff| sqrt(n+1)
};

/// Numerical counterpart of the q^dag a^dag extraction: scans drive.stark_correction
/// over guess +- half_window on the plateau Hamiltonian, then refines the point of
/// smallest splitting of the states that overlap |n,g> and |n+1,e> most.
ExtractedSideband extract_sideband(const SystemParams& params, const HilbertDims& dims, QuarticDrive drive,
                                   double guess, double half_window = kTwoPi * 400e3);

}  // namespace snappa
