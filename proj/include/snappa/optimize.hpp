#pragma once

// Small derivative-free helpers: quasi-Newton minimisation with finite-difference
// gradients, golden-section search and sinusoid fitting.

#include <functional>

#include "snappa/linalg.hpp"

namespace snappa {

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-9;
  double value_tolerance = 0.0;  ///< stop once f <= value_tolerance
  double fd_step = 1e-6;
};

struct BfgsResult {
  RVector<double> x;
  double value = 0.0;
  int iterations = 0;
};

using ObjectiveFn = std::function<double(const RVector<double>&)>;

BfgsResult minimize_bfgs(const ObjectiveFn& f, RVector<double> x0, const BfgsOptions& options = {});

/// Minimum of a unimodal f on [lo, hi].
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

/// Least-squares fit y = c0 + c1 cos(w t) + c2 sin(w t) for a fixed w; returns the
/// coefficients and writes the residual sum of squares.
Eigen::Vector3d fit_sinusoid_fixed(const std::vector<double>& t, const std::vector<double>& y, double w,
                                   double* rss = nullptr);

struct SinusoidFit {
  double frequency = 0.0;  ///< angular
  double offset = 0.0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
  double rms = 0.0;
  double amplitude() const { return std::hypot(cos_coeff, sin_coeff); }
};

/// Frequency scan over [w_lo, w_hi] followed by golden-section refinement.
SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y, double w_lo, double w_hi,
                         int scan_points = 400);

}  // namespace snappa
