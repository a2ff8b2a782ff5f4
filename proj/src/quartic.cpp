#include "snappa/quartic.hpp"

#include <array>
#include <cmath>
#include <map>

#include "snappa/optimize.hpp"

namespace snappa {

namespace {

// Factor alphabet of phi = phi_q (A + A^dag) + phi_c (B + B^dag) with
// A = q - xi_q and B = a - xi_c in the drive-rotating frame.
enum Factor { kQ, kQd, kXq, kXqc, kA, kAd, kXc, kXcc };

struct Content {
  std::array<int, 8> count{};
  bool operator<(const Content& o) const { return count < o.count; }
};

Matrix power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

Complex ipow(Complex z, int k) {
  Complex out(1.0, 0.0);
  for (int i = 0; i < k; ++i) out *= z;
  return out;
}

}  // namespace

DisplacedQuarticModel::DisplacedQuarticModel(const SystemParams& params, const HilbertDims& dims,
                                             const QuarticDrive& drive)
    : dims_(dims), params_(params), drive_(drive) {
  params_.validate();
  dims_.validate(drive_.n_target);
  drive_.envelope.validate();

  std::map<Content, int> multiplicity;
  for (int code = 0; code < 8 * 8 * 8 * 8; ++code) {
    Content c;
    int x = code;
    int carrier_q = 0;
    int carrier_c = 0;
    for (int slot = 0; slot < 4; ++slot) {
      const int f = x % 8;
      x /= 8;
      ++c.count[f];
      if (f == kQ || f == kXq) ++carrier_q;
      if (f == kQd || f == kXqc) --carrier_q;
      if (f == kA || f == kXc) ++carrier_c;
      if (f == kAd || f == kXcc) --carrier_c;
    }
    if (carrier_q != 0 || carrier_c != 0) continue;
    const int operators = c.count[kQ] + c.count[kQd] + c.count[kA] + c.count[kAd];
    if (operators == 0) continue;
    ++multiplicity[c];
  }

  const double r = std::sqrt(params_.chi / (2.0 * params_.alpha_q));
  const Matrix q = annihilation(dims_, Mode::qubit).matrix();
  const Matrix a = annihilation(dims_, Mode::cavity).matrix();
  for (const auto& [c, mult] : multiplicity) {
    const int cavity_factors = c.count[kA] + c.count[kAd] + c.count[kXc] + c.count[kXcc];
    const int scalars = c.count[kXq] + c.count[kXqc] + c.count[kXc] + c.count[kXcc];
    Term term;
    term.pow_xq = c.count[kXq];
    term.pow_xq_conj = c.count[kXqc];
    term.pow_xc = c.count[kXc];
    term.pow_xc_conj = c.count[kXcc];
    term.coefficient = -(mult / 24.0) * 2.0 * params_.alpha_q * std::pow(r, cavity_factors) *
                       ((scalars % 2 == 0) ? 1.0 : -1.0);
    term.op = power(q.adjoint(), c.count[kQd]) * power(q, c.count[kQ]) * power(a.adjoint(), c.count[kAd]) *
              power(a, c.count[kA]);
    if (max_abs(term.op) == 0.0) continue;
    terms_.push_back(std::move(term));
  }

  const double delta_q = params_.delta;
  const double delta_c = -params_.delta + (drive_.n_target + 1) * params_.chi - drive_.stark_correction;
  frame_ = (delta_q * number_op(dims_, Mode::qubit) + delta_c * number_op(dims_, Mode::cavity)).matrix();
}

Matrix DisplacedQuarticModel::matrix_at(double t) const {
  const double env = envelope_value(drive_.envelope, t);
  const Complex xq(drive_.xi_q * env, 0.0);
  const Complex xc = std::polar(drive_.xi_c * env, drive_.phase_c);
  Matrix h = frame_;
  for (const Term& term : terms_) {
    const Complex w = ipow(xq, term.pow_xq) * ipow(std::conj(xq), term.pow_xq_conj) *
                      ipow(xc, term.pow_xc) * ipow(std::conj(xc), term.pow_xc_conj);
    h += (term.coefficient * w) * term.op;
  }
  return h;
}

ExtractedSideband extract_sideband(const SystemParams& params, const HilbertDims& dims, QuarticDrive drive,
                                   double guess, double half_window) {
  const int n = drive.n_target;
  const int ig = dims.index(0, n), ie = dims.index(1, n + 1);
  const double t_mid = 0.5 * drive.envelope.total_duration;
  auto splitting = [&](double dw) {
    drive.stark_correction = dw;
    const Eigen::SelfAdjointEigenSolver<Matrix> es(DisplacedQuarticModel(params, dims, drive).matrix_at(t_mid));
    int k1 = -1, k2 = -1;
    double w1 = -1.0, w2 = -1.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      const double w = std::norm(es.eigenvectors()(ig, k)) + std::norm(es.eigenvectors()(ie, k));
      if (w > w1) {
        k2 = k1, w2 = w1;
        k1 = k, w1 = w;
      } else if (w > w2) {
        k2 = k, w2 = w;
      }
    }
    return std::abs(es.eigenvalues()[k1] - es.eigenvalues()[k2]);
  };
  const int points = 80;
  const double h = 2.0 * half_window / points;
  double best = guess, best_value = splitting(guess);
  for (int j = 0; j <= points; ++j) {
    const double dw = guess - half_window + j * h;
    const double v = splitting(dw);
    if (v < best_value) best_value = v, best = dw;
  }
  ExtractedSideband out;
  out.stark_correction = golden_section_minimize(splitting, best - h, best + h, 1e-3);
  out.coupling = 0.5 * splitting(out.stark_correction);
  return out;
}

}  // namespace snappa
