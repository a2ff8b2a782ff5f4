#pragma once

// Dense complex linear-algebra helpers shared by every module.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

namespace snappa {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using Matrix = CMatrix<double>;
using Vector = CVector<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::RealScalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, typename Derived::RealScalar tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

template <typename Derived>
bool is_anti_hermitian(const Eigen::MatrixBase<Derived>& m, typename Derived::RealScalar tol) {
  return m.rows() == m.cols() && max_abs(m + m.adjoint()) <= tol;
}

/// exp(-i h t) for Hermitian h, by diagonalisation.
template <typename Derived>
CMatrix<typename Derived::RealScalar> expm_hermitian(const Eigen::MatrixBase<Derived>& h,
                                                      typename Derived::RealScalar t) {
  using Real = typename Derived::RealScalar;
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h.eval());
  const CVector<Real> phases =
      (es.eigenvalues().template cast<std::complex<Real>>() * std::complex<Real>(0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(g). Anti-Hermitian generators go through the Hermitian route; anything else
/// uses Eigen's scaling-and-squaring Pade implementation.
template <typename Derived>
CMatrix<typename Derived::RealScalar> expm(const Eigen::MatrixBase<Derived>& g) {
  using Real = typename Derived::RealScalar;
  const Real scale = std::max<Real>(Real(1), max_abs(g));
  if (is_anti_hermitian(g, Real(1e-13) * scale)) {
    const CMatrix<Real> h = std::complex<Real>(0, 1) * g;
    return expm_hermitian(h, Real(1));
  }
  return g.eval().exp();
}

template <typename Derived>
typename Derived::RealScalar min_hermitian_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  const CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Euclidean projection of a real vector onto the probability simplex.
template <typename Real>
RVector<Real> project_to_simplex(const RVector<Real>& v) {
  std::vector<Real> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<Real>());
  Real cumulative = 0;
  Real theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const Real candidate = (cumulative - Real(1)) / Real(i + 1);
    if (u[i] - candidate > 0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(Real(0)).matrix();
}

/// Closest density matrix (Frobenius norm) to a Hermitian estimate.
template <typename Derived>
CMatrix<typename Derived::RealScalar> project_to_density(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  const CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h);
  const RVector<Real> p = project_to_simplex<Real>(es.eigenvalues());
  return es.eigenvectors() * p.template cast<std::complex<Real>>().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Trace distance 0.5 * ||a - b||_1 between Hermitian matrices.
template <typename DA, typename DB>
typename DA::RealScalar trace_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Real = typename DA::RealScalar;
  const CMatrix<Real> d = a - b;
  const CMatrix<Real> h = (d + d.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum() / Real(2);
}

/// Multiply by a global phase so the first significant amplitude is real and positive.
template <typename Real>
CVector<Real> normalize_global_phase(CVector<Real> v, Real threshold = Real(1e-12)) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > threshold) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      break;
    }
  }
  return v;
}

/// |<a|b>|^2 for unit vectors; insensitive to global phase.
template <typename DA, typename DB>
typename DA::RealScalar state_overlap(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return std::norm(a.dot(b));
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double phi) {
  phi = std::remainder(phi, kTwoPi);
  return phi <= -kPi ? phi + kTwoPi : phi;
}

}  // namespace snappa
