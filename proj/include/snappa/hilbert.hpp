#pragma once

// Fock-space and qubit (x) cavity operator algebra.
//
// Layout is fixed as qubit (x) cavity: the flat index of |n>|q> is
// q * cavity_levels + n. Every operator and state carries its HilbertDims and
// binary operations check that they agree.

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <variant>

#include "snappa/errors.hpp"
#include "snappa/linalg.hpp"

namespace snappa {

enum class Mode { qubit, cavity };

struct HilbertDims {
  int qubit_levels = 2;
  int cavity_levels = 12;

  int size() const { return qubit_levels * cavity_levels; }
  int index(int qubit, int fock) const { return qubit * cavity_levels + fock; }
  int levels(Mode m) const { return m == Mode::qubit ? qubit_levels : cavity_levels; }

  /// Two-level qubit, and room for the highest addressed Fock index plus the
  /// level it is mapped to plus one guard level.
  void validate(int n_max = 0) const {
    if (qubit_levels != 2) throw InvariantError("qubit must have exactly two levels");
    if (cavity_levels < n_max + 3) {
      throw InvariantError("cavity truncation " + std::to_string(cavity_levels) +
                           " too small for Fock index " + std::to_string(n_max));
    }
  }

  bool operator==(const HilbertDims&) const = default;
};

template <typename Real>
class BasicOperator {
 public:
  using Scalar = std::complex<Real>;
  using MatrixType = CMatrix<Real>;

  BasicOperator(const HilbertDims& dims, MatrixType matrix) : dims_(dims), matrix_(std::move(matrix)) {
    if (matrix_.rows() != dims_.size() || matrix_.cols() != dims_.size()) {
      throw DimensionError("operator matrix does not match Hilbert dimensions");
    }
  }

  static BasicOperator identity(const HilbertDims& dims) {
    return BasicOperator(dims, MatrixType::Identity(dims.size(), dims.size()));
  }
  static BasicOperator zero(const HilbertDims& dims) {
    return BasicOperator(dims, MatrixType::Zero(dims.size(), dims.size()));
  }

  const HilbertDims& dims() const { return dims_; }
  const MatrixType& matrix() const { return matrix_; }
  Scalar operator()(Eigen::Index row, Eigen::Index col) const { return matrix_(row, col); }

  /// <n_row, q_row| O |n_col, q_col>
  Scalar element(int q_row, int n_row, int q_col, int n_col) const {
    return matrix_(dims_.index(q_row, n_row), dims_.index(q_col, n_col));
  }

  bool is_hermitian(Real tol) const { return snappa::is_hermitian(matrix_, tol); }

  BasicOperator& operator+=(const BasicOperator& o) {
    require_same(o);
    matrix_ += o.matrix_;
    return *this;
  }
  BasicOperator& operator-=(const BasicOperator& o) {
    require_same(o);
    matrix_ -= o.matrix_;
    return *this;
  }
  BasicOperator& operator*=(Scalar s) {
    matrix_ *= s;
    return *this;
  }

  friend BasicOperator operator+(BasicOperator a, const BasicOperator& b) { return a += b; }
  friend BasicOperator operator-(BasicOperator a, const BasicOperator& b) { return a -= b; }
  friend BasicOperator operator*(Scalar s, BasicOperator a) { return a *= s; }
  friend BasicOperator operator*(BasicOperator a, Scalar s) { return a *= s; }
  friend BasicOperator operator*(const BasicOperator& a, const BasicOperator& b) {
    a.require_same(b);
    return BasicOperator(a.dims_, a.matrix_ * b.matrix_);
  }

 private:
  void require_same(const BasicOperator& o) const {
    if (!(dims_ == o.dims_)) throw DimensionError("operator dimension mismatch");
  }

  HilbertDims dims_;
  MatrixType matrix_;
};

/// Pure state vector or density matrix on the composite space.
template <typename Real>
class BasicState {
 public:
  using Scalar = std::complex<Real>;
  using VectorType = CVector<Real>;
  using MatrixType = CMatrix<Real>;

  static constexpr Real kNormTol = Real(1e-9);
  static constexpr Real kTraceTol = Real(1e-7);
  static constexpr Real kHermitianTol = Real(1e-9);
  static constexpr Real kPositivityTol = Real(1e-8);

  static BasicState pure(const HilbertDims& dims, VectorType v) {
    BasicState s(dims, std::move(v));
    s.check();
    return s;
  }
  static BasicState normalized(const HilbertDims& dims, VectorType v) {
    const Real n = v.norm();
    if (!(n > Real(0))) throw InvariantError("cannot normalise a zero vector");
    return pure(dims, v / n);
  }
  static BasicState mixed(const HilbertDims& dims, MatrixType rho) {
    BasicState s(dims, std::move(rho));
    s.check();
    return s;
  }
  static BasicState basis(const HilbertDims& dims, int qubit, int fock) {
    if (qubit < 0 || qubit >= dims.qubit_levels || fock < 0 || fock >= dims.cavity_levels) {
      throw DimensionError("basis state outside the truncated space");
    }
    VectorType v = VectorType::Zero(dims.size());
    v[dims.index(qubit, fock)] = Scalar(1);
    return BasicState(dims, std::move(v));
  }

  const HilbertDims& dims() const { return dims_; }
  bool is_pure() const { return std::holds_alternative<VectorType>(data_); }

  const VectorType& vector() const {
    if (!is_pure()) throw InvariantError("state is mixed; no state vector");
    return std::get<VectorType>(data_);
  }
  MatrixType density() const {
    if (is_pure()) {
      const auto& v = std::get<VectorType>(data_);
      return v * v.adjoint();
    }
    return std::get<MatrixType>(data_);
  }

  /// Re-checks the norm (pure) or trace / Hermiticity / positivity (mixed) invariants.
  void check() const {
    if (is_pure()) {
      const auto& v = std::get<VectorType>(data_);
      if (v.size() != dims_.size()) throw DimensionError("state vector does not match dims");
      if (std::abs(v.norm() - Real(1)) > kNormTol) throw InvariantError("state vector not normalised");
      return;
    }
    const auto& rho = std::get<MatrixType>(data_);
    if (rho.rows() != dims_.size() || rho.cols() != dims_.size()) {
      throw DimensionError("density matrix does not match dims");
    }
    if (std::abs(rho.trace() - Scalar(1)) > kTraceTol) throw InvariantError("density matrix trace != 1");
    if (max_abs(rho - rho.adjoint()) > kHermitianTol) throw InvariantError("density matrix not Hermitian");
    if (min_hermitian_eigenvalue(rho) < -kPositivityTol) {
      throw InvariantError("density matrix not positive semidefinite");
    }
  }

 private:
  BasicState(const HilbertDims& dims, VectorType v) : dims_(dims), data_(std::move(v)) {}
  BasicState(const HilbertDims& dims, MatrixType m) : dims_(dims), data_(std::move(m)) {}

  HilbertDims dims_;
  std::variant<VectorType, MatrixType> data_;
};

using Operator = BasicOperator<double>;
using State = BasicState<double>;

// ---------------------------------------------------------------------------
// Single-mode building blocks

/// Lowering operator on a truncated ladder: <n-1| a |n> = sqrt(n).
template <typename Real = double>
CMatrix<Real> ladder_matrix(int levels) {
  CMatrix<Real> a = CMatrix<Real>::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(Real(n));
  return a;
}

/// Single-mode displacement exp(alpha a^dag - alpha* a) on `levels` Fock states.
template <typename Real = double>
CMatrix<Real> displacement_matrix(int levels, std::complex<Real> alpha) {
  const CMatrix<Real> a = ladder_matrix<Real>(levels);
  const CMatrix<Real> generator = alpha * a.adjoint() - std::conj(alpha) * a;
  const CMatrix<Real> h = std::complex<Real>(0, 1) * generator;
  return expm_hermitian(h, Real(1));
}

/// Displacements on a fixed single-mode truncation from one eigendecomposition of
/// a + a^dag: D(r e^{i phi}) = R(phi - pi/2) exp(i r (a + a^dag)) R(phi - pi/2)^dag with
/// R(t) = exp(i t a^dag a).
template <typename Real = double>
class DisplacementBasis {
 public:
  using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

  explicit DisplacementBasis(int levels) : levels_(levels) {
    RMatrix x = RMatrix::Zero(levels, levels);
    for (int k = 1; k < levels; ++k) {
      x(k - 1, k) = std::sqrt(Real(k));
      x(k, k - 1) = std::sqrt(Real(k));
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(x);
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
    RMatrix pv = vectors_;
    for (int k = 1; k < levels; k += 2) pv.row(k) = -pv.row(k);
    parity_ = vectors_.transpose() * pv;
  }

  int levels() const { return levels_; }

  CVector<Real> apply(std::complex<Real> alpha, const CVector<Real>& v) const {
    const Real r = std::abs(alpha);
    const Real t = std::arg(alpha) - Real(kPi / 2);
    CVector<Real> w(levels_);
    for (int k = 0; k < levels_; ++k) w[k] = v[k] * std::polar(Real(1), -t * k);
    CVector<Real> u = vectors_.transpose().template cast<std::complex<Real>>() * w;
    for (int k = 0; k < levels_; ++k) u[k] *= std::polar(Real(1), r * values_[k]);
    w = vectors_.template cast<std::complex<Real>>() * u;
    for (int k = 0; k < levels_; ++k) w[k] *= std::polar(Real(1), t * k);
    return w;
  }

  /// The first `rows` rows of D(alpha).
  CMatrix<Real> top_rows(std::complex<Real> alpha, int rows) const {
    const Real t = std::arg(alpha) - Real(kPi / 2);
    const CMatrix<Real> left = left_factor(alpha, rows);
    CMatrix<Real> right(levels_, levels_);
    for (int k = 0; k < levels_; ++k) {
      for (int j = 0; j < levels_; ++j) right(k, j) = vectors_(j, k) * std::polar(Real(1), -t * j);
    }
    return left * right;
  }

  CMatrix<Real> matrix(std::complex<Real> alpha) const { return top_rows(alpha, levels_); }

  /// D(alpha) Pi D(alpha)^dag restricted to its first `rows` rows and columns.
  CMatrix<Real> displaced_parity(std::complex<Real> alpha, int rows) const {
    const CMatrix<Real> left = left_factor(alpha, rows);
    return left * parity_.template cast<std::complex<Real>>() * left.adjoint();
  }

 private:
  CMatrix<Real> left_factor(std::complex<Real> alpha, int rows) const {
    const Real r = std::abs(alpha);
    const Real t = std::arg(alpha) - Real(kPi / 2);
    CMatrix<Real> left(rows, levels_);
    for (int i = 0; i < rows; ++i) {
      for (int k = 0; k < levels_; ++k) {
        left(i, k) = vectors_(i, k) * std::polar(Real(1), t * i + r * values_[k]);
      }
    }
    return left;
  }

  int levels_;
  RMatrix vectors_;
  RVector<Real> values_;
  RMatrix parity_;  ///< V^T Pi V
};

/// Embeds a single-mode matrix into qubit (x) cavity with identity on the other mode.
template <typename Real = double>
BasicOperator<Real> tensor_embed(const CMatrix<Real>& single, Mode mode, const HilbertDims& dims) {
  const int nq = dims.qubit_levels;
  const int nc = dims.cavity_levels;
  if (single.rows() != dims.levels(mode) || single.cols() != dims.levels(mode)) {
    throw DimensionError("single-mode operator does not match the mode's level count");
  }
  CMatrix<Real> full = CMatrix<Real>::Zero(dims.size(), dims.size());
  if (mode == Mode::cavity) {
    for (int q = 0; q < nq; ++q) full.block(q * nc, q * nc, nc, nc) = single;
  } else {
    for (int r = 0; r < nq; ++r)
      for (int c = 0; c < nq; ++c)
        if (single(r, c) != std::complex<Real>(0))
          full.block(r * nc, c * nc, nc, nc).diagonal().setConstant(single(r, c));
  }
  return BasicOperator<Real>(dims, std::move(full));
}

// ---------------------------------------------------------------------------
// Composite operators

template <typename Real = double>
BasicOperator<Real> annihilation(const HilbertDims& dims, Mode mode) {
  return tensor_embed<Real>(ladder_matrix<Real>(dims.levels(mode)), mode, dims);
}

template <typename Real>
BasicOperator<Real> dagger(const BasicOperator<Real>& op) {
  return BasicOperator<Real>(op.dims(), op.matrix().adjoint());
}

template <typename Real = double>
BasicOperator<Real> creation(const HilbertDims& dims, Mode mode) {
  return dagger(annihilation<Real>(dims, mode));
}

template <typename Real = double>
BasicOperator<Real> number_op(const HilbertDims& dims, Mode mode) {
  const int levels = dims.levels(mode);
  CMatrix<Real> n = CMatrix<Real>::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) n(k, k) = Real(k);
  return tensor_embed<Real>(n, mode, dims);
}

/// (-1)^n on the cavity, identity on the qubit.
template <typename Real = double>
BasicOperator<Real> parity_op(const HilbertDims& dims) {
  CMatrix<Real> p = CMatrix<Real>::Zero(dims.cavity_levels, dims.cavity_levels);
  for (int k = 0; k < dims.cavity_levels; ++k) p(k, k) = (k % 2 == 0) ? Real(1) : Real(-1);
  return tensor_embed<Real>(p, Mode::cavity, dims);
}

/// Projector |q><q| on the qubit.
template <typename Real = double>
BasicOperator<Real> qubit_projector(const HilbertDims& dims, int qubit) {
  CMatrix<Real> p = CMatrix<Real>::Zero(dims.qubit_levels, dims.qubit_levels);
  p(qubit, qubit) = Real(1);
  return tensor_embed<Real>(p, Mode::qubit, dims);
}

/// D(alpha) on the cavity factor. Exactly unitary on the truncated space; warns when
/// |alpha|^2 exceeds a quarter of the truncation, where the truncated action drifts
/// from the infinite-dimensional one.
template <typename Real = double>
BasicOperator<Real> displacement(const HilbertDims& dims, std::complex<Real> alpha) {
  if (std::norm(alpha) > Real(dims.cavity_levels) / Real(4)) {
    warn("displacement |alpha|^2 exceeds N_c/4; truncation effects expected");
  }
  CMatrix<Real> d = displacement_matrix<Real>(dims.cavity_levels, alpha);
  const Real defect =
      max_abs((d.adjoint() * d - CMatrix<Real>::Identity(d.rows(), d.cols())).eval());
  if (defect > Real(1e-6)) warn("displacement unitarity defect above 1e-6");
  return tensor_embed<Real>(d, Mode::cavity, dims);
}

template <typename Real>
BasicOperator<Real> commutator(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  return a * b - b * a;
}

template <typename Real>
BasicState<Real> apply(const BasicOperator<Real>& op, const BasicState<Real>& state) {
  if (!(op.dims() == state.dims())) throw DimensionError("operator/state dimension mismatch");
  if (state.is_pure()) {
    return BasicState<Real>::normalized(state.dims(), op.matrix() * state.vector());
  }
  CMatrix<Real> rho = op.matrix() * state.density() * op.matrix().adjoint();
  const std::complex<Real> tr = rho.trace();
  if (!(std::abs(tr) > Real(0))) throw InvariantError("operator annihilates the state");
  rho /= tr;
  return BasicState<Real>::mixed(state.dims(), (rho + rho.adjoint()) / Real(2));
}

template <typename Real>
std::complex<Real> expectation(const BasicOperator<Real>& op, const BasicState<Real>& state) {
  if (!(op.dims() == state.dims())) throw DimensionError("operator/state dimension mismatch");
  if (state.is_pure()) return state.vector().dot(op.matrix() * state.vector());
  return (op.matrix() * state.density()).trace();
}

/// Reduced cavity density matrix (partial trace over the qubit).
template <typename Real>
CMatrix<Real> reduce_cavity(const BasicState<Real>& state) {
  const HilbertDims& d = state.dims();
  const int nc = d.cavity_levels;
  CMatrix<Real> out = CMatrix<Real>::Zero(nc, nc);
  if (state.is_pure()) {
    const auto& v = state.vector();
    for (int q = 0; q < d.qubit_levels; ++q) {
      const CVector<Real> branch = v.segment(q * nc, nc);
      out += branch * branch.adjoint();
    }
    return out;
  }
  const CMatrix<Real> rho = state.density();
  for (int q = 0; q < d.qubit_levels; ++q) out += rho.block(q * nc, q * nc, nc, nc);
  return out;
}

/// Cavity superposition (unnormalised amplitudes by Fock index) times qubit level.
template <typename Real = double>
BasicState<Real> product_state(const HilbertDims& dims, const CVector<Real>& cavity, int qubit) {
  if (cavity.size() > dims.cavity_levels) throw DimensionError("cavity amplitudes exceed truncation");
  CVector<Real> v = CVector<Real>::Zero(dims.size());
  v.segment(qubit * dims.cavity_levels, cavity.size()) = cavity;
  return BasicState<Real>::normalized(dims, std::move(v));
}

}  // namespace snappa
