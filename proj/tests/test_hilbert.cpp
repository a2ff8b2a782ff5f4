#include <doctest.h>

#include <cmath>

#include "snappa/hilbert.hpp"

using namespace snappa;

namespace {

const HilbertDims kDims{2, 12};

State fock(int n, int q = 0, HilbertDims dims = kDims) { return State::basis(dims, q, n); }

}  // namespace

TEST_CASE("ladder operator matrix elements") {
  const Operator a = annihilation(kDims, Mode::cavity);
  const Vector lowered = a.matrix() * fock(1).vector();
  CHECK(std::abs(lowered[kDims.index(0, 0)] - Complex(1.0)) < 1e-15);
  CHECK(lowered.norm() == doctest::Approx(1.0));

  const Vector vac = a.matrix() * fock(0).vector();
  CHECK(vac.norm() == 0.0);

  CHECK(std::abs(a.element(0, 2, 0, 3) - std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(a.element(1, 2, 1, 3) - std::sqrt(3.0)) < 1e-15);
}

TEST_CASE("qubit lowering acts on the qubit factor only") {
  const Operator q = annihilation(kDims, Mode::qubit);
  const Vector v = q.matrix() * fock(4, 1).vector();
  CHECK(std::abs(v[kDims.index(0, 4)] - Complex(1.0)) < 1e-15);
  CHECK((q.matrix() * fock(4, 0).vector()).norm() == 0.0);
}

TEST_CASE("number operator, commutator and adjoint structure") {
  const Operator a = annihilation(kDims, Mode::cavity);
  const Operator ad = creation(kDims, Mode::cavity);
  const Operator n = number_op(kDims, Mode::cavity);
  for (int k = 0; k < kDims.cavity_levels; ++k) {
    CHECK(expectation(n, fock(k)).real() == doctest::Approx(k));
  }
  CHECK(max_abs((n.matrix() - (ad * a).matrix()).eval()) < 1e-14);
  CHECK(max_abs((dagger(ad).matrix() - a.matrix()).eval()) == 0.0);

  const Matrix comm = commutator(a, ad).matrix();
  for (int q = 0; q < 2; ++q) {
    for (int k = 0; k + 1 < kDims.cavity_levels; ++k) {
      const int i = kDims.index(q, k);
      CHECK(std::abs(comm(i, i) - Complex(1.0)) < 1e-14);
    }
  }
  const Matrix off = comm - Matrix(comm.diagonal().asDiagonal());
  CHECK(max_abs(off) < 1e-14);
}

TEST_CASE("parity operator") {
  const Operator p = parity_op(kDims);
  CHECK(max_abs((p.matrix() * fock(2).vector() - fock(2).vector()).eval()) == 0.0);
  CHECK(max_abs((p.matrix() * fock(3, 1).vector() + fock(3, 1).vector()).eval()) == 0.0);
  CHECK(max_abs(((p * p).matrix() - Matrix::Identity(kDims.size(), kDims.size())).eval()) == 0.0);
  const Operator n = number_op(kDims, Mode::cavity);
  CHECK(max_abs(commutator(p, n).matrix()) == 0.0);
  CHECK(expectation(p, fock(0)).real() == 1.0);
}

TEST_CASE("displacement") {
  const HilbertDims big{2, 24};
  CHECK(max_abs((displacement(big, Complex(0.0)).matrix() - Matrix::Identity(big.size(), big.size())).eval()) <
        1e-14);

  // Coherent-state vacuum overlap exp(-|alpha|^2) for alpha = 0.5.
  const Operator d = displacement(big, Complex(0.5, 0.0));
  const Complex amp = d.element(0, 0, 0, 0);
  CHECK(std::norm(amp) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));

  for (Complex alpha : {Complex(2.0, 0.0), Complex(0.0, -1.5), Complex(1.2, 1.4)}) {
    const Matrix prod = displacement(big, alpha).matrix() * displacement(big, -alpha).matrix();
    CHECK(max_abs((prod - Matrix::Identity(big.size(), big.size())).eval()) < 1e-8);
  }

  const HilbertDims mid{2, 16};
  const Matrix u = displacement(mid, Complex(1.0, 1.0)).matrix();
  CHECK(max_abs((u.adjoint() * u - Matrix::Identity(mid.size(), mid.size())).eval()) < 1e-8);
}

TEST_CASE("displacement warns beyond a quarter of the truncation") {
  static int hits = 0;
  set_warning_handler([](const std::string&) { ++hits; });
  displacement(HilbertDims{2, 12}, Complex(1.0, 0.0));
  CHECK(hits == 0);
  displacement(HilbertDims{2, 12}, Complex(2.0, 0.0));
  CHECK(hits == 1);
  set_warning_handler(nullptr);
}

TEST_CASE("states, apply and expectation") {
  CHECK(expectation(parity_op(kDims), fock(0)).real() == 1.0);

  Vector c = Vector::Zero(4);
  c[1] = 1.0;
  c[3] = 1.0;
  const State s = product_state(kDims, c, 0);
  CHECK(expectation(number_op(kDims, Mode::cavity), s).real() == doctest::Approx(2.0).epsilon(1e-14));

  const State same = apply(Operator::identity(kDims), s);
  CHECK(max_abs((same.vector() - s.vector()).eval()) < 1e-15);

  const Complex e = expectation(creation(kDims, Mode::cavity) * annihilation(kDims, Mode::cavity), s);
  CHECK(std::abs(e.imag()) < 1e-10);

  const Matrix red = reduce_cavity(s);
  CHECK(red(1, 3).real() == doctest::Approx(0.5));
}

TEST_CASE("state invariants are enforced") {
  Vector v = Vector::Zero(kDims.size());
  v[0] = 1.0 + 1e-6;
  CHECK_THROWS_AS(State::pure(kDims, v), InvariantError);
  CHECK_THROWS_AS(State::pure(HilbertDims{2, 10}, fock(0).vector()), DimensionError);

  Matrix rho = Matrix::Zero(kDims.size(), kDims.size());
  rho(0, 0) = 0.5;
  CHECK_THROWS_AS(State::mixed(kDims, rho), InvariantError);
  rho(1, 1) = 0.5;
  CHECK_NOTHROW(State::mixed(kDims, rho));
  rho(0, 1) = 0.6;
  rho(1, 0) = 0.6;
  CHECK_THROWS_AS(State::mixed(kDims, rho), InvariantError);
  rho(1, 0) = 0.5;
  CHECK_THROWS_AS(State::mixed(kDims, rho), InvariantError);

  CHECK_THROWS_AS(HilbertDims({3, 12}).validate(), InvariantError);
  CHECK_THROWS_AS(HilbertDims({2, 7}).validate(5), InvariantError);
  CHECK_NOTHROW(HilbertDims({2, 8}).validate(5));
}

TEST_CASE("operators of different dimensions do not mix") {
  const Operator a = annihilation(kDims, Mode::cavity);
  const Operator b = annihilation(HilbertDims{2, 10}, Mode::cavity);
  CHECK_THROWS_AS(a * b, DimensionError);
  CHECK_THROWS_AS(apply(b, fock(0)), DimensionError);
}

TEST_CASE("linear algebra helpers") {
  RVector<double> v(3);
  v << 0.7, 0.5, -0.3;
  const RVector<double> p = project_to_simplex<double>(v);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(p.minCoeff() >= 0.0);
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.4));

  Vector w(2);
  w << Complex(0.0, 0.0), Complex(0.0, -2.0);
  const Vector n = normalize_global_phase<double>(w);
  CHECK(n[1].real() == doctest::Approx(2.0));
  CHECK(std::abs(n[1].imag()) < 1e-15);

  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
}
