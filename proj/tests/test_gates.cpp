#include <doctest.h>

#include <cmath>
#include <random>

#include "snappa/gates.hpp"

using namespace snappa;

namespace {

const HilbertDims kDims{2, 12};

Vector cavity(std::initializer_list<std::pair<int, Complex>> amps, int levels = 12) {
  Vector v = Vector::Zero(levels);
  for (auto [n, a] : amps) v[n] = a;
  return v.normalized();
}

double unitarity_defect(const Operator& u) {
  const int d = u.dims().size();
  return max_abs((u.matrix().adjoint() * u.matrix() - Matrix::Identity(d, d)).eval());
}

}  // namespace

TEST_CASE("photon addition on selected blocks") {
  CHECK(max_abs((snappa_ideal({}, kDims).matrix() - Matrix::Identity(24, 24)).eval()) == 0.0);

  const State odd = product_state(kDims, cavity({{1, 1.0}, {3, 1.0}}), 0);
  const State out = apply(snappa_ideal({{{1, 0.0}, {3, kPi}}}, kDims), odd);
  const State expect = product_state(kDims, cavity({{2, 1.0}, {4, -1.0}}), 1);
  CHECK(state_overlap(out.vector(), expect.vector()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(out.vector()[kDims.index(1, 4)] + 1.0 / std::sqrt(2.0)) < 1e-15);

  const State even = product_state(kDims, cavity({{2, 1.0}, {4, 1.0}}), 0);
  for (double theta : {0.0, kPi, -kPi / 2, 0.3}) {
    const State same = apply(snappa_ideal({{{1, 0.0}, {3, theta}}}, kDims), even);
    CHECK(max_abs((same.vector() - even.vector()).eval()) == 0.0);
  }
}

TEST_CASE("photon subtraction and its relation to addition") {
  const SnappaSpec one{{{0, 0.0}}};
  const State out = apply(snapps_ideal(one, kDims), State::basis(kDims, 0, 1));
  CHECK(std::abs(out.vector()[kDims.index(1, 0)] - 1.0) < 1e-15);
  const State idle = apply(snapps_ideal(one, kDims), State::basis(kDims, 0, 0));
  CHECK(std::abs(idle.vector()[kDims.index(0, 0)] - 1.0) < 1e-15);
  CHECK(max_abs((snapps_ideal({}, kDims).matrix() - Matrix::Identity(24, 24)).eval()) == 0.0);

  const SnappaSpec spec{{{1, 0.4}, {3, -1.1}, {6, 2.0}}};
  const Matrix add = snappa_ideal(spec, kDims).matrix();
  const Matrix sub = snapps_ideal(spec, kDims).matrix();
  CHECK(unitarity_defect(snappa_ideal(spec, kDims)) < 1e-12);
  CHECK(unitarity_defect(snapps_ideal(spec, kDims)) < 1e-12);

  // Flipping the qubit maps subtraction onto addition with conjugated phases, and
  // each gate is its own inverse.
  Matrix x = Matrix::Zero(24, 24);
  for (int n = 0; n < 12; ++n) {
    x(kDims.index(0, n), kDims.index(1, n)) = 1.0;
    x(kDims.index(1, n), kDims.index(0, n)) = 1.0;
  }
  CHECK(max_abs((x * sub * x - add.conjugate()).eval()) < 1e-15);
  CHECK(max_abs((add * add - Matrix::Identity(24, 24)).eval()) < 1e-12);
  CHECK(max_abs((sub * sub - Matrix::Identity(24, 24)).eval()) < 1e-12);
}

TEST_CASE("gate spec validation") {
  CHECK_THROWS_AS(snappa_ideal({{{11, 0.0}}}, kDims), DimensionError);
  CHECK_THROWS_AS(snappa_ideal({{{1, 0.0}, {1, 1.0}}}, kDims), InvariantError);
  CHECK_THROWS_AS(snappa_ideal({{{-1, 0.0}}}, kDims), InvariantError);
  SnappaSpec rec{{{1, 0.0}, {2, 0.0}}};
  rec.parity_recovery = true;
  CHECK_THROWS_AS(snappa_ideal(rec, kDims), InvariantError);
  rec.transitions[1].n = 3;
  CHECK_NOTHROW(snappa_ideal(rec, kDims));
}

TEST_CASE("odd-block addition preserves even states and flips parity of odd ones") {
  const Operator u = snappa_ideal({{{1, 0.2}, {3, 1.3}, {5, -0.4}}}, kDims);
  const Operator parity = parity_op(kDims);
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Vector even = Vector::Zero(12), odd = Vector::Zero(12);
    for (int n = 0; n < 12; n += 2) even[n] = Complex(g(rng), g(rng));
    for (int n : {1, 3, 5}) odd[n] = Complex(g(rng), g(rng));
    const State e = product_state(kDims, even.normalized(), 0);
    CHECK(max_abs((u.matrix() * e.vector() - e.vector()).eval()) == 0.0);
    const State o = product_state(kDims, odd.normalized(), 0);
    CHECK(expectation(parity, o).real() == doctest::Approx(-1.0));
    CHECK(expectation(parity, apply(u, o)).real() == doctest::Approx(1.0));
  }
}

TEST_CASE("SNAP and cavity rotations") {
  CHECK(max_abs((snap_ideal({0.0, 0.0, 0.0}, kDims).matrix() - Matrix::Identity(24, 24)).eval()) == 0.0);
  const State plus = product_state(kDims, cavity({{0, 1.0}, {1, 1.0}}), 0);
  const State minus = product_state(kDims, cavity({{0, 1.0}, {1, -1.0}}), 0);
  const State out = apply(snap_ideal({0.0, kPi}, kDims), plus);
  CHECK(state_overlap(out.vector(), minus.vector()) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> phases{0.3, -1.0, 2.2, 0.9};
  std::vector<double> negated;
  for (double p : phases) negated.push_back(-p);
  const Matrix prod = (snap_ideal(negated, kDims) * snap_ideal(phases, kDims)).matrix();
  CHECK(max_abs((prod - Matrix::Identity(24, 24)).eval()) < 1e-15);

  const State s = product_state(kDims, cavity({{2, 1.0}, {4, Complex(0.0, 1.0)}}), 1);
  CHECK(max_abs((kerr_rotation_compensation(s, 0.0).vector() - s.vector()).eval()) == 0.0);
  const State r = kerr_rotation_compensation(s, 0.53);
  for (int i = 0; i < kDims.size(); ++i) CHECK(std::norm(r.vector()[i]) == doctest::Approx(std::norm(s.vector()[i])));
  CHECK(std::arg(r.vector()[kDims.index(1, 4)] / r.vector()[kDims.index(1, 2)]) ==
        doctest::Approx(kPi / 2 + 2 * 0.53));
  const State rm = kerr_rotation_compensation(State::mixed(kDims, s.density()), 0.53);
  CHECK(trace_distance(rm.density(), r.density()) < 1e-12);
}

TEST_CASE("displacement basis agrees with the matrix exponential") {
  const DisplacementBasis<double> basis(30);
  for (Complex a : {Complex(0.7, 0.0), Complex(-0.4, 1.1), Complex(0.0, -2.0)}) {
    const Matrix ref = displacement_matrix<double>(30, a);
    CHECK(max_abs((basis.matrix(a) - ref).eval()) < 1e-12);
    CHECK(max_abs((basis.top_rows(a, 7) - ref.topRows(7)).eval()) < 1e-12);
    Vector v = Vector::Zero(30);
    v[3] = 1.0;
    CHECK(max_abs((basis.apply(a, v) - ref.col(3)).eval()) < 1e-12);
  }
}

TEST_CASE("state preparation") {
  const PrepProgram vacuum;
  CHECK(std::abs(prep_overlap(vacuum, cavity({{0, 1.0}})) - 1.0) < 1e-12);

  const double r2 = std::sqrt(2.0 / 3.0), r1 = std::sqrt(1.0 / 3.0);
  const std::vector<Vector> targets{
      cavity({{1, 1.0}, {3, 1.0}}),
      cavity({{2, 1.0}, {4, 1.0}}),
      cavity({{1, 1.0}, {3, 1.0}, {5, 1.0}}),
      cavity({{0, 1.0}, {1, -1.0}}),
      cavity({{1, r2}, {3, r1}}),
  };
  for (const Vector& t : targets) {
    const PrepProgram p = solve_prep(t);
    CHECK(prep_overlap(p, t) >= 0.999);
    const State s = prepare_state(p, kDims);
    CHECK(state_overlap(s.vector(), product_state(kDims, t, 0).vector()) >= 0.999);
  }

  PrepOptions hopeless;
  hopeless.starts = 1;
  hopeless.max_iterations = 1;
  try {
    solve_prep(targets[0], hopeless);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best() < 0.999);
  }
  CHECK_THROWS_AS(solve_prep(cavity({{8, 1.0}})), InvariantError);
}
