#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "snappa/tomography.hpp"
#include "wigner_oracle.hpp"

using namespace snappa;

namespace {

Vector cavity(std::initializer_list<std::pair<int, Complex>> amps, int levels) {
  Vector v = Vector::Zero(levels);
  for (auto [n, a] : amps) v[n] = a;
  return v.normalized();
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

}  // namespace

TEST_CASE("Wigner function at the origin is the scaled parity") {
  CHECK(wigner_point(projector(cavity({{0, 1.0}}, 8)), 0.0) == doctest::Approx(2.0 / kPi).epsilon(1e-13));
  CHECK(wigner_point(projector(cavity({{1, 1.0}}, 8)), 0.0) == doctest::Approx(-2.0 / kPi).epsilon(1e-13));
  CHECK(wigner_point(projector(cavity({{1, 1.0}, {3, 1.0}}, 8)), 0.0) == doctest::Approx(-2.0 / kPi).epsilon(1e-13));
}

TEST_CASE("Wigner values match the Laguerre series") {
  const Matrix even = projector(cavity({{2, 1.0}, {4, 1.0}}, 7));
  CHECK(std::abs(wigner_point(even, Complex(0.44, 0.0)) - test::wigner_laguerre(even, Complex(0.44, 0.0))) < 1e-8);

  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = test::random_density(7, 1 + trial % 3, rng);
    const WignerGrid g = wigner_grid(rho, 3.2, 0.8);
    for (std::size_t i = 0; i < g.alphas.size(); ++i) {
      CHECK(std::abs(g.values[i] - test::wigner_laguerre(rho, g.alphas[i])) < 1e-8);
    }
  }
}

TEST_CASE("Wigner map is linear and bounded") {
  std::mt19937 rng(5);
  const Matrix a = test::random_density(6, 1, rng);
  const Matrix b = test::random_density(6, 3, rng);
  const Complex alpha(0.3, -0.8);
  const double mix = wigner_point(0.3 * a + 0.7 * b, alpha);
  CHECK(std::abs(mix - 0.3 * wigner_point(a, alpha) - 0.7 * wigner_point(b, alpha)) < 1e-10);

  const WignerGrid g = wigner_grid(a);
  CHECK(g.side == 41);
  CHECK(g.alphas.size() == 41u * 41u);
  for (double v : g.values) CHECK(std::abs(v) <= kWignerBound + 1e-6);
  WignerGrid broken = g;
  broken.values[7] = 0.7;
  CHECK_THROWS_AS(broken.validate(), InvariantError);
}

TEST_CASE("Wigner grids integrate to the trace") {
  const WignerGrid vac = wigner_grid(projector(cavity({{0, 1.0}}, 6)));
  const auto centre = std::max_element(vac.values.begin(), vac.values.end()) - vac.values.begin();
  CHECK(std::abs(vac.alphas[centre]) < 1e-12);
  // Radial symmetry: the four points at distance one grid step agree.
  const int c = static_cast<int>(centre);
  CHECK(vac.values[c + 1] == doctest::Approx(vac.values[c - 1]));
  CHECK(vac.values[c + 41] == doctest::Approx(vac.values[c + 1]));
  CHECK(vac.integral() == doctest::Approx(1.0).epsilon(0.02));

  std::mt19937 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix rho = test::random_density(6, 2, rng);
    CHECK(std::abs(wigner_grid(rho).integral() - 1.0) < 0.02);
  }
}

TEST_CASE("Ramsey parity readout") {
  const SystemParams p = SystemParams::table_s1();
  const HilbertDims dims{2, 10};
  CHECK(ramsey_parity_readout(State::basis(dims, 0, 0), 0.0, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ramsey_parity_readout(State::basis(dims, 0, 1), 0.0, p) == doctest::Approx(-1.0).epsilon(1e-12));

  std::mt19937 rng(21);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector c = Vector::Zero(10);
    for (int n = 0; n < 6; ++n) c[n] = Complex(g(rng), g(rng));
    c.normalize();
    const Complex alpha(u(rng), u(rng));
    const double expect = wigner_point(projector(c), alpha) * kPi / 2.0;
    CHECK(std::abs(ramsey_parity_readout(product_state(dims, c, 0), alpha, p) - expect) < 1e-3);
  }

  const Vector c = cavity({{1, 1.0}, {3, 1.0}}, 10);
  const State pure = product_state(dims, c, 0);
  const State mixed = State::mixed(dims, pure.density());
  const Complex alpha(0.44, 0.0);
  CHECK(std::abs(ramsey_parity_readout(pure, alpha, p) - ramsey_parity_readout(mixed, alpha, p)) < 1e-10);
  RamseyOptions noisy;
  noisy.decoherence = true;
  const double ideal = ramsey_parity_readout(pure, alpha, p);
  const double decayed = ramsey_parity_readout(pure, alpha, p, noisy);
  CHECK(std::abs(decayed) < std::abs(ideal));
  CHECK(std::abs(decayed - ideal) < 0.05);
}

TEST_CASE("reconstruction") {
  SUBCASE("noiseless vacuum") {
    const Vector vac = cavity({{0, 1.0}}, 7);
    const ReconstructionResult r = reconstruct(wigner_grid(projector(vac)), 7);
    CHECK(fidelity(r.rho, vac) >= 0.999);
    CHECK(r.residual < 1e-6);
  }
  SUBCASE("noiseless mixed state") {
    std::mt19937 rng(8);
    const Matrix rho = test::random_density(5, 2, rng);
    const ReconstructionResult r = reconstruct(wigner_grid(rho), 5);
    CHECK(trace_distance(r.rho, rho) < 1e-4);
  }
  SUBCASE("noisy pure and mixed states") {
    std::mt19937 rng(9);
    std::normal_distribution<double> noise(0.0, 0.01);
    const Vector psi = cavity({{2, 1.0}, {4, Complex(0.0, 1.0)}}, 7);
    WignerGrid g = wigner_grid(projector(psi));
    for (double& v : g.values) v = std::clamp(v + noise(rng), -kWignerBound, kWignerBound);
    CHECK(fidelity(reconstruct(g, 7).rho, psi) >= 0.99);

    const Matrix rho = test::random_density(6, 2, rng);
    WignerGrid h = wigner_grid(rho);
    for (double& v : h.values) v = std::clamp(v + noise(rng), -kWignerBound, kWignerBound);
    const ReconstructionResult r = reconstruct(h, 6);
    CHECK(trace_distance(r.rho, rho) <= 0.02);
    CHECK(min_hermitian_eigenvalue(r.rho) > -1e-10);
    CHECK(std::abs(r.rho.trace() - 1.0) < 1e-12);
  }
  SUBCASE("preconditions") {
    const Matrix vac = projector(cavity({{0, 1.0}}, 7));
    CHECK_THROWS_AS(reconstruct(wigner_grid(vac, 1.0, 0.1), 7), InvariantError);
    CHECK_THROWS_AS(reconstruct(wigner_grid(vac, 3.2, 1.6), 7), InvariantError);
  }
}

TEST_CASE("fidelity and qubit population") {
  const Vector psi = cavity({{1, 1.0}, {2, Complex(0.0, 1.0)}}, 6);
  CHECK(fidelity(projector(psi), psi) == doctest::Approx(1.0));
  CHECK(fidelity(Matrix::Identity(6, 6) / 6.0, psi) == doctest::Approx(1.0 / 6.0));
  CHECK(fidelity(projector(psi), cavity({{1, 1.0}, {2, Complex(0.0, 1.0)}}, 4)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fidelity(Matrix::Identity(2, 2) / 2.0, psi), DimensionError);

  const HilbertDims dims{2, 8};
  CHECK(qubit_population(State::basis(dims, 0, 3)) == 0.0);
  CHECK(qubit_population(State::basis(dims, 1, 3)) == 1.0);
  CHECK(qubit_population(State::mixed(dims, State::basis(dims, 1, 5).density())) == 1.0);
}

TEST_CASE("Wigner CSV round trip") {
  std::mt19937 rng(4);
  WignerGrid g = wigner_grid(test::random_density(5, 2, rng), 3.2, 0.4);
  g.meta["state"] = "random";
  const std::string path = "wigner_roundtrip_test.csv";
  write_wigner_csv(path, g);
  const WignerGrid back = read_wigner_csv(path);
  std::remove(path.c_str());
  CHECK(back.values == g.values);
  CHECK(back.alphas == g.alphas);
  CHECK(back.spacing == g.spacing);
  CHECK(back.side == g.side);
  CHECK(back.meta.at("state") == "random");
  CHECK_THROWS_AS(read_wigner_csv("does_not_exist.csv"), ConfigError);
}
