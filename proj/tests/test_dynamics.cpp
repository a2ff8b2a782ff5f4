#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "snappa/dynamics.hpp"

using namespace snappa;

namespace {

const HilbertDims kDims{2, 12};

std::vector<DriveTone> single_tone(const SystemParams& p, int n, double xi_q, double xi_c, const EnvelopeSpec& env,
                                   const StarkFit& fit, double extra_detuning = 0.0) {
  DriveTone q;
  q.target = Mode::qubit;
  q.amplitude = xi_q;
  q.envelope = env;
  DriveTone c;
  c.target = Mode::cavity;
  c.n_target = n;
  c.amplitude = xi_c;
  c.envelope = env;
  const StarkShift s = stark_shifts(xi_q, std::vector<double>{xi_c}, p, fit);
  c.stark_correction = model_resonance_correction(p, n, s) + extra_detuning;
  return {q, c};
}

double population(const State& s, int q, int n) {
  const int i = s.dims().index(q, n);
  return s.is_pure() ? std::norm(s.vector()[i]) : s.density()(i, i).real();
}

EvolutionRequest request(const State& init, std::vector<DriveTone> tones, double duration, const SystemParams& p,
                         const StarkFit& fit = StarkFit::fitted()) {
  EvolutionRequest r{init};
  r.tones = std::move(tones);
  r.duration = duration;
  r.params = p;
  r.fit = fit;
  return r;
}

/// Closed-form two-level Rabi population for coupling g on |n,g> <-> |n+1,e>.
double rabi_oracle(double g, int n, double detuning, double t) {
  const double omega = 2.0 * g * std::sqrt(n + 1.0);
  const double w = std::sqrt(omega * omega + detuning * detuning);
  const double s = std::sin(0.5 * w * t);
  return omega * omega / (w * w) * s * s;
}

}  // namespace

TEST_CASE("idle evolution keeps the vacuum") {
  const SystemParams p = SystemParams::table_s1();
  const EnvelopeSpec env{4.2e-6, 100e-9};
  auto tones = single_tone(p, 1, 0.0, 0.0, env, StarkFit::fitted());
  const State out = evolve_unitary(request(State::basis(kDims, 0, 0), tones, 4.2e-6, p));
  CHECK(population(out, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("resonant sideband follows the two-level Rabi formula") {
  SystemParams p = SystemParams::table_s1();
  p.kerr_c = 0.0;
  p.chi_prime = 0.0;
  const EnvelopeSpec flat{10e-6, 0.0};
  const double xq = 0.04, xc = 0.75;
  const double g = p.chi * xq * xc;

  SUBCASE("pi pulse") {
    const double t_pi = kPi / (2.0 * g * std::sqrt(2.0));
    auto tones = single_tone(p, 1, xq, xc, EnvelopeSpec{t_pi, 0.0}, StarkFit::fitted());
    const State out = evolve_unitary(request(State::basis(kDims, 0, 1), tones, t_pi, p));
    CHECK(population(out, 1, 2) >= 0.999);
  }

  for (double det : {0.0, kTwoPi * 60e3}) {
    CAPTURE(det);
    auto tones = single_tone(p, 1, xq, xc, flat, StarkFit::fitted(), det);
    EvolutionRequest r = request(State::basis(kDims, 0, 1), tones, flat.total_duration, p);
    // The midpoint rule costs O((w dt)^2) on the rotating coupling; a fine step
    // isolates the model from the integrator.
    r.step = 0.05e-9;
    double worst = 0.0;
    r.sample_every = 2000;
    r.observer = [&](double t, const State& s) {
      worst = std::max(worst, std::abs(population(s, 1, 2) - rabi_oracle(g, 1, det, t)));
    };
    evolve_unitary(r);
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("unitary propagation invariants") {
  const SystemParams p = SystemParams::table_s1();
  const EnvelopeSpec env{4.2e-6, 100e-9};
  auto tones = single_tone(p, 1, 0.04, 0.75, env, StarkFit::fitted());
  DriveTone extra = tones[1];
  extra.n_target = 3;
  extra.amplitude = 0.53;
  extra.phase = 0.7;
  tones.push_back(extra);

  Vector c = Vector::Zero(6);
  c[1] = 1.0;
  c[3] = Complex(0.0, 1.0);
  c[4] = 0.5;
  const State init = product_state(kDims, c, 0);
  const Operator charge = conserved_charge(kDims);
  const double c0 = expectation(charge, init).real();

  EvolutionRequest r = request(init, tones, 4.2e-6, p);
  double drift = 0.0;
  double norm_err = 0.0;
  r.sample_every = 50;
  r.observer = [&](double, const State& s) {
    drift = std::max(drift, std::abs(expectation(charge, s).real() - c0));
    norm_err = std::max(norm_err, std::abs(s.vector().norm() - 1.0));
  };
  const State full = evolve_unitary(r);
  CHECK(drift < 1e-6);
  CHECK(norm_err < 1e-7);

  r.observer = nullptr;
  r.step = 0.5e-9;
  const State half = evolve_unitary(r);
  CHECK(std::abs(state_overlap(full.vector(), half.vector()) - 1.0) < 1e-6);

  const EffectiveHamiltonian model(p, kDims, tones, StarkFit::fitted());
  const BlockPropagator prop([&](double t) { return model.matrix_at(t); }, kDims.size(), {1e-6, 2e-6});
  CHECK(prop.blocks().size() == 13u);
  for (double t : {0.05e-6, 1.3e-6, 4.1e-6}) {
    const Matrix u = prop.step(t, 1e-9);
    CHECK(max_abs((u.adjoint() * u - Matrix::Identity(kDims.size(), kDims.size())).eval()) < 1e-10);
  }
}

TEST_CASE("step-size invariant is enforced") {
  const SystemParams p = SystemParams::table_s1();
  const EnvelopeSpec env{4.2e-6, 100e-9};
  auto tones = single_tone(p, 5, 0.04, 0.43, env, StarkFit::fitted());
  EvolutionRequest r = request(State::basis(kDims, 0, 5), tones, 4.2e-6, p);
  r.step = 20e-9;
  CHECK_THROWS_AS(evolve_unitary(r), InvariantError);
  r.step = 1e-9;
  CHECK_NOTHROW(evolve_unitary(r));
}

TEST_CASE("Lindblad decay laws") {
  const SystemParams p = SystemParams::table_s1();
  SUBCASE("cavity photon") {
    EvolutionRequest r = request(State::basis(kDims, 0, 1), {}, 20e-6, p);
    r.open_system = true;
    r.step = 5e-9;
    const State out = evolve_lindblad(r);
    CHECK(population(out, 0, 1) == doctest::Approx(std::exp(-20e-6 / p.t1_cavity)).epsilon(1e-4));
  }
  SUBCASE("qubit excitation") {
    EvolutionRequest r = request(State::basis(kDims, 1, 0), {}, 20e-6, p);
    r.open_system = true;
    r.step = 5e-9;
    const State out = evolve_lindblad(r);
    CHECK(std::abs(population(out, 1, 0) - std::exp(-20e-6 / p.t1_qubit)) < 1e-4);
  }
  SUBCASE("qubit coherence decays with T2") {
    Vector v = Vector::Zero(kDims.size());
    v[kDims.index(0, 0)] = 1.0 / std::sqrt(2.0);
    v[kDims.index(1, 0)] = 1.0 / std::sqrt(2.0);
    EvolutionRequest r = request(State::pure(kDims, v), {}, 10e-6, p);
    r.open_system = true;
    r.step = 5e-9;
    const Matrix rho = evolve_lindblad(r).density();
    CHECK(std::abs(rho(kDims.index(1, 0), kDims.index(0, 0))) ==
          doctest::Approx(0.5 * std::exp(-10e-6 / p.t2_qubit)).epsilon(1e-4));
  }
}

TEST_CASE("Lindblad under drive") {
  const SystemParams p = SystemParams::table_s1();
  const EnvelopeSpec env{4.2e-6, 100e-9};
  auto tones = single_tone(p, 1, 0.04, 0.75, env, StarkFit::fitted());
  Vector c = Vector::Zero(4);
  c[1] = 1.0;
  c[3] = 1.0;
  const State init = product_state(kDims, c, 0);

  SUBCASE("trace and positivity") {
    EvolutionRequest r = request(init, tones, 4.2e-6, p);
    r.open_system = true;
    double trace_err = 0.0, min_eig = 1.0;
    r.sample_every = 300;
    r.observer = [&](double, const State& s) {
      const Matrix rho = s.density();
      trace_err = std::max(trace_err, std::abs(rho.trace() - Complex(1.0)));
      min_eig = std::min(min_eig, min_hermitian_eigenvalue(rho));
    };
    evolve_lindblad(r);
    CHECK(trace_err < 1e-6);
    CHECK(min_eig > -1e-7);
  }

  SUBCASE("zero rates agree with the unitary solver") {
    const State pure = evolve_unitary(request(init, tones, 4.2e-6, p));
    EvolutionRequest r = request(init, tones, 4.2e-6, p);
    r.open_system = true;
    r.collapse = std::vector<CollapseOperator>{};
    const State mixed = evolve_lindblad(r);
    CHECK(trace_distance(mixed.density(), pure.density()) < 1e-7);
  }
}

TEST_CASE("trace recorder writes a named CSV") {
  TraceRecorder rec;
  rec.add("n_cavity", number_op(kDims, Mode::cavity));
  rec.add("p_e", qubit_projector(kDims, 1));
  rec.record(0.0, State::basis(kDims, 1, 2));
  const std::string path = "trace_recorder_test.csv";
  rec.write_csv(path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "time,n_cavity,p_e");
  CHECK(row == "0,2,1");
  std::remove(path.c_str());
}
