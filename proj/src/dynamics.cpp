#include "snappa/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>

namespace snappa {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

/// exp(-i h dt) for a 2x2 Hermitian block.
Eigen::Matrix2cd expm_2x2(const Eigen::Matrix2cd& h, double dt) {
  const double mean = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double half_split = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double w = std::hypot(half_split, std::abs(h(0, 1)));
  const double c = std::cos(w * dt);
  const double sinc = w * dt > 1e-8 ? std::sin(w * dt) / w : dt * (1.0 - (w * dt) * (w * dt) / 6.0);
  Eigen::Matrix2cd traceless = h;
  traceless(0, 0) = half_split;
  traceless(1, 1) = -half_split;
  Eigen::Matrix2cd u = c * Eigen::Matrix2cd::Identity() - Complex(0.0, sinc) * traceless;
  return std::polar(1.0, -mean * dt) * u;
}

Matrix block_exponential(const Matrix& h, const std::vector<int>& idx, double dt) {
  const int k = static_cast<int>(idx.size());
  if (k == 1) {
    Matrix u(1, 1);
    u(0, 0) = std::polar(1.0, -h(idx[0], idx[0]).real() * dt);
    return u;
  }
  if (k == 2) {
    Eigen::Matrix2cd sub;
    sub << h(idx[0], idx[0]), h(idx[0], idx[1]), h(idx[1], idx[0]), h(idx[1], idx[1]);
    return expm_2x2(sub, dt);
  }
  Matrix sub(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) sub(r, c) = h(idx[r], idx[c]);
  return expm_hermitian(sub, dt);
}

std::vector<double> default_probes(double duration) {
  std::vector<double> probes;
  for (double f : {0.013, 0.19, 0.31, 0.5, 0.62, 0.77, 0.93}) probes.push_back(f * duration);
  return probes;
}

struct StepPlan {
  int steps = 0;
  double dt = 0.0;
};

StepPlan plan_steps(double duration, double step) {
  if (!(duration >= 0.0)) throw InvariantError("evolution duration must be non-negative");
  if (!(step > 0.0)) throw InvariantError("evolution step must be positive");
  StepPlan p;
  p.steps = static_cast<int>(std::ceil(duration / step - 1e-9));
  p.dt = p.steps > 0 ? duration / p.steps : 0.0;
  return p;
}

void check_step(const EffectiveHamiltonian& h, double step) {
  const double limit = max_step(h);
  if (step > limit * (1.0 + 1e-12)) {
    throw InvariantError("time step " + std::to_string(step) + " s exceeds the stability limit " +
                         std::to_string(limit) + " s");
  }
}

class Dissipator {
 public:
  explicit Dissipator(const std::vector<CollapseOperator>& ops) {
    for (const CollapseOperator& c : ops) {
      if (c.rate < 0.0) throw InvariantError("collapse rate must be non-negative");
      if (c.rate == 0.0) continue;
      SparseMatrix s = c.op.matrix().sparseView(0.0, 1e-300);
      jumps_.push_back(std::sqrt(c.rate) * s);
      jumps_dag_.push_back(jumps_.back().adjoint());
      const SparseMatrix k = jumps_dag_.back() * jumps_.back();
      decay_ = decay_.size() == 0 ? Matrix(k) : Matrix(decay_ + Matrix(k));
    }
  }

  bool empty() const { return jumps_.empty(); }

  Matrix generator(const Matrix& rho) const {
    Matrix out = -0.5 * (decay_ * rho + rho * decay_);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const Matrix left = jumps_[k] * rho;
      out += left * jumps_dag_[k];
    }
    return out;
  }

  /// Second-order Taylor step of the dissipator alone.
  void advance(Matrix& rho, double h) const {
    const Matrix l1 = generator(rho);
    const Matrix l2 = generator(l1);
    rho += h * l1 + (0.5 * h * h) * l2;
  }

 private:
  std::vector<SparseMatrix> jumps_;
  std::vector<SparseMatrix> jumps_dag_;
  Matrix decay_;
};

}  // namespace

std::vector<CollapseOperator> collapse_set(const SystemParams& params, const HilbertDims& dims) {
  std::vector<CollapseOperator> out;
  if (params.t1_qubit > 0.0) out.push_back({annihilation(dims, Mode::qubit), 1.0 / params.t1_qubit});
  const double dephasing = params.pure_dephasing_rate();
  if (dephasing > 0.0) out.push_back({number_op(dims, Mode::qubit), 2.0 * dephasing});
  if (params.t1_cavity > 0.0) out.push_back({annihilation(dims, Mode::cavity), 1.0 / params.t1_cavity});
  return out;
}

double max_step(const EffectiveHamiltonian& h) {
  const double scale_hz = h.frequency_scale() / kTwoPi;
  return 1.0 / (50.0 * scale_hz);
}

BlockPropagator::BlockPropagator(HamiltonianFn h, int dim, const std::vector<double>& probe_times)
    : h_(std::move(h)), dim_(dim) {
  std::vector<int> parent(dim_);
  std::iota(parent.begin(), parent.end(), 0);
  for (double t : probe_times) {
    const Matrix m = h_(t);
    if (m.rows() != dim_ || m.cols() != dim_) throw DimensionError("Hamiltonian size mismatch");
    for (int r = 0; r < dim_; ++r) {
      for (int c = r + 1; c < dim_; ++c) {
        if (m(r, c) != Complex(0.0) || m(c, r) != Complex(0.0)) {
          const int a = find_root(parent, r);
          const int b = find_root(parent, c);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  }
  std::vector<std::vector<int>> by_root(dim_);
  for (int i = 0; i < dim_; ++i) by_root[find_root(parent, i)].push_back(i);
  for (auto& b : by_root)
    if (!b.empty()) blocks_.push_back(std::move(b));
}

Matrix BlockPropagator::step(double t_mid, double dt) const {
  const Matrix h = h_(t_mid);
  Matrix u = Matrix::Zero(dim_, dim_);
  for (const auto& idx : blocks_) {
    const Matrix ub = block_exponential(h, idx, dt);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c) u(idx[r], idx[c]) = ub(r, c);
  }
  return u;
}

void BlockPropagator::apply(Vector& psi, double t_mid, double dt) const {
  const Matrix h = h_(t_mid);
  for (const auto& idx : blocks_) {
    const Matrix ub = block_exponential(h, idx, dt);
    Vector sub(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) sub[r] = psi[idx[r]];
    const Vector out = ub * sub;
    for (std::size_t r = 0; r < idx.size(); ++r) psi[idx[r]] = out[r];
  }
}

Vector propagate(const HamiltonianFn& h, Vector psi, double duration, double step,
                 const std::function<void(double, const Vector&)>& sample, int sample_every,
                 const std::vector<double>& probe_times) {
  const StepPlan plan = plan_steps(duration, step);
  const BlockPropagator prop(h, static_cast<int>(psi.size()),
                             probe_times.empty() ? default_probes(duration) : probe_times);
  const bool sampling = sample && sample_every > 0;
  if (sampling) sample(0.0, psi);
  for (int k = 0; k < plan.steps; ++k) {
    prop.apply(psi, (k + 0.5) * plan.dt, plan.dt);
    if (sampling && ((k + 1) % sample_every == 0 || k + 1 == plan.steps)) sample((k + 1) * plan.dt, psi);
  }
  return psi;
}

State evolve_unitary(const EvolutionRequest& req) {
  if (req.open_system) throw InvariantError("evolve_unitary called with open_system set");
  if (!req.initial.is_pure()) throw InvariantError("evolve_unitary needs a pure initial state");
  req.params.validate();
  const HilbertDims dims = req.initial.dims();
  const auto model = std::make_shared<EffectiveHamiltonian>(req.params, dims, req.tones, req.fit, req.options);
  check_step(*model, req.step);

  std::function<void(double, const Vector&)> sample;
  if (req.observer && req.sample_every > 0) {
    sample = [&](double t, const Vector& v) { req.observer(t, State::pure(dims, v)); };
  }
  const Vector out = propagate([model](double t) { return model->matrix_at(t); }, req.initial.vector(),
                               req.duration, req.step, sample, req.sample_every);
  return State::pure(dims, out);
}

State evolve_lindblad(const EvolutionRequest& req) {
  if (!req.open_system) throw InvariantError("evolve_lindblad called without open_system");
  req.params.validate();
  const HilbertDims dims = req.initial.dims();
  const EffectiveHamiltonian model(req.params, dims, req.tones, req.fit, req.options);
  check_step(model, req.step);

  const std::vector<CollapseOperator> ops = req.collapse ? *req.collapse : collapse_set(req.params, dims);
  for (const CollapseOperator& c : ops)
    if (!(c.op.dims() == dims)) throw DimensionError("collapse operator dimension mismatch");
  const Dissipator dissipator(ops);

  const StepPlan plan = plan_steps(req.duration, req.step);
  const BlockPropagator prop([&model](double t) { return model.matrix_at(t); }, dims.size(),
                             default_probes(req.duration));
  auto as_state = [&dims](const Matrix& rho) {
    return State::mixed(dims, (rho + rho.adjoint()) / 2.0);
  };
  const bool sampling = req.observer && req.sample_every > 0;

  Matrix rho = req.initial.density();
  if (sampling) req.observer(0.0, as_state(rho));
  for (int k = 0; k < plan.steps; ++k) {
    if (!dissipator.empty()) dissipator.advance(rho, 0.5 * plan.dt);
    const Matrix u = prop.step((k + 0.5) * plan.dt, plan.dt);
    rho = u * rho * u.adjoint();
    if (!dissipator.empty()) dissipator.advance(rho, 0.5 * plan.dt);
    if (sampling && ((k + 1) % req.sample_every == 0 || k + 1 == plan.steps)) {
      req.observer((k + 1) * plan.dt, as_state(rho));
    }
  }
  return as_state(rho);
}

State evolve(const EvolutionRequest& req) {
  return req.open_system ? evolve_lindblad(req) : evolve_unitary(req);
}

void TraceRecorder::add(std::string name, Operator op) {
  names_.push_back(std::move(name));
  ops_.push_back(std::move(op));
}

void TraceRecorder::record(double t, const State& state) {
  std::vector<double> row;
  row.reserve(ops_.size());
  for (const Operator& op : ops_) row.push_back(expectation(op, state).real());
  times_.push_back(t);
  rows_.push_back(std::move(row));
}

Observer TraceRecorder::observer() {
  return [this](double t, const State& s) { record(t, s); };
}

void TraceRecorder::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace file " + path);
  out << "time";
  for (const std::string& n : names_) out << ',' << n;
  out << '\n' << std::setprecision(12);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    out << times_[i];
    for (double v : rows_[i]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace snappa
