#include "snappa/tomography.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "snappa/dynamics.hpp"
#include "snappa/errors.hpp"

namespace snappa {

namespace {

constexpr int kMaxPadded = 220;

int padded_size(int levels, double r) {
  const int extra = 40 + static_cast<int>(std::ceil(2.0 * r * r + 6.0 * r));
  return std::min(levels + extra, std::max(levels, kMaxPadded));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Real parameters of an upper-triangular T, row by row: (re, im) pairs.
int triangular_size(int n) { return n * (n + 1); }

Matrix unpack_triangular(const Eigen::VectorXd& x, int n) {
  Matrix t = Matrix::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, k += 2) t(i, j) = Complex(x[k], x[k + 1]);
  }
  return t;
}

Eigen::VectorXd pack_triangular(const Matrix& t) {
  const int n = static_cast<int>(t.rows());
  Eigen::VectorXd x(triangular_size(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, k += 2) {
      x[k] = t(i, j).real();
      x[k + 1] = t(i, j).imag();
    }
  }
  return x;
}

/// Residuals W_model - W_data for rho = T^dag T / Tr[T^dag T].
struct CholeskyFit {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<Matrix>* kernels;
  const std::vector<double>* data;
  int n;

  int inputs() const { return triangular_size(n); }
  int values() const { return static_cast<int>(data->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const Matrix t = unpack_triangular(x, n);
    const Matrix g = t.adjoint() * t;
    const double s = g.trace().real();
    for (int k = 0; k < values(); ++k) {
      fvec[k] = ((*kernels)[k].cwiseProduct(g.transpose())).sum().real() / s - (*data)[k];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& fjac) const {
    const Matrix t = unpack_triangular(x, n);
    const Matrix g = t.adjoint() * t;
    const double s = g.trace().real();
    for (int k = 0; k < values(); ++k) {
      const Matrix& kern = (*kernels)[k];
      const double num = (kern.cwiseProduct(g.transpose())).sum().real();
      const Matrix m = t * kern;
      int c = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j, c += 2) {
          fjac(k, c) = 2.0 * m(i, j).real() / s - num * 2.0 * t(i, j).real() / (s * s);
          fjac(k, c + 1) = 2.0 * m(i, j).imag() / s - num * 2.0 * t(i, j).imag() / (s * s);
        }
      }
    }
    return 0;
  }
};

}  // namespace

void WignerGrid::validate() const {
  if (alphas.size() != values.size()) throw DimensionError("Wigner grid has mismatched point and value counts");
  for (double v : values) {
    if (!(std::abs(v) <= kWignerBound + 1e-6)) throw InvariantError("Wigner value outside [-2/pi, 2/pi]");
  }
}

double WignerGrid::integral() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * spacing * spacing;
}

WignerGrid make_grid(double half_extent, double spacing) {
  if (!(half_extent > 0.0) || !(spacing > 0.0)) throw InvariantError("grid extent and spacing must be positive");
  WignerGrid g;
  g.half_extent = half_extent;
  g.spacing = spacing;
  g.side = static_cast<int>(std::lround(2.0 * half_extent / spacing)) + 1;
  g.alphas.reserve(static_cast<std::size_t>(g.side) * g.side);
  for (int i = 0; i < g.side; ++i) {
    for (int j = 0; j < g.side; ++j) g.alphas.emplace_back(-half_extent + j * spacing, -half_extent + i * spacing);
  }
  g.values.assign(g.alphas.size(), 0.0);
  return g;
}

WignerKernel::WignerKernel(int levels, double max_abs_alpha)
    : levels_(levels), basis_(padded_size(levels, max_abs_alpha)) {
  if (levels < 1) throw DimensionError("Wigner kernel needs at least one Fock level");
  if (max_abs_alpha * max_abs_alpha > basis_.levels() / 4.0) {
    warn("displacement too large for the padded Wigner basis; truncation effects expected");
  }
}

Matrix WignerKernel::operator()(Complex alpha) const {
  return (2.0 / kPi) * basis_.displaced_parity(alpha, levels_);
}

double wigner_point(const Matrix& rho_cavity, Complex alpha) {
  const WignerKernel kernel(static_cast<int>(rho_cavity.rows()), std::abs(alpha));
  return (kernel(alpha).cwiseProduct(rho_cavity.transpose())).sum().real();
}

WignerGrid wigner_grid(const Matrix& rho_cavity, double half_extent, double spacing) {
  WignerGrid grid = make_grid(half_extent, spacing);
  const WignerKernel kernel(static_cast<int>(rho_cavity.rows()), std::sqrt(2.0) * half_extent);
  const Matrix rho_t = rho_cavity.transpose();
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    grid.values[i] = (kernel(grid.alphas[i]).cwiseProduct(rho_t)).sum().real();
  }
  grid.validate();
  return grid;
}

double ramsey_parity_readout(const State& state, Complex alpha, const SystemParams& params,
                             const RamseyOptions& options) {
  const HilbertDims& in = state.dims();
  const int n = in.cavity_levels;
  const HilbertDims pad{2, padded_size(n, std::abs(alpha))};
  const DisplacementBasis<double> basis(pad.cavity_levels);
  const int m = pad.cavity_levels;

  SystemParams p = params;
  if (options.ideal) p.chi_prime = 0.0;
  const double wait = kPi / p.chi;
  const Vector h = static_hamiltonian(p, pad).matrix().diagonal();
  const double s = 1.0 / std::sqrt(2.0);

  if (state.is_pure() && !options.decoherence) {
    Vector g = Vector::Zero(m), e = Vector::Zero(m);
    g.head(n) = state.vector().head(n);
    e.head(n) = state.vector().tail(n);
    g = basis.apply(-alpha, g);
    e = basis.apply(-alpha, e);
    Vector g1 = s * (g - e), e1 = s * (g + e);
    for (int k = 0; k < m; ++k) {
      g1[k] *= std::polar(1.0, -h[pad.index(0, k)].real() * wait);
      e1[k] *= std::polar(1.0, -h[pad.index(1, k)].real() * wait);
    }
    const Vector g2 = s * (g1 + e1), e2 = s * (e1 - g1);
    return g2.squaredNorm() - e2.squaredNorm();
  }

  Matrix embed = Matrix::Zero(pad.size(), in.size());
  for (int q = 0; q < 2; ++q) {
    for (int k = 0; k < n; ++k) embed(pad.index(q, k), in.index(q, k)) = 1.0;
  }
  const Matrix dm = basis.matrix(-alpha);
  Matrix u = Matrix::Zero(pad.size(), pad.size());
  u.topLeftCorner(m, m) = dm;
  u.bottomRightCorner(m, m) = dm;
  Matrix y = Matrix::Zero(pad.size(), pad.size());
  y.topLeftCorner(m, m).setIdentity();
  y.bottomRightCorner(m, m).setIdentity();
  y.topRightCorner(m, m) = -Matrix::Identity(m, m);
  y.bottomLeftCorner(m, m) = Matrix::Identity(m, m);
  y *= s;
  const Matrix pre = y * u * embed;
  const Matrix rho0 = pre * state.density() * pre.adjoint();

  Matrix rho;
  if (options.decoherence) {
    EvolutionRequest req{State::mixed(pad, rho0)};
    req.duration = wait;
    req.step = options.step;
    req.open_system = true;
    req.params = p;
    rho = evolve_lindblad(req).density();
  } else {
    Vector ph(pad.size());
    for (int k = 0; k < pad.size(); ++k) ph[k] = std::polar(1.0, -h[k].real() * wait);
    rho = ph.asDiagonal() * rho0 * ph.conjugate().asDiagonal();
  }
  const Matrix out = y.adjoint() * rho * y;
  double pg = 0.0, pe = 0.0;
  for (int k = 0; k < m; ++k) {
    pg += out(pad.index(0, k), pad.index(0, k)).real();
    pe += out(pad.index(1, k), pad.index(1, k)).real();
  }
  return pg - pe;
}

ReconstructionResult reconstruct(const WignerGrid& grid, int fock_cut) {
  grid.validate();
  if (fock_cut < 1) throw InvariantError("fock_cut must be positive");
  const int points = static_cast<int>(grid.values.size());
  if (2.0 * grid.half_extent < 2.0 + std::sqrt(static_cast<double>(fock_cut))) {
    throw InvariantError("Wigner grid too narrow for the requested Fock cut");
  }
  if (points < fock_cut * fock_cut) throw InvariantError("too few Wigner samples for the requested Fock cut");

  double max_r = 0.0;
  for (Complex a : grid.alphas) max_r = std::max(max_r, std::abs(a));
  const WignerKernel kernel(fock_cut, max_r);
  std::vector<Matrix> kernels;
  kernels.reserve(points);
  for (Complex a : grid.alphas) kernels.push_back(kernel(a));

  // Linear least squares over Hermitian rho with a trace row, then projection.
  const int n = fock_cut;
  const int params = n * n;
  Eigen::MatrixXd design(points + 1, params);
  Eigen::VectorXd rhs(points + 1);
  const double trace_weight = 10.0;
  for (int k = 0; k < points; ++k) {
    const Matrix& kern = kernels[k];
    int c = 0;
    for (int i = 0; i < n; ++i) design(k, c++) = kern(i, i).real();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        design(k, c++) = 2.0 * kern(j, i).real();
        design(k, c++) = -2.0 * kern(j, i).imag();
      }
    }
    rhs[k] = grid.values[k];
  }
  design.row(points).setZero();
  design.row(points).head(n).setConstant(trace_weight);
  rhs[points] = trace_weight;

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] < 1e-10 * sv[0]) throw InvariantError("Wigner design matrix is ill-conditioned");
  const Eigen::VectorXd x = svd.solve(rhs);

  Matrix rho_ls = Matrix::Zero(n, n);
  {
    int c = 0;
    for (int i = 0; i < n; ++i) rho_ls(i, i) = x[c++];
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j, c += 2) {
        rho_ls(i, j) = Complex(x[c], x[c + 1]);
        rho_ls(j, i) = std::conj(rho_ls(i, j));
      }
    }
  }
  Matrix rho0 = project_to_density(rho_ls);
  rho0 += 1e-9 * Matrix::Identity(n, n);
  rho0 /= rho0.trace();

  const Eigen::LLT<Matrix> llt(rho0);
  Eigen::VectorXd t0 = pack_triangular(Matrix(llt.matrixL()).adjoint());

  CholeskyFit functor{&kernels, &grid.values, n};
  Eigen::LevenbergMarquardt<CholeskyFit> lm(functor);
  lm.parameters.maxfev = 400;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  lm.minimize(t0);

  const Matrix t = unpack_triangular(t0, n);
  Matrix rho = t.adjoint() * t;
  rho /= rho.trace();
  rho = (rho + rho.adjoint()) / 2.0;

  Eigen::VectorXd resid(points);
  functor(t0, resid);
  ReconstructionResult out;
  out.rho = rho;
  out.residual = std::sqrt(resid.squaredNorm() / points);
  out.iterations = static_cast<int>(lm.iter);
  return out;
}

double fidelity(const Matrix& rho, const Vector& target) {
  const Eigen::Index n = rho.rows();
  Vector psi = Vector::Zero(n);
  if (target.size() > n) {
    if (target.tail(target.size() - n).norm() > 1e-12) throw DimensionError("target extends beyond rho");
    psi = target.head(n);
  } else {
    psi.head(target.size()) = target;
  }
  const double f = (psi.adjoint() * rho * psi)(0, 0).real() / psi.squaredNorm();
  return std::clamp(f, 0.0, 1.0);
}

double qubit_population(const State& state) {
  const HilbertDims& d = state.dims();
  double p = 0.0;
  if (state.is_pure()) {
    for (int k = 0; k < d.cavity_levels; ++k) p += std::norm(state.vector()[d.index(1, k)]);
  } else {
    const Matrix rho = state.density();
    for (int k = 0; k < d.cavity_levels; ++k) p += rho(d.index(1, k), d.index(1, k)).real();
  }
  return std::clamp(p, 0.0, 1.0);
}

void write_wigner_csv(const std::string& path, const WignerGrid& grid) {
  grid.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# half_extent = " << format_double(grid.half_extent) << "\n";
  out << "# spacing = " << format_double(grid.spacing) << "\n";
  out << "# side = " << grid.side << "\n";
  for (const auto& [k, v] : grid.meta) out << "# " << k << " = " << v << "\n";
  out << "re_alpha,im_alpha,value\n";
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    out << format_double(grid.alphas[i].real()) << ',' << format_double(grid.alphas[i].imag()) << ','
        << format_double(grid.values[i]) << "\n";
  }
}

WignerGrid read_wigner_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  WignerGrid grid;
  grid.side = 0;
  grid.half_extent = 0.0;
  grid.spacing = 0.0;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string value = trim(line.substr(eq + 1));
      try {
        if (key == "half_extent") grid.half_extent = std::stod(value);
        else if (key == "spacing") grid.spacing = std::stod(value);
        else if (key == "side") grid.side = std::stoi(value);
        else grid.meta[key] = value;
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad metadata value");
      }
      continue;
    }
    if (!header) {
      if (line != "re_alpha,im_alpha,value") throw ConfigError(path + ": expected header re_alpha,im_alpha,value");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected three columns");
    }
    try {
      grid.alphas.emplace_back(std::stod(a), std::stod(b));
      grid.values.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  if (grid.alphas.empty()) throw ConfigError(path + ": no Wigner samples");
  if (grid.half_extent <= 0.0) {
    for (Complex a : grid.alphas) grid.half_extent = std::max({grid.half_extent, std::abs(a.real()), std::abs(a.imag())});
  }
  if (grid.side <= 0) grid.side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid.alphas.size()))));
  if (grid.spacing <= 0.0 && grid.side > 1) grid.spacing = 2.0 * grid.half_extent / (grid.side - 1);
  grid.validate();
  return grid;
}

}  // namespace snappa
