#include "snappa/optimize.hpp"

#include <cmath>
#include <limits>

#include "snappa/errors.hpp"

namespace snappa {

namespace {

RVector<double> numeric_gradient(const ObjectiveFn& f, const RVector<double>& x, double h) {
  RVector<double> g(x.size());
  RVector<double> probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = probe[i];
    probe[i] = keep + h;
    const double up = f(probe);
    probe[i] = keep - h;
    const double down = f(probe);
    probe[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

BfgsResult minimize_bfgs(const ObjectiveFn& f, RVector<double> x, const BfgsOptions& options) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  double fx = f(x);
  RVector<double> g = numeric_gradient(f, x, options.fd_step);
  BfgsResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (fx <= options.value_tolerance || g.norm() < options.gradient_tolerance) break;
    RVector<double> dir = -inv_hessian * g;
    if (dir.dot(g) >= 0.0) {
      inv_hessian.setIdentity();
      dir = -g;
    }
    // Backtracking line search with the Armijo condition.
    double step = 1.0;
    double f_new = fx;
    RVector<double> x_new = x;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      x_new = x + step * dir;
      f_new = f(x_new);
      if (f_new <= fx + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if ((inv_hessian - Eigen::MatrixXd::Identity(n, n)).norm() == 0.0) break;
      inv_hessian.setIdentity();
      continue;
    }
    const RVector<double> g_new = numeric_gradient(f, x_new, options.fd_step);
    const RVector<double> s = x_new - x;
    const RVector<double> y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      inv_hessian = (I - rho * s * y.transpose()) * inv_hessian * (I - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }
    x = x_new;
    fx = f_new;
    g = g_new;
  }
  result.x = x;
  result.value = fx;
  result.iterations = it;
  return result;
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Eigen::Vector3d fit_sinusoid_fixed(const std::vector<double>& t, const std::vector<double>& y, double w,
                                   double* rss) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(w * t[i]);
    design(i, 2) = std::sin(w * t[i]);
    rhs[i] = y[i];
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
  if (rss != nullptr) *rss = (design * c - rhs).squaredNorm();
  return c;
}

SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y, double w_lo, double w_hi,
                         int scan_points) {
  if (t.size() != y.size() || t.size() < 4) throw FitError("sinusoid fit needs at least four samples");
  auto cost = [&](double w) {
    double rss = 0.0;
    fit_sinusoid_fixed(t, y, w, &rss);
    return rss;
  };
  double best_w = w_lo;
  double best = std::numeric_limits<double>::infinity();
  const double dw = (w_hi - w_lo) / (scan_points - 1);
  for (int i = 0; i < scan_points; ++i) {
    const double w = w_lo + i * dw;
    const double c = cost(w);
    if (c < best) {
      best = c;
      best_w = w;
    }
  }
  const double w = golden_section_minimize(cost, std::max(w_lo, best_w - dw), std::min(w_hi, best_w + dw), 1e-12);
  double rss = 0.0;
  const Eigen::Vector3d c = fit_sinusoid_fixed(t, y, w, &rss);
  SinusoidFit fit;
  fit.frequency = w;
  fit.offset = c[0];
  fit.cos_coeff = c[1];
  fit.sin_coeff = c[2];
  fit.rms = std::sqrt(rss / static_cast<double>(t.size()));
  return fit;
}

}  // namespace snappa
