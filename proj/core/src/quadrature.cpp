#include "smld/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "smld/error.hpp"

namespace smld {

namespace {

// Golub-Welsch nodes from the Jacobi matrix eigenvalues; weights from
// w_i = 1 / sum_j p_j(x_i)^2 over the orthonormal polynomials, which avoids
// forming eigenvectors. Polynomial values are rescaled to stay in range.
GaussRule build_rule(double a, int points) {
  Eigen::VectorXd diag(points);
  Eigen::VectorXd sub(points - 1);
  for (int i = 0; i < points; ++i) diag(i) = 2.0 * i + a + 1.0;
  for (int i = 1; i < points; ++i) sub(i - 1) = std::sqrt(i * (i + a));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(Errc::quadrature_nonconvergence, "Gauss-Laguerre eigen-solve failed");
  constexpr double kBig = 1e100;
  const double log_big = std::log(kBig);
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  std::vector<double> log_w(points);
  double top = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    double x = solver.eigenvalues()(i);
    rule.nodes[i] = x;
    double prev = 0.0;
    double cur = 1.0;
    double sum = 1.0;
    double log_scale = 0.0;
    for (int j = 0; j + 1 < points; ++j) {
      double next = ((x - diag(j)) * cur - (j > 0 ? sub(j - 1) * prev : 0.0)) / sub(j);
      prev = cur;
      cur = next;
      sum += cur * cur;
      if (std::fabs(cur) > kBig) {
        prev /= kBig;
        cur /= kBig;
        sum /= kBig * kBig;
        log_scale += log_big;
      }
    }
    log_w[i] = -std::log(sum) - 2.0 * log_scale;
    top = std::max(top, log_w[i]);
  }
  double total = 0.0;
  for (int i = 0; i < points; ++i) total += rule.weights[i] = std::exp(log_w[i] - top);
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace

const GaussRule& gauss_laguerre(double a, int points) {
  if (!(a > -1.0)) fail(Errc::domain, "Gauss-Laguerre rule requires a > -1");
  if (points < 2) fail(Errc::invalid_policy, "Gauss-Laguerre rule needs at least two points");
  static std::mutex mutex;
  static std::map<std::pair<double, int>, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{a, points}];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(a, points));
  return *slot;
}

QuadResult integrate_smooth(const Integrand& f, double a, double b, double tol) {
  QuadResult r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &r.error);
  return r;
}

QuadResult integrate_endpoint_singular(const Integrand& f, double a, double b, double tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  QuadResult r;
  if (a == b) return r;
  r.value = integrator.integrate(f, a, b, tol, &r.error);
  return r;
}

QuadResult integrate_to_infinity(const Integrand& f, double a, double tol) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  QuadResult r;
  r.value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), tol, &r.error);
  return r;
}

double gauss_legendre_panel(const Integrand& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

}  // namespace smld
