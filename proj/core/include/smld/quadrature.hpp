#pragma once

#include <functional>
#include <vector>

namespace smld {

using Integrand = std::function<double(double)>;

// Gauss rule for the weight u^a e^{-u} on [0, inf), weights normalized to sum
// to one so that sum w_i g(u_i) approximates the mean of g under Gamma(a+1, 1).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rules are built once per (a, points) and shared by all callers.
const GaussRule& gauss_laguerre(double a, int points);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod on a finite interval with a smooth integrand.
QuadResult integrate_smooth(const Integrand& f, double a, double b, double tol);
// Tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
QuadResult integrate_endpoint_singular(const Integrand& f, double a, double b, double tol);
// Exp-sinh on [a, inf).
QuadResult integrate_to_infinity(const Integrand& f, double a, double tol);
// Fixed 8-point Gauss-Legendre on one panel.
double gauss_legendre_panel(const Integrand& f, double a, double b);

}  // namespace smld
