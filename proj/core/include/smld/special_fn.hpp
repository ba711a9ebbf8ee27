#pragma once

#include <optional>
#include <vector>

namespace smld {

struct AccuracyPolicy {
  double series_rel_tol = 1e-15;
  int max_terms = 100000;
  // Series/asymptotic boundary for kummer_scaled; unset means 40 + |a| + |b|.
  std::optional<double> switchover_z;

  void validate() const;
};

double log_gamma(double s);
double pochhammer(double a, unsigned r);

// Regularized incomplete gamma P(s,z) and Q(s,z) = 1 - P(s,z).
double reg_lower_gamma(double s, double z);
double reg_upper_gamma(double s, double z);
double log_reg_lower_gamma(double s, double z);
double log_reg_upper_gamma(double s, double z);

// exp(-z) * 1F1(a; b; z), never forming 1F1 itself.
double kummer_scaled(double a, double b, double z, const AccuracyPolicy& policy = {});

// log of (nx)^k e^{-nx} / k!; -inf when x = 0 and k >= 1.
double poisson_weight_log(double n, double x, long k);
// Sum of the Poisson weights with index above K, clamped to [0,1].
double poisson_tail(double n, double x, long K);

// Saddle-point pieces of the Poisson density, valid for real arguments.
double stirling_error(double k);
double deviance_term(double k, double mean);
// log(mean^k e^{-mean} / Gamma(k+1)) for real k > -1.
double log_poisson_density(double k, double mean);
// log of the Gamma(shape, rate) density at t.
double log_gamma_density(double t, double shape, double rate);

// Weights mean^k e^{-mean} / k! for k in [k_lo, k_hi].
std::vector<double> poisson_weights(double mean, long k_lo, long k_hi);

}  // namespace smld
