#pragma once

#include <optional>
#include <vector>

#include "smld/double_double.hpp"
#include "smld/operator.hpp"
#include "smld/special_fn.hpp"

namespace smld {

// Raw moments mu_r(x) = M_n[t^r](x).
double raw_moment_closed(unsigned r, double x, const OperatorParams& params, const AccuracyPolicy& accuracy = {});
double raw_moment_recurrence(unsigned r, double x, const OperatorParams& params);
// mu_0 .. mu_{r_max} by the same recurrence in double-double, with nx and
// n - beta formed exactly.
std::vector<DoubleDouble> raw_moments_extended(unsigned r_max, double x, const OperatorParams& params);
// Polynomials in nx for r = 1..4.
double raw_moment_explicit(unsigned r, double x, const OperatorParams& params);
double raw_moment_quadrature(unsigned r, double x, const OperatorParams& params, const TruncationPolicy& policy = {});

// Relative residual of the three-term recurrence at order r with closed-form
// inputs mu_{r-1}, mu_r, mu_{r+1}.
double recurrence_residual(unsigned r, double x, const OperatorParams& params);
// |central difference of mu_r at x - (n r / (n-beta)) mu_{r-1} with alpha+1|.
double diff_recurrence_residual(unsigned r, double x, const OperatorParams& params, double h);

struct MomentReport {
  unsigned r = 0;
  double x = 0.0;
  double value_closed = 0.0;
  double value_recurrence = 0.0;
  std::optional<double> value_explicit;
  double value_quadrature = 0.0;
  double max_cross_residual = 0.0;
};

MomentReport moment_report(unsigned r, double x, const OperatorParams& params, const TruncationPolicy& policy = {});

// Central moments M_n[(t - x)^r](x).
double central_moment_explicit(unsigned r, double x, const OperatorParams& params);

struct CentralMoment {
  double value = 0.0;
  double rel_error_estimate = 0.0;
  bool warning = false;
};

CentralMoment central_moment_binomial(unsigned r, double x, const OperatorParams& params);
// Explicit polynomial for r <= 4, binomial sum otherwise.
double central_moment(unsigned r, double x, const OperatorParams& params);
double central_moment_quadrature(unsigned r, double x, const OperatorParams& params,
                                 const TruncationPolicy& policy = {});

struct AsymptoticCase {
  unsigned r = 0;
  double x = 0.0;
  OperatorParams params;
  double predicted_leading = 0.0;
  double A = 1.0;      // n / (n - beta)
  double z = 0.0;      // n x
  double delta = 0.0;  // A - 1
};

double asymptotic_prediction(unsigned r, double x, const OperatorParams& params);
AsymptoticCase asymptotic_case(unsigned r, double x, const OperatorParams& params);

struct AsymptoticRow {
  double n = 0.0;
  double exact = 0.0;
  double predicted = 0.0;
  std::optional<double> ratio;  // empty when the prediction is zero
  double S0 = 0.0;
  double S1 = 0.0;
  double two_term = 0.0;
  bool zero_prediction = false;
};

std::vector<AsymptoticRow> asymptotic_ratio_table(unsigned r, double x, const OperatorParams& params_template,
                                                  const std::vector<double>& n_grid);

}  // namespace smld
