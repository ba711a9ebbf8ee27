#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smld/operator.hpp"

namespace smld {

using RealFunction = std::function<double(double)>;

struct NormSpec {
  enum class Kind { sup_compact, weighted_phi, lp, weighted_lp };
  Kind kind = Kind::sup_compact;
  double extent = 2.0;  // a, X_max, R or R_max depending on kind
  double p = 1.0;
  double gamma = 0.0;
  int grid_points = 2001;

  void validate() const;
  std::string describe() const;
};

struct ConvergenceRow {
  double n = 0.0;
  double error = 0.0;
  std::optional<double> reference;  // theoretical rate, e.g. omega(f, n^{-1/2})
  std::optional<double> ratio;      // error / reference
};

struct ConvergenceReport {
  std::string function;
  NormSpec norm;
  std::vector<ConvergenceRow> rows;
  std::optional<double> fitted_slope;
  std::optional<double> bound_constant;  // max ratio over rows
  bool hypothesis_holds = true;          // gamma <= p beta for weighted L_p
};

struct SupResult {
  double value = 0.0;
  double argmax = 0.0;
};

// max |g| over an even grid on [lo, hi] plus extra points, refined by golden
// section around the grid maximizer.
SupResult sup_abs(const RealFunction& g, double lo, double hi, int grid_points,
                  const std::vector<double>& extra_points = {});

double modulus_of_continuity(const RealFunction& f, double delta, double a, int grid_points = 2001);

ConvergenceReport compact_estimate_check(const TestFunction& f, const OperatorParams& params_template,
                                         const std::vector<double>& n_grid, double a,
                                         const TruncationPolicy& policy = {}, int grid_points = 2001);

double weighted_phi_norm(const RealFunction& g, double x_max, int grid_points = 2001);

struct KorovkinValues {
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

// sup_x |(c2 x^2 + c1 x + c0) / (1 + x^2)| over x >= 0, in closed form.
double weighted_rational_sup(double c2, double c1, double c0);
KorovkinValues korovkin_weighted_check(const OperatorParams& params);

double lp_error(const TestFunction& f, const OperatorParams& params, double p, double R,
                const TruncationPolicy& policy = {}, int panels = 128);

struct WeightedLp {
  double value = 0.0;
  bool hypothesis_holds = false;  // gamma <= p beta
};

WeightedLp weighted_lp_error(const TestFunction& f, const OperatorParams& params, double p, double gamma,
                             double R_max, const TruncationPolicy& policy = {}, int panels = 256);

struct SchurValue {
  double value = 0.0;
  bool lemma_applies = false;  // alpha in [-1/2, 0] and beta >= 0
};

SchurValue schur_E(const OperatorParams& params, double t);
double schur_first_integral(const OperatorParams& params, double gamma, double p, double x);

struct SchurSecond {
  double bound = 0.0;
  double direct = 0.0;
};

SchurSecond schur_second_integral(const OperatorParams& params, double gamma, double p, double t,
                                  const TruncationPolicy& policy = {});

struct SlopeFit {
  double slope = 0.0;
  int used = 0;
  int excluded_zero = 0;
};

SlopeFit rate_slope(const std::vector<double>& n, const std::vector<double>& errors);
double rate_slope(const ConvergenceReport& report);

// Error of M_n f against f in the given norm for each n.
ConvergenceReport convergence_study(const TestFunction& f, const OperatorParams& params_template,
                                    const std::vector<double>& n_grid, const NormSpec& norm,
                                    const TruncationPolicy& policy = {});

}  // namespace smld
