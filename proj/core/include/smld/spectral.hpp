#pragma once

#include <optional>
#include <span>
#include <vector>

#include "smld/operator.hpp"

namespace smld {

// Leading (K+1) x (K+1) block of the coefficient map c -> P c, where row k is
// the negative binomial law with size k + alpha + 1 and success probability
// (n - beta) / (2n - beta).
struct TruncatedP {
  long K = 0;
  OperatorParams params;
  std::vector<double> entries;       // row-major
  std::vector<double> row_deficits;  // 1 - row sum, clamped to [0, 1]

  double at(long k, long j) const { return entries[static_cast<std::size_t>(k * (K + 1) + j)]; }
  std::vector<double> apply(std::span<const double> v) const;
};

TruncatedP build_P(const OperatorParams& params, long K);
// Grows K from k_start by 25% steps until the deficit of row K/2 is below
// deficit_tol.
TruncatedP build_P_adaptive(const OperatorParams& params, long k_start = 512, double deficit_tol = 1e-12,
                            long k_limit = 20000);

// Mass of row k beyond column K, from the regularized incomplete beta function.
double negative_binomial_tail(const OperatorParams& params, long k, long K);

enum class Eigenpair { constant, exponential };

struct EigenCheck {
  Eigenpair which = Eigenpair::constant;
  double lambda = 1.0;
  std::optional<double> vector_residual;
  std::optional<double> operator_residual;
  double tolerance = 0.0;
  bool passed = false;
};

double eigenvalue(const OperatorParams& params, Eigenpair which);

EigenCheck eigen_vector_check(const TruncatedP& P, Eigenpair which);
EigenCheck eigen_operator_check(const OperatorParams& params, Eigenpair which, const std::vector<double>& x_grid,
                                const TruncationPolicy& policy = {}, double tolerance = 1e-8);

// sum_j v_j psi_{n,j}(x); rejects non-finite coefficients.
double lift(std::span<const double> v, double x, double n, const TruncationPolicy& policy = {});

struct IterateStep {
  int step = 0;
  double max_deviation = 0.0;  // max over x of |Phi_{P^r v}(x) - lambda^r e^{-beta x}|
  std::optional<double> amplitude_ratio;
};

struct IterateReport {
  long K = 0;
  double lambda = 1.0;
  std::vector<IterateStep> steps;
  double tolerance = 0.0;
  bool truncation_dominated = false;
};

IterateReport iterate_decay(const OperatorParams& params, int r, const std::vector<double>& x_grid,
                            const TruncationPolicy& policy = {});

}  // namespace smld
