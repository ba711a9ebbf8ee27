#pragma once

#include <mutex>
#include <optional>
#include <unordered_map>

#include "smld/error.hpp"
#include "smld/test_function.hpp"

namespace smld {

struct OperatorParams {
  double n = 10.0;
  double alpha = 0.0;
  double beta = 0.0;

  // Rate of the Gamma weights, n - beta.
  double rate() const { return n - beta; }
};

struct TruncationPolicy {
  double eps_tail = 1e-14;
  int quad_nodes = 64;
  double eps_quad = 1e-13;
  long k_max = 200000;

  void validate() const;
};

// First violated constraint, checked in the order n > beta, alpha > -1,
// n > beta + A.
std::optional<Errc> validate(const OperatorParams& params);
std::optional<Errc> validate(const OperatorParams& params, const TestFunction& f);
void require_valid(const OperatorParams& params);
void require_valid(const OperatorParams& params, const TestFunction& f);

struct IndexRange {
  long lo = 0;
  long hi = 0;
};

// Smallest index window [lo, hi] such that
//   K * rho^a * sum_{k outside} rho^k psi_k(mean) <= eps
// where psi are Poisson weights. Each side gets half of eps.
IndexRange certified_range(double mean, double rho, double a, double bound_K, double eps, long k_max);

// M_n applied to one function; coefficients are computed lazily and cached.
// Safe to share between threads.
class DurrmeyerOperator {
 public:
  DurrmeyerOperator(OperatorParams params, TestFunction f, TruncationPolicy policy = {});

  double coefficient(long k) const;
  double operator()(double x) const;
  IndexRange truncation_range(double x) const;

  const OperatorParams& params() const { return params_; }
  const TestFunction& function() const { return f_; }
  const TruncationPolicy& policy() const { return policy_; }

 private:
  double compute_coefficient(long k) const;

  OperatorParams params_;
  TestFunction f_;
  TruncationPolicy policy_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<long, double> cache_;
};

// Mean of f(T), T ~ Gamma(k + alpha + 1, rate n - beta).
double coefficient(const TestFunction& f, long k, const OperatorParams& params,
                   const TruncationPolicy& policy = {});
// Same mean computed by adaptive panels only; the fallback and reference route.
double coefficient_adaptive(const TestFunction& f, long k, const OperatorParams& params,
                            const TruncationPolicy& policy = {});

double apply_operator(const TestFunction& f, double x, const OperatorParams& params,
                      const TruncationPolicy& policy = {});

double kernel(double x, double t, const OperatorParams& params, const TruncationPolicy& policy = {});

// Classical Szasz-Mirakyan operator.
double apply_szasz(const TestFunction& f, double x, double n, const TruncationPolicy& policy = {});

// Operator value at x = 0, integrated directly in t.
double value_at_zero(const TestFunction& f, const OperatorParams& params, const TruncationPolicy& policy = {});

// Envelope K ((n-b)/(n-b-A))^{a+1} exp(n x A / (n-b-A)) for |M_n f(x)|.
double growth_bound(const OperatorParams& params, const TestFunction& f, double x);

// Mazhar-Totik operator n sum_k psi_k(nx) int psi_k(nt) f(t) dt, written
// without any of the machinery above. Reference for alpha = beta = 0.
double apply_mazhar_totik(const TestFunction& f, double x, double n);

}  // namespace smld
