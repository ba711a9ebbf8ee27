#include "smld/spectral.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <string>

#include "smld/special_fn.hpp"

namespace smld {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct RowLaw {
  double size;
  double p;
  double q;
  double log_p;
  double log_q;
};

RowLaw row_law(const OperatorParams& params, long k) {
  double denom = 2.0 * params.n - params.beta;
  RowLaw law;
  law.size = static_cast<double>(k) + params.alpha + 1.0;
  law.p = params.rate() / denom;
  law.q = params.n / denom;
  law.log_p = std::log(law.p);
  law.log_q = std::log(law.q);
  return law;
}

// log of C(j + s - 1, j) p^s q^j through the saddle-point form of the
// binomial density, accurate in relative terms for large s and j.
double log_pmf(const RowLaw& law, long j) {
  double s = law.size;
  if (j == 0) return s * law.log_p;
  double jj = static_cast<double>(j);
  double N = s + jj;
  double lc = stirling_error(N) - stirling_error(s) - stirling_error(jj) - deviance_term(s, N * law.p) -
              deviance_term(jj, N * law.q);
  return std::log(s / N) + lc + 0.5 * (std::log(N) - kLog2Pi - std::log(s) - std::log(jj));
}

// Fills out[0..K] with row k of P; returns the compensated row sum.
double fill_row(const RowLaw& law, long K, double* out) {
  constexpr long kReanchor = 64;
  double s = law.size;
  long mode = s > 1.0 ? static_cast<long>(std::floor((s - 1.0) * law.q / law.p)) : 0;
  mode = std::clamp(mode, 0L, K);
  auto exact = [&](long j) { return std::exp(log_pmf(law, j)); };
  out[mode] = exact(mode);
  for (long j = mode + 1; j <= K; ++j)
    out[j] = (j - mode) % kReanchor == 0 ? exact(j) : out[j - 1] * law.q * (s + j - 1.0) / static_cast<double>(j);
  for (long j = mode - 1; j >= 0; --j)
    out[j] = (mode - j) % kReanchor == 0 ? exact(j) : out[j + 1] * (j + 1.0) / (law.q * (s + j));
  Neumaier acc;
  for (long j = 0; j <= K; ++j) acc.add(out[j]);
  return acc.value();
}

}  // namespace

std::vector<double> TruncatedP::apply(std::span<const double> v) const {
  if (static_cast<long>(v.size()) != K + 1) fail(Errc::eigen_precondition, "vector length must be K + 1");
  std::vector<double> out(static_cast<std::size_t>(K + 1));
  for (long k = 0; k <= K; ++k) {
    Neumaier acc;
    const double* row = entries.data() + k * (K + 1);
    for (long j = 0; j <= K; ++j) acc.add(row[j] * v[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(k)] = acc.value();
  }
  return out;
}

TruncatedP build_P(const OperatorParams& params, long K) {
  require_valid(params);
  if (K < 1) fail(Errc::eigen_precondition, "truncation order K must be at least 1");
  TruncatedP P;
  P.K = K;
  P.params = params;
  P.entries.assign(static_cast<std::size_t>((K + 1) * (K + 1)), 0.0);
  P.row_deficits.resize(static_cast<std::size_t>(K + 1));
  for (long k = 0; k <= K; ++k) {
    double sum = fill_row(row_law(params, k), K, P.entries.data() + k * (K + 1));
    P.row_deficits[static_cast<std::size_t>(k)] = std::clamp(1.0 - sum, 0.0, 1.0);
  }
  return P;
}

TruncatedP build_P_adaptive(const OperatorParams& params, long k_start, double deficit_tol, long k_limit) {
  require_valid(params);
  long K = std::max(k_start, 2L);
  std::vector<double> row;
  for (;;) {
    row.assign(static_cast<std::size_t>(K + 1), 0.0);
    double deficit = 1.0 - fill_row(row_law(params, K / 2), K, row.data());
    if (deficit < deficit_tol) break;
    if (K >= k_limit)
      fail(Errc::k_max_exceeded, "row deficits stay above tolerance up to K = " + std::to_string(k_limit));
    K = std::min(k_limit, static_cast<long>(std::ceil(K * 1.25)));
  }
  return build_P(params, K);
}

double negative_binomial_tail(const OperatorParams& params, long k, long K) {
  RowLaw law = row_law(params, k);
  return boost::math::ibetac(law.size, static_cast<double>(K) + 1.0, law.p);
}

double eigenvalue(const OperatorParams& params, Eigenpair which) {
  if (which == Eigenpair::constant) return 1.0;
  return std::pow(1.0 - params.beta / params.n, params.alpha + 1.0);
}

EigenCheck eigen_vector_check(const TruncatedP& P, Eigenpair which) {
  const OperatorParams& params = P.params;
  if (which == Eigenpair::exponential && !(params.beta > 0.0 && params.beta < params.n))
    fail(Errc::eigen_precondition, "exponential eigenvector needs 0 < beta < n");
  double z = which == Eigenpair::constant ? 1.0 : 1.0 - params.beta / params.n;
  EigenCheck out;
  out.which = which;
  out.lambda = eigenvalue(params, which);
  std::vector<double> v(static_cast<std::size_t>(P.K + 1));
  for (long j = 0; j <= P.K; ++j) v[static_cast<std::size_t>(j)] = std::pow(z, static_cast<double>(j));
  double residual = 0.0;
  double max_tail = 0.0;
  for (long k = 0; k <= P.K / 2; ++k) {
    Neumaier acc;
    const double* row = P.entries.data() + k * (P.K + 1);
    for (long j = 0; j <= P.K; ++j) acc.add(row[j] * v[static_cast<std::size_t>(j)]);
    residual = std::max(residual, std::fabs(acc.value() - out.lambda * v[static_cast<std::size_t>(k)]));
    max_tail = std::max(max_tail, P.row_deficits[static_cast<std::size_t>(k)]);
  }
  out.vector_residual = residual;
  out.tolerance = 10.0 * max_tail + 1e-14;
  out.passed = residual <= out.tolerance;
  return out;
}

EigenCheck eigen_operator_check(const OperatorParams& params, Eigenpair which, const std::vector<double>& x_grid,
                                const TruncationPolicy& policy, double tolerance) {
  require_valid(params);
  if (which == Eigenpair::exponential && !(params.beta >= 0.0))
    fail(Errc::eigen_precondition, "exponential eigenfunction needs beta >= 0");
  EigenCheck out;
  out.which = which;
  out.lambda = eigenvalue(params, which);
  TestFunction phi = which == Eigenpair::constant ? TestFunction::constant(1.0)
                                                   : TestFunction::exp_scaled(-params.beta).with_growth(0.0, 1.0);
  DurrmeyerOperator op(params, phi, policy);
  double residual = 0.0;
  for (double x : x_grid) residual = std::max(residual, std::fabs(op(x) - out.lambda * phi(x)));
  out.operator_residual = residual;
  out.tolerance = tolerance;
  out.passed = residual <= tolerance;
  return out;
}

double lift(std::span<const double> v, double x, double n, const TruncationPolicy& policy) {
  policy.validate();
  if (v.empty()) fail(Errc::unbounded_coefficients, "empty coefficient vector");
  double sup = 0.0;
  for (double c : v) {
    if (!std::isfinite(c)) fail(Errc::unbounded_coefficients, "coefficient vector has a non-finite entry");
    sup = std::max(sup, std::fabs(c));
  }
  if (!(n > 0.0) || !(x >= 0.0)) fail(Errc::domain, "lift needs n > 0 and x >= 0");
  double mean = n * x;
  if (mean == 0.0) return v[0];
  IndexRange range = certified_range(mean, 1.0, 0.0, sup, policy.eps_tail, policy.k_max);
  if (range.hi >= static_cast<long>(v.size()))
    fail(Errc::k_max_exceeded, "coefficient vector has " + std::to_string(v.size()) + " entries; x needs " +
                                   std::to_string(range.hi + 1));
  std::vector<double> w = poisson_weights(mean, range.lo, range.hi);
  Neumaier acc;
  for (long j = range.lo; j <= range.hi; ++j)
    acc.add(v[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j - range.lo)]);
  return acc.value();
}

IterateReport iterate_decay(const OperatorParams& params, int r, const std::vector<double>& x_grid,
                            const TruncationPolicy& policy) {
  require_valid(params);
  if (!(params.beta > 0.0 && params.beta < params.n))
    fail(Errc::eigen_precondition, "iterate decay needs 0 < beta < n");
  if (r < 0) fail(Errc::eigen_precondition, "iteration count must be nonnegative");
  TruncatedP P = build_P_adaptive(params);
  IterateReport rep;
  rep.K = P.K;
  rep.lambda = eigenvalue(params, Eigenpair::exponential);
  double z = 1.0 - params.beta / params.n;
  std::vector<double> v(static_cast<std::size_t>(P.K + 1));
  for (long j = 0; j <= P.K; ++j) v[static_cast<std::size_t>(j)] = std::pow(z, static_cast<double>(j));

  double max_deficit = 0.0;
  long needed = 0;
  for (double x : x_grid)
    if (x > 0.0) needed = std::max(needed, certified_range(params.n * x, 1.0, 0.0, 1.0, policy.eps_tail, policy.k_max).hi);
  for (long k = 0; k <= std::min(needed * 2, P.K); ++k)
    max_deficit = std::max(max_deficit, P.row_deficits[static_cast<std::size_t>(k)]);
  rep.truncation_dominated = needed * 2 > P.K;
  rep.tolerance = 10.0 * r * max_deficit + 1e-12;

  std::vector<double> previous;
  for (int step = 0; step <= r; ++step) {
    if (step > 0) v = P.apply(v);
    IterateStep s;
    s.step = step;
    std::vector<double> lifted;
    for (double x : x_grid) {
      double val = lift(v, x, params.n, policy);
      lifted.push_back(val);
      s.max_deviation =
          std::max(s.max_deviation, std::fabs(val - std::pow(rep.lambda, step) * std::exp(-params.beta * x)));
    }
    if (step > 0) {
      double worst = rep.lambda;
      for (std::size_t i = 0; i < lifted.size(); ++i) {
        double ratio = lifted[i] / previous[i];
        if (std::fabs(ratio - rep.lambda) >= std::fabs(worst - rep.lambda)) worst = ratio;
      }
      s.amplitude_ratio = worst;
    }
    previous = std::move(lifted);
    rep.steps.push_back(s);
  }
  return rep;
}

}  // namespace smld
