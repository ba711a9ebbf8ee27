#include "smld/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "smld/quadrature.hpp"
#include "smld/special_fn.hpp"

namespace smld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

double gauss_mean(const TestFunction& f, const GaussRule& rule, double rate, double* magnitude) {
  Neumaier acc;
  double mag = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double v = rule.weights[i] * f(rule.nodes[i] / rate);
    acc.add(v);
    mag += std::fabs(v);
  }
  if (magnitude) *magnitude = mag;
  return acc.value();
}

// Finds the smallest k in [lo, inf) with ok(k), given that ok is monotone and
// ok(lo) may already hold. Throws once the search passes k_max.
template <class Pred>
long smallest_true(Pred ok, long lo, long first_step, long k_max) {
  if (ok(lo)) return lo;
  long bad = lo;
  long step = std::max(first_step, 1L);
  long good = lo + step;
  while (!ok(good)) {
    if (good > k_max)
      fail(Errc::k_max_exceeded, "truncation index exceeds k_max = " + std::to_string(k_max));
    bad = good;
    step *= 2;
    good = bad + step;
  }
  while (good - bad > 1) {
    long mid = bad + (good - bad) / 2;
    if (ok(mid))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace

void TruncationPolicy::validate() const {
  if (!(eps_tail > 0.0 && eps_tail <= 1e-8)) fail(Errc::invalid_policy, "eps_tail must lie in (0, 1e-8]");
  if (quad_nodes < 32) fail(Errc::invalid_policy, "quad_nodes must be at least 32");
  if (!(eps_quad > 0.0 && eps_quad < 1e-3)) fail(Errc::invalid_policy, "eps_quad must lie in (0, 1e-3)");
  if (k_max < 256) fail(Errc::invalid_policy, "k_max must be at least 256");
}

std::optional<Errc> validate(const OperatorParams& params) {
  if (!std::isfinite(params.n) || !std::isfinite(params.beta) || !(params.n > params.beta))
    return Errc::n_not_above_beta;
  if (!std::isfinite(params.alpha) || !(params.alpha > -1.0)) return Errc::alpha_not_above_minus_one;
  if (!(params.n > 0.0)) return Errc::n_not_above_beta;
  return std::nullopt;
}

std::optional<Errc> validate(const OperatorParams& params, const TestFunction& f) {
  if (auto e = validate(params)) return e;
  if (!(params.n > params.beta + f.growth_A())) return Errc::n_not_above_beta_plus_growth;
  return std::nullopt;
}

void require_valid(const OperatorParams& params) {
  if (auto e = validate(params)) {
    switch (*e) {
      case Errc::alpha_not_above_minus_one: fail(*e, "requires alpha > -1");
      default: fail(*e, "requires n > beta (and n > 0)");
    }
  }
}

void require_valid(const OperatorParams& params, const TestFunction& f) {
  require_valid(params);
  if (validate(params, f)) fail(Errc::n_not_above_beta_plus_growth, "requires n > beta + A for " + f.describe());
}

IndexRange certified_range(double mean, double rho, double a, double bound_K, double eps, long k_max) {
  if (mean == 0.0 || bound_K == 0.0) return {0, 0};
  double mu = mean * rho;
  double log_env = std::log(bound_K) + a * std::log(rho) + mean * (rho - 1.0);
  double target = std::log(0.5 * eps);
  auto upper_ok = [&](long K) { return log_env + log_reg_lower_gamma(K + 1.0, mu) <= target; };
  long step = static_cast<long>(std::ceil(std::sqrt(mu))) + 4;
  long hi = smallest_true(upper_ok, 0, static_cast<long>(std::floor(mu)) + step, k_max);
  if (hi > k_max) fail(Errc::k_max_exceeded, "truncation index exceeds k_max = " + std::to_string(k_max));

  // Largest lo with the mass below lo negligible; Q(lo, mu) grows with lo.
  auto lower_ok = [&](long lo) { return log_env + log_reg_upper_gamma(static_cast<double>(lo), mu) <= target; };
  long top = std::min(hi, static_cast<long>(std::floor(mu)));
  long lo = 0;
  if (top >= 1 && lower_ok(1)) {
    long good = 1;
    long bad = top + 1;
    if (lower_ok(top)) good = top, bad = top + 1;
    while (bad - good > 1) {
      long mid = good + (bad - good) / 2;
      if (lower_ok(mid))
        good = mid;
      else
        bad = mid;
    }
    lo = good;
  }
  return {lo, hi};
}

DurrmeyerOperator::DurrmeyerOperator(OperatorParams params, TestFunction f, TruncationPolicy policy)
    : params_(params), f_(std::move(f)), policy_(policy) {
  policy_.validate();
  require_valid(params_, f_);
}

double DurrmeyerOperator::coefficient(long k) const {
  if (k < 0) fail(Errc::domain, "coefficient index must be nonnegative");
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
  }
  double c = compute_coefficient(k);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(k, c).first->second;
}

double DurrmeyerOperator::compute_coefficient(long k) const {
  double a = static_cast<double>(k) + params_.alpha;
  double rate = params_.rate();
  if (f_.is_smooth()) {
    int q = policy_.quad_nodes;
    double mag = 0.0;
    double first = gauss_mean(f_, gauss_laguerre(a, q), rate, &mag);
    auto degree = f_.polynomial_degree();
    if (degree && *degree <= static_cast<unsigned>(2 * q - 1)) return first;
    double second = gauss_mean(f_, gauss_laguerre(a, q + 16), rate, nullptr);
    if (std::fabs(second - first) <= policy_.eps_quad * std::max(mag, 1e-300)) return second;
  }
  return coefficient_adaptive(f_, k, params_, policy_);
}

IndexRange DurrmeyerOperator::truncation_range(double x) const {
  double rate = params_.rate();
  double rho = rate / (rate - f_.growth_A());
  return certified_range(params_.n * x, rho, params_.alpha + 1.0, f_.growth_K(), policy_.eps_tail,
                         policy_.k_max);
}

double DurrmeyerOperator::operator()(double x) const {
  if (!(x >= 0.0) || !std::isfinite(x)) fail(Errc::domain, "operator argument must be a finite x >= 0");
  double mean = params_.n * x;
  if (mean == 0.0) return coefficient(0);
  IndexRange range = truncation_range(x);
  std::vector<double> w = poisson_weights(mean, range.lo, range.hi);
  Neumaier acc;
  for (long k = range.lo; k <= range.hi; ++k) {
    double wk = w[static_cast<std::size_t>(k - range.lo)];
    if (wk == 0.0) continue;
    acc.add(coefficient(k) * wk);
  }
  return acc.value();
}

double coefficient(const TestFunction& f, long k, const OperatorParams& params, const TruncationPolicy& policy) {
  return DurrmeyerOperator(params, f, policy).coefficient(k);
}

double coefficient_adaptive(const TestFunction& f, long k, const OperatorParams& params,
                            const TruncationPolicy& policy) {
  policy.validate();
  require_valid(params, f);
  if (k < 0) fail(Errc::domain, "coefficient index must be nonnegative");
  double shape = static_cast<double>(k) + params.alpha + 1.0;
  double rate = params.rate();
  double A = f.growth_A();
  double K = f.growth_K();
  double mag = 0.0;
  gauss_mean(f, gauss_laguerre(shape - 1.0, policy.quad_nodes), rate, &mag);
  double tol_abs = std::max(policy.eps_quad * 1e-2 * mag, 1e-300);
  double log_tol = std::log(tol_abs);
  double log_K = K > 0.0 ? std::log(K) : -kInf;
  double rho = rate / (rate - A);

  double root = std::sqrt(shape);
  double u_lo = 0.0;
  for (double c = 8.0; c < 200.0; c += 4.0) {
    double cand = shape - c * root - c;
    if (cand <= 0.0) break;
    if (log_K + A * cand / rate + log_reg_lower_gamma(shape, cand) <= log_tol) {
      u_lo = cand;
      break;
    }
  }
  double u_hi = shape;
  for (double c = 8.0;; c += 4.0) {
    u_hi = shape + c * root + c;
    if (log_K + shape * std::log(rho) + log_reg_upper_gamma(shape, u_hi / rho) <= log_tol) break;
    if (c > 1e4) fail(Errc::quadrature_nonconvergence, "cannot bound the coefficient integrand tail");
  }

  std::vector<double> cuts{u_lo, u_hi};
  for (double kink : f.kinks()) {
    double u = kink * rate;
    if (u > u_lo && u < u_hi) cuts.push_back(u);
  }
  if (shape - 1.0 > u_lo && shape - 1.0 < u_hi) cuts.push_back(shape - 1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Integrand g = [&](double u) {
    double d = std::exp(log_gamma_density(u, shape, 1.0));
    return d == 0.0 ? 0.0 : f(u / rate) * d;
  };
  Neumaier acc;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadResult r = cuts[i] == 0.0 ? integrate_endpoint_singular(g, cuts[i], cuts[i + 1], policy.eps_quad)
                                  : integrate_smooth(g, cuts[i], cuts[i + 1], policy.eps_quad);
    acc.add(r.value);
    err += r.error;
  }
  double value = acc.value();
  if (!std::isfinite(value) || err > 1e3 * policy.eps_quad * std::max(mag, std::fabs(value)) + tol_abs * 100.0)
    fail(Errc::quadrature_nonconvergence, "coefficient " + std::to_string(k) + " did not converge");
  return value;
}

double apply_operator(const TestFunction& f, double x, const OperatorParams& params, const TruncationPolicy& policy) {
  return DurrmeyerOperator(params, f, policy)(x);
}

double kernel(double x, double t, const OperatorParams& params, const TruncationPolicy& policy) {
  policy.validate();
  require_valid(params);
  if (!(x >= 0.0) || !(t >= 0.0)) fail(Errc::domain, "kernel requires x >= 0 and t >= 0");
  double rate = params.rate();
  double mean = params.n * x;
  if (mean == 0.0) return std::exp(log_gamma_density(t, params.alpha + 1.0, rate));
  // Every Gamma density with shape >= 1 is bounded by its rate.
  IndexRange range = certified_range(mean, 1.0, 0.0, rate, policy.eps_tail, policy.k_max);
  if (params.alpha < 0.0) range.lo = 0;
  std::vector<double> w = poisson_weights(mean, range.lo, range.hi);
  Neumaier acc;
  for (long k = range.lo; k <= range.hi; ++k) {
    double wk = w[static_cast<std::size_t>(k - range.lo)];
    if (wk == 0.0) continue;
    acc.add(wk * std::exp(log_gamma_density(t, static_cast<double>(k) + params.alpha + 1.0, rate)));
  }
  return acc.value();
}

double apply_szasz(const TestFunction& f, double x, double n, const TruncationPolicy& policy) {
  policy.validate();
  if (!(n > f.growth_A()) || !(n > 0.0))
    fail(Errc::n_not_above_beta_plus_growth, "Szasz operator requires n > A for " + f.describe());
  if (!(x >= 0.0)) fail(Errc::domain, "Szasz operator requires x >= 0");
  double mean = n * x;
  if (mean == 0.0) return f(0.0);
  IndexRange range = certified_range(mean, std::exp(f.growth_A() / n), 0.0, f.growth_K(), policy.eps_tail,
                                     policy.k_max);
  std::vector<double> w = poisson_weights(mean, range.lo, range.hi);
  Neumaier acc;
  for (long k = range.lo; k <= range.hi; ++k) {
    double wk = w[static_cast<std::size_t>(k - range.lo)];
    if (wk != 0.0) acc.add(wk * f(static_cast<double>(k) / n));
  }
  return acc.value();
}

double value_at_zero(const TestFunction& f, const OperatorParams& params, const TruncationPolicy& policy) {
  policy.validate();
  require_valid(params, f);
  double shape = params.alpha + 1.0;
  double rate = params.rate();
  double rho = rate / (rate - f.growth_A());
  double K = f.growth_K();
  Integrand h = [&](double t) {
    double d = std::exp(log_gamma_density(t, shape, rate));
    return d == 0.0 ? 0.0 : f(t) * d;
  };

  // Beyond t_end the envelope K e^{At} leaves negligible mass; kinks there
  // are left to the half-line rule.
  double t_end = (shape + 40.0 * std::sqrt(shape) + 40.0) / rate;
  for (int i = 0; i < 64 && K > 0.0; ++i) {
    double tail = std::log(K) + shape * std::log(rho) + log_reg_upper_gamma(shape, t_end * rate / rho);
    if (tail < std::log(policy.eps_quad * 1e-6)) break;
    t_end *= 1.5;
  }
  std::vector<double> cuts{0.0};
  for (double kink : f.kinks())
    if (kink > 0.0 && kink < t_end) cuts.push_back(kink);
  if (cuts.size() == 1) cuts.push_back(shape / rate);

  Neumaier acc;
  acc.add(integrate_endpoint_singular(h, cuts[0], cuts[1], policy.eps_quad).value);
  for (std::size_t i = 1; i + 1 < cuts.size(); ++i)
    acc.add(integrate_smooth(h, cuts[i], cuts[i + 1], policy.eps_quad).value);
  acc.add(integrate_to_infinity(h, cuts.back(), policy.eps_quad).value);
  double value = acc.value();
  if (!std::isfinite(value)) fail(Errc::quadrature_nonconvergence, "value_at_zero integral did not converge");
  return value;
}

double growth_bound(const OperatorParams& params, const TestFunction& f, double x) {
  require_valid(params, f);
  double rate = params.rate();
  double A = f.growth_A();
  return f.growth_K() * std::pow(rate / (rate - A), params.alpha + 1.0) * std::exp(params.n * x * A / (rate - A));
}

double apply_mazhar_totik(const TestFunction& f, double x, double n) {
  double lambda = n * x;
  long top = static_cast<long>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 30.0));
  double total = 0.0;
  for (long k = 0; k <= top; ++k) {
    double kk = static_cast<double>(k);
    double lgk = std::lgamma(kk + 1.0);
    double weight = lambda == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::exp(kk * std::log(lambda) - lambda - lgk);
    if (weight < 1e-300) continue;
    Integrand g = [&](double t) {
      if (t == 0.0) return k == 0 ? n * f(0.0) : 0.0;
      return n * std::exp(kk * std::log(n * t) - n * t - lgk) * f(t);
    };
    double peak = std::max(kk, 1.0) / n;
    double integral = integrate_endpoint_singular(g, 0.0, peak, 1e-15).value + integrate_to_infinity(g, peak, 1e-15).value;
    total += weight * integral;
  }
  return total;
}

}  // namespace smld
