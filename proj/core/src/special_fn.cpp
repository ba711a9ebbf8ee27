#include "smld/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smld/error.hpp"

namespace smld {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGammaMaxIter = 100000;
constexpr double kTiny = 1e-300;

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

// P(s,z) by the power series, z < s + 1.
double lower_series(double s, double z, double& log_value) {
  double term = 1.0;
  Neumaier acc;
  acc.add(1.0);
  for (int k = 1; k < kGammaMaxIter; ++k) {
    term *= z / (s + k);
    acc.add(term);
    if (term < acc.value() * 1e-17) {
      log_value = log_poisson_density(s, z) + std::log(acc.value());
      return std::exp(log_value);
    }
  }
  fail(Errc::series_nonconvergence, "incomplete gamma series did not converge");
}

// Q(s,z) by the modified Lentz continued fraction, z >= s + 1.
double upper_fraction(double s, double z, double& log_value) {
  double b = z + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) {
      log_value = std::log(s) + log_poisson_density(s, z) + std::log(h);
      return std::exp(log_value);
    }
  }
  fail(Errc::series_nonconvergence, "incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double s, double z) {
  if (!(s > 0.0)) fail(Errc::domain, "incomplete gamma requires s > 0");
  if (!(z >= 0.0)) fail(Errc::domain, "incomplete gamma requires z >= 0");
}

bool is_nonpositive_integer(double a) { return a <= 0.0 && a == std::floor(a); }

double kummer_series(double a, double b, double z, const AccuracyPolicy& policy, bool& ok) {
  constexpr double kRescale = 0x1p-800;
  constexpr double kLogRescale = 800.0 * 0.69314718055994530942;
  Neumaier acc;
  acc.add(1.0);
  double term = 1.0;
  double log_scale = 0.0;
  ok = false;
  for (int k = 0; k < policy.max_terms; ++k) {
    double ratio = (a + k) / (b + k) * z / (k + 1.0);
    term *= ratio;
    acc.add(term);
    double s = acc.value();
    if (std::fabs(s) > 1e250) {
      term *= kRescale;
      acc.sum *= kRescale;
      acc.comp *= kRescale;
      log_scale += kLogRescale;
    }
    if (term == 0.0 || (std::fabs(ratio) < 1.0 && std::fabs(term) <= policy.series_rel_tol * std::fabs(s))) {
      ok = true;
      break;
    }
  }
  if (!ok) return 0.0;
  double s = acc.value();
  if (log_scale == 0.0) return s * std::exp(-z);
  return std::copysign(std::exp(std::log(std::fabs(s)) + log_scale - z), s);
}

double kummer_asymptotic(double a, double b, double z, const AccuracyPolicy& policy, bool& ok) {
  ok = false;
  Neumaier acc;
  acc.add(1.0);
  double term = 1.0;
  double prev = 1.0;
  for (int k = 0; k < policy.max_terms; ++k) {
    term *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z);
    if (term == 0.0) {
      ok = true;
      break;
    }
    if (std::fabs(term) > std::fabs(prev)) break;
    acc.add(term);
    prev = term;
    if (std::fabs(term) <= policy.series_rel_tol * std::fabs(acc.value())) {
      ok = true;
      break;
    }
  }
  if (!ok) return 0.0;

  double shift = a - b;
  double prefactor;
  if (shift >= 0.0 && shift == std::floor(shift) && shift <= 1000.0) {
    prefactor = 1.0;
    for (int i = 0; i < static_cast<int>(shift); ++i) prefactor *= z / (b + i);
  } else {
    int sign_a = 1;
    int sign_b = 1;
    double lga = lgamma_r(a, &sign_a);
    double lgb = lgamma_r(b, &sign_b);
    prefactor = sign_a * sign_b * std::exp(lgb - lga + shift * std::log(z));
  }
  return prefactor * acc.value();
}

}  // namespace

void AccuracyPolicy::validate() const {
  if (!(series_rel_tol > 0.0 && series_rel_tol < 1e-6))
    fail(Errc::invalid_policy, "series_rel_tol must lie in (0, 1e-6)");
  if (max_terms < 64) fail(Errc::invalid_policy, "max_terms must be at least 64");
  if (switchover_z && !(*switchover_z > 0.0))
    fail(Errc::invalid_policy, "switchover_z must be positive");
}

double log_gamma(double s) {
  if (!(s > 0.0)) fail(Errc::domain, "log_gamma requires s > 0");
  int sign = 1;
  return lgamma_r(s, &sign);
}

double pochhammer(double a, unsigned r) {
  double p = 1.0;
  for (unsigned i = 0; i < r; ++i) p *= a + i;
  return p;
}

double reg_lower_gamma(double s, double z) {
  check_gamma_args(s, z);
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  double log_value;
  double p = z < s + 1.0 ? lower_series(s, z, log_value) : 1.0 - upper_fraction(s, z, log_value);
  return std::clamp(p, 0.0, 1.0);
}

double reg_upper_gamma(double s, double z) {
  check_gamma_args(s, z);
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  double log_value;
  double q = z < s + 1.0 ? 1.0 - lower_series(s, z, log_value) : upper_fraction(s, z, log_value);
  return std::clamp(q, 0.0, 1.0);
}

double log_reg_lower_gamma(double s, double z) {
  check_gamma_args(s, z);
  if (z == 0.0) return -kInf;
  if (std::isinf(z)) return 0.0;
  double log_value;
  if (z < s + 1.0) {
    lower_series(s, z, log_value);
    return std::min(log_value, 0.0);
  }
  double q = upper_fraction(s, z, log_value);
  return std::log1p(-q);
}

double log_reg_upper_gamma(double s, double z) {
  check_gamma_args(s, z);
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return -kInf;
  double log_value;
  if (z >= s + 1.0) {
    upper_fraction(s, z, log_value);
    return std::min(log_value, 0.0);
  }
  double p = lower_series(s, z, log_value);
  return std::log1p(-p);
}

double kummer_scaled(double a, double b, double z, const AccuracyPolicy& policy) {
  policy.validate();
  if (!(b > 0.0)) fail(Errc::domain, "kummer_scaled requires b > 0");
  if (!(z >= 0.0)) fail(Errc::domain, "kummer_scaled requires z >= 0");
  if (z == 0.0) return 1.0;
  if (a == b) return 1.0;

  if (is_nonpositive_integer(a)) {
    Neumaier acc;
    acc.add(1.0);
    double term = 1.0;
    for (int k = 0; k < static_cast<int>(-a); ++k) {
      term *= (a + k) / (b + k) * z / (k + 1.0);
      acc.add(term);
    }
    return acc.value() * std::exp(-z);
  }

  double boundary = policy.switchover_z.value_or(40.0 + std::fabs(a) + std::fabs(b));
  bool ok = false;
  double value;
  if (z > boundary) {
    value = kummer_asymptotic(a, b, z, policy, ok);
    if (!ok) value = kummer_series(a, b, z, policy, ok);
  } else {
    value = kummer_series(a, b, z, policy, ok);
    if (!ok) value = kummer_asymptotic(a, b, z, policy, ok);
  }
  if (!ok)
    fail(Errc::series_nonconvergence,
         "kummer_scaled did not reach tolerance within " + std::to_string(policy.max_terms) + " terms");
  return value;
}

double stirling_error(double k) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (k <= 15.0) {
    if (k == 0.0) return 0.0;
    long double kl = k;
    int sign = 1;
    long double v = lgammal_r(kl + 1.0L, &sign) - (kl + 0.5L) * std::log(kl) + kl -
                    0.918938533204672741780329736406L;
    return static_cast<double>(v);
  }
  double k2 = 1.0 / (k * k);
  if (k > 500.0) return (S0 - S1 * k2) / k;
  if (k > 80.0) return (S0 - (S1 - S2 * k2) * k2) / k;
  if (k > 35.0) return (S0 - (S1 - (S2 - S3 * k2) * k2) * k2) / k;
  return (S0 - (S1 - (S2 - (S3 - S4 * k2) * k2) * k2) * k2) / k;
}

double deviance_term(double k, double mean) {
  if (k == 0.0) return mean;
  if (std::fabs(k - mean) < 0.1 * (k + mean)) {
    double v = (k - mean) / (k + mean);
    double s = (k - mean) * v;
    double ej = 2.0 * k * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v * v;
      double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return k * std::log(k / mean) + mean - k;
}

double log_poisson_density(double k, double mean) {
  if (!(k > -1.0)) fail(Errc::domain, "log_poisson_density requires k > -1");
  if (mean == 0.0) {
    if (k == 0.0) return 0.0;
    return k > 0.0 ? -kInf : kInf;
  }
  if (k == 0.0) return -mean;
  if (k < 0.0) {
    int sign = 1;
    return k * std::log(mean) - mean - lgamma_r(k + 1.0, &sign);
  }
  return -stirling_error(k) - deviance_term(k, mean) - kLogSqrt2Pi - 0.5 * std::log(k);
}

double log_gamma_density(double t, double shape, double rate) {
  if (t < 0.0) return -kInf;
  return std::log(rate) + log_poisson_density(shape - 1.0, rate * t);
}

double poisson_weight_log(double n, double x, long k) {
  if (k < 0) return -kInf;
  return log_poisson_density(static_cast<double>(k), n * x);
}

double poisson_tail(double n, double x, long K) {
  double mean = n * x;
  if (K < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  return std::clamp(reg_lower_gamma(static_cast<double>(K) + 1.0, mean), 0.0, 1.0);
}

std::vector<double> poisson_weights(double mean, long k_lo, long k_hi) {
  std::vector<double> w;
  if (k_hi < k_lo) return w;
  w.assign(static_cast<std::size_t>(k_hi - k_lo + 1), 0.0);
  if (mean == 0.0) {
    if (k_lo <= 0 && 0 <= k_hi) w[static_cast<std::size_t>(-k_lo)] = 1.0;
    return w;
  }
  constexpr long kReanchor = 64;
  auto exact = [&](long k) { return std::exp(log_poisson_density(static_cast<double>(k), mean)); };
  long mode = std::clamp(static_cast<long>(std::floor(mean)), k_lo, k_hi);
  w[static_cast<std::size_t>(mode - k_lo)] = exact(mode);
  for (long k = mode + 1; k <= k_hi; ++k) {
    auto i = static_cast<std::size_t>(k - k_lo);
    w[i] = (k - mode) % kReanchor == 0 ? exact(k) : w[i - 1] * mean / static_cast<double>(k);
  }
  for (long k = mode - 1; k >= k_lo; --k) {
    auto i = static_cast<std::size_t>(k - k_lo);
    w[i] = (mode - k) % kReanchor == 0 ? exact(k) : w[i + 1] * static_cast<double>(k + 1) / mean;
  }
  return w;
}

}  // namespace smld
