#include "smld/moments.hpp"

#include <algorithm>
#include <cmath>

#include "smld/error.hpp"

namespace smld {

namespace {

double rel_diff(double u, double v) {
  double scale = std::max({std::fabs(u), std::fabs(v), 1e-300});
  return std::fabs(u - v) / scale;
}

double binomial(unsigned r, unsigned j) {
  double c = 1.0;
  for (unsigned i = 1; i <= j; ++i) c = c * (r - j + i) / i;
  return std::round(c);
}

}  // namespace

double raw_moment_closed(unsigned r, double x, const OperatorParams& params, const AccuracyPolicy& accuracy) {
  require_valid(params);
  if (!(x >= 0.0)) fail(Errc::domain, "moments require x >= 0");
  if (r == 0) return 1.0;
  double a = params.alpha + 1.0;
  double m = params.rate();
  double scale = 1.0;
  for (unsigned i = 0; i < r; ++i) scale *= (a + i) / m;
  return scale * kummer_scaled(params.alpha + r + 1.0, a, params.n * x, accuracy);
}

double raw_moment_recurrence(unsigned r, double x, const OperatorParams& params) {
  require_valid(params);
  if (!(x >= 0.0)) fail(Errc::domain, "moments require x >= 0");
  double m = params.rate();
  double z = params.n * x;
  double prev = 1.0;
  double cur = (params.alpha + 1.0 + z) / m;
  if (r == 0) return prev;
  for (unsigned k = 1; k < r; ++k) {
    double next = ((params.alpha + 2.0 * k + 1.0 + z) * cur - k * (params.alpha + k) * prev / m) / m;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<DoubleDouble> raw_moments_extended(unsigned r_max, double x, const OperatorParams& params) {
  require_valid(params);
  if (!(x >= 0.0)) fail(Errc::domain, "moments require x >= 0");
  DoubleDouble z = two_prod(params.n, x);
  DoubleDouble m = two_sum(params.n, -params.beta);
  DoubleDouble alpha(params.alpha);
  std::vector<DoubleDouble> mu;
  mu.reserve(r_max + 1);
  mu.emplace_back(1.0);
  if (r_max == 0) return mu;
  mu.push_back((alpha + DoubleDouble(1.0) + z) / m);
  for (unsigned k = 1; k < r_max; ++k) {
    DoubleDouble lead = (alpha + DoubleDouble(2.0 * k + 1.0) + z) * mu[k];
    DoubleDouble lower = DoubleDouble(static_cast<double>(k)) * (alpha + DoubleDouble(static_cast<double>(k))) *
                         mu[k - 1] / m;
    mu.push_back((lead - lower) / m);
  }
  return mu;
}

double raw_moment_explicit(unsigned r, double x, const OperatorParams& params) {
  require_valid(params);
  double al = params.alpha;
  double m = params.rate();
  double z = params.n * x;
  switch (r) {
    case 1: return (al + 1.0 + z) / m;
    case 2: return (z * z + (2.0 * al + 4.0) * z + (al + 1.0) * (al + 2.0)) / (m * m);
    case 3:
      return (z * z * z + 3.0 * (al + 3.0) * z * z + 3.0 * (al + 2.0) * (al + 3.0) * z +
              (al + 1.0) * (al + 2.0) * (al + 3.0)) /
             (m * m * m);
    case 4:
      return (z * z * z * z + 4.0 * (al + 4.0) * z * z * z + 6.0 * (al + 3.0) * (al + 4.0) * z * z +
              4.0 * (al + 2.0) * (al + 3.0) * (al + 4.0) * z + (al + 1.0) * (al + 2.0) * (al + 3.0) * (al + 4.0)) /
             (m * m * m * m);
    default: fail(Errc::unsupported_order, "explicit raw moments exist for r = 1..4 only");
  }
}

double raw_moment_quadrature(unsigned r, double x, const OperatorParams& params, const TruncationPolicy& policy) {
  return apply_operator(TestFunction::monomial(r), x, params, policy);
}

double recurrence_residual(unsigned r, double x, const OperatorParams& params) {
  if (r == 0) fail(Errc::unsupported_order, "recurrence residual needs r >= 1");
  double m = params.rate();
  double z = params.n * x;
  double lower = r * (params.alpha + r) * raw_moment_closed(r - 1, x, params);
  double middle = m * (params.alpha + 2.0 * r + 1.0 + z) * raw_moment_closed(r, x, params);
  double upper = m * m * raw_moment_closed(r + 1, x, params);
  double scale = std::max({std::fabs(lower), std::fabs(middle), std::fabs(upper)});
  return std::fabs(upper - middle + lower) / scale;
}

double diff_recurrence_residual(unsigned r, double x, const OperatorParams& params, double h) {
  if (r == 0) fail(Errc::unsupported_order, "differential recurrence needs r >= 1");
  if (!(h > 0.0) || !(x - h > 0.0)) fail(Errc::domain, "differential recurrence needs h > 0 and x - h > 0");
  double up = raw_moments_extended(r, x + h, params)[r].value();
  double down = raw_moments_extended(r, x - h, params)[r].value();
  OperatorParams shifted = params;
  shifted.alpha += 1.0;
  double rhs = params.n * r / params.rate() * raw_moments_extended(r - 1, x, shifted)[r - 1].value();
  return std::fabs((up - down) / (2.0 * h) - rhs);
}

MomentReport moment_report(unsigned r, double x, const OperatorParams& params, const TruncationPolicy& policy) {
  MomentReport rep;
  rep.r = r;
  rep.x = x;
  rep.value_closed = raw_moment_closed(r, x, params);
  rep.value_recurrence = raw_moment_recurrence(r, x, params);
  if (r >= 1 && r <= 4) rep.value_explicit = raw_moment_explicit(r, x, params);
  rep.value_quadrature = raw_moment_quadrature(r, x, params, policy);
  std::vector<double> values{rep.value_closed, rep.value_recurrence, rep.value_quadrature};
  if (rep.value_explicit) values.push_back(*rep.value_explicit);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      rep.max_cross_residual = std::max(rep.max_cross_residual, rel_diff(values[i], values[j]));
  return rep;
}

// Written through the cumulants ((j-1)! a + j! nx) / (n-beta)^j of the
// Poisson-Gamma mixture, with d = alpha + 1 + beta x the mean offset.
double central_moment_explicit(unsigned r, double x, const OperatorParams& params) {
  require_valid(params);
  double a = params.alpha + 1.0;
  double m = params.rate();
  double z = params.n * x;
  double d = a + params.beta * x;
  double k2 = a + 2.0 * z;
  double k3 = 2.0 * a + 6.0 * z;
  double k4 = 6.0 * a + 24.0 * z;
  switch (r) {
    case 1: return d / m;
    case 2:
      return (a * (a + 1.0) + 2.0 * x * (params.n + params.beta * a) + params.beta * params.beta * x * x) / (m * m);
    case 3: return (k3 + 3.0 * d * k2 + d * d * d) / (m * m * m);
    case 4: return (k4 + 3.0 * k2 * k2 + 4.0 * d * k3 + 6.0 * d * d * k2 + d * d * d * d) / (m * m * m * m);
    default: fail(Errc::unsupported_order, "explicit central moments exist for r = 1..4 only");
  }
}

CentralMoment central_moment_binomial(unsigned r, double x, const OperatorParams& params) {
  if (!(x >= 0.0)) fail(Errc::domain, "moments require x >= 0");
  std::vector<DoubleDouble> mu = raw_moments_extended(r, x, params);
  DoubleDouble total(0.0);
  double magnitude = 0.0;
  for (unsigned j = 0; j <= r; ++j) {
    DoubleDouble power(1.0);
    for (unsigned i = 0; i < r - j; ++i) power *= DoubleDouble(-x);
    DoubleDouble term = DoubleDouble(binomial(r, j)) * power * mu[j];
    total += term;
    magnitude += std::fabs(term.value());
  }
  CentralMoment out;
  out.value = total.value();
  // Each double-double operation carries ~2^-104 relative error.
  double eps_dd = std::ldexp(1.0, -104) * (4.0 * r + 8.0);
  out.rel_error_estimate =
      out.value == 0.0 ? (magnitude == 0.0 ? 0.0 : 1.0) : magnitude * eps_dd / std::fabs(out.value) + 0x1p-53;
  out.warning = out.rel_error_estimate > 1e-6;
  return out;
}

double central_moment(unsigned r, double x, const OperatorParams& params) {
  if (r == 0) return 1.0;
  if (r <= 4) return central_moment_explicit(r, x, params);
  return central_moment_binomial(r, x, params).value;
}

double central_moment_quadrature(unsigned r, double x, const OperatorParams& params, const TruncationPolicy& policy) {
  std::vector<double> coeffs(r + 1, 0.0);
  coeffs[r] = 1.0;
  return apply_operator(TestFunction::polynomial(std::move(coeffs), x), x, params, policy);
}

double asymptotic_prediction(unsigned r, double x, const OperatorParams& params) {
  if (r == 0) fail(Errc::unsupported_order, "asymptotic prediction needs r >= 1");
  if (r == 1) return (params.alpha + 1.0 + params.beta * x) / params.n;
  return r * (r - 1.0) * std::pow(params.beta, r - 2.0) * std::pow(x, r - 1.0) / std::pow(params.n, r - 1.0);
}

AsymptoticCase asymptotic_case(unsigned r, double x, const OperatorParams& params) {
  require_valid(params);
  AsymptoticCase c;
  c.r = r;
  c.x = x;
  c.params = params;
  c.predicted_leading = asymptotic_prediction(r, x, params);
  c.A = params.n / params.rate();
  c.z = params.n * x;
  c.delta = params.beta / params.rate();
  return c;
}

std::vector<AsymptoticRow> asymptotic_ratio_table(unsigned r, double x, const OperatorParams& params_template,
                                                  const std::vector<double>& n_grid) {
  if (r == 0) fail(Errc::unsupported_order, "asymptotic table needs r >= 1");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] > params_template.beta)) fail(Errc::n_not_above_beta, "every n in the grid must exceed beta");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) fail(Errc::domain, "n grid must be ascending");
  }
  std::vector<AsymptoticRow> rows;
  for (double n : n_grid) {
    OperatorParams p = params_template;
    p.n = n;
    require_valid(p);
    double A = n / p.rate();
    double al = p.alpha;
    AsymptoticRow row;
    row.n = n;
    row.exact = central_moment(r, x, p);
    row.predicted = asymptotic_prediction(r, x, p);
    row.S0 = std::pow(A - 1.0, static_cast<double>(r));
    row.S1 = r == 1 ? A * (al + 1.0)
                    : r * A * std::pow(A - 1.0, r - 2.0) * ((al + r) * A - (al + 1.0));
    row.two_term = std::pow(x, static_cast<double>(r)) * row.S0 + std::pow(x, r - 1.0) * row.S1 / n;
    row.zero_prediction = row.predicted == 0.0;
    if (!row.zero_prediction) row.ratio = row.exact / row.predicted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace smld
