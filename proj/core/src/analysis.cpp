#include "smld/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "smld/error.hpp"
#include "smld/format.hpp"
#include "smld/quadrature.hpp"
#include "smld/special_fn.hpp"

namespace smld {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;

// Maximizes h on [lo, hi]; returns {argmax, value}.
std::pair<double, double> golden_max(const RealFunction& h, double lo, double hi, int iterations = 60) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = h(c);
  double fd = h(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::fabs(a)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = h(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

std::vector<double> breakpoints(double lo, double hi, int panels, const std::vector<double>& kinks) {
  std::vector<double> pts;
  for (int i = 0; i <= panels; ++i) pts.push_back(lo + (hi - lo) * i / panels);
  for (double k : kinks)
    if (k > lo && k < hi) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double lp_integral(const RealFunction& diff, double p, double gamma, double lo, double hi, int panels,
                   const std::vector<double>& kinks) {
  std::vector<double> pts = breakpoints(lo, hi, panels, kinks);
  Integrand g = [&](double x) {
    double v = std::pow(std::fabs(diff(x)), p);
    return gamma == 0.0 ? v : v * std::exp(gamma * x);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += gauss_legendre_panel(g, pts[i], pts[i + 1]);
  return std::pow(total, 1.0 / p);
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(Errc::analysis_precondition, "p must lie in [1, inf)");
}

}  // namespace

void NormSpec::validate() const {
  if (!(extent > 0.0) || !std::isfinite(extent)) fail(Errc::analysis_precondition, "norm extent must be positive");
  check_p(p);
  if (!(gamma >= 0.0)) fail(Errc::analysis_precondition, "gamma must be nonnegative");
  if (grid_points < 3) fail(Errc::analysis_precondition, "grid_points must be at least 3");
}

std::string NormSpec::describe() const {
  switch (kind) {
    case Kind::sup_compact: return "sup_compact(a=" + format_number(extent) + ")";
    case Kind::weighted_phi: return "weighted_phi(X_max=" + format_number(extent) + ")";
    case Kind::lp: return "lp(p=" + format_number(p) + ",R=" + format_number(extent) + ")";
    case Kind::weighted_lp:
      return "weighted_lp(p=" + format_number(p) + ",gamma=" + format_number(gamma) +
             ",R_max=" + format_number(extent) + ")";
  }
  return "unknown";
}

SupResult sup_abs(const RealFunction& g, double lo, double hi, int grid_points,
                  const std::vector<double>& extra_points) {
  if (grid_points < 2 || !(hi >= lo)) fail(Errc::analysis_precondition, "sup needs a nonempty grid");
  double h = (hi - lo) / (grid_points - 1);
  SupResult best{-1.0, lo};
  int best_i = 0;
  for (int i = 0; i < grid_points; ++i) {
    double x = i + 1 == grid_points ? hi : lo + h * i;
    double v = std::fabs(g(x));
    if (v > best.value) best = {v, x}, best_i = i;
  }
  for (double x : extra_points) {
    if (x < lo || x > hi) continue;
    double v = std::fabs(g(x));
    if (v > best.value) best = {v, x}, best_i = -1;
  }
  if (best_i >= 0 && h > 0.0) {
    double a = std::max(lo, best.argmax - h);
    double b = std::min(hi, best.argmax + h);
    auto [x, v] = golden_max([&](double t) { return std::fabs(g(t)); }, a, b);
    if (v > best.value) best = {v, x};
  }
  return best;
}

double modulus_of_continuity(const RealFunction& f, double delta, double a, int grid_points) {
  if (!(a > 0.0)) fail(Errc::analysis_precondition, "modulus of continuity needs a > 0");
  if (!(delta > 0.0 && delta <= a)) fail(Errc::analysis_precondition, "delta must lie in (0, a]");
  if (grid_points < 3) fail(Errc::analysis_precondition, "grid_points must be at least 3");
  const int N = grid_points;
  double h = a / (N - 1);
  std::vector<double> xs(N);
  std::vector<double> fs(N);
  for (int i = 0; i < N; ++i) {
    xs[i] = i + 1 == N ? a : h * i;
    fs[i] = f(xs[i]);
  }
  // Grid pairs within distance delta: sliding-window max minus min.
  long w = static_cast<long>(std::floor(delta / h + 1e-9));
  std::deque<int> mx;
  std::deque<int> mn;
  double best = 0.0;
  for (int j = 0; j < N; ++j) {
    while (!mx.empty() && fs[mx.back()] <= fs[j]) mx.pop_back();
    while (!mn.empty() && fs[mn.back()] >= fs[j]) mn.pop_back();
    mx.push_back(j);
    mn.push_back(j);
    while (mx.front() < j - w) mx.pop_front();
    while (mn.front() < j - w) mn.pop_front();
    best = std::max(best, fs[mx.front()] - fs[mn.front()]);
  }
  // Pairs exactly delta apart, refined around the best grid start.
  RealFunction gap = [&](double x) { return std::fabs(f(std::min(x + delta, a)) - f(x)); };
  double top = a - delta;
  int best_i = 0;
  double best_gap = -1.0;
  for (int i = 0; i < N && xs[i] <= top; ++i) {
    double v = gap(xs[i]);
    if (v > best_gap) best_gap = v, best_i = i;
  }
  best = std::max(best, best_gap);
  if (best_gap >= 0.0 && top > 0.0) {
    double lo = std::max(0.0, xs[best_i] - h);
    double hi = std::min(top, xs[best_i] + h);
    if (hi > lo) best = std::max(best, golden_max(gap, lo, hi).second);
  }
  return best;
}

ConvergenceReport compact_estimate_check(const TestFunction& f, const OperatorParams& params_template,
                                         const std::vector<double>& n_grid, double a, const TruncationPolicy& policy,
                                         int grid_points) {
  ConvergenceReport rep;
  rep.function = f.describe();
  rep.norm = {NormSpec::Kind::sup_compact, a, 1.0, 0.0, grid_points};
  rep.norm.validate();
  std::vector<double> kinks = f.kinks();
  for (double n : n_grid) {
    OperatorParams p = params_template;
    p.n = n;
    DurrmeyerOperator op(p, f, policy);
    ConvergenceRow row;
    row.n = n;
    row.error = sup_abs([&](double x) { return op(x) - f(x); }, 0.0, a, grid_points, kinks).value;
    double delta = std::min(1.0 / std::sqrt(n), a);
    double omega = modulus_of_continuity([&](double t) { return f(t); }, delta, a, grid_points);
    row.reference = omega;
    if (omega > 0.0) {
      row.ratio = row.error / omega;
      rep.bound_constant = std::max(rep.bound_constant.value_or(0.0), *row.ratio);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

double weighted_phi_norm(const RealFunction& g, double x_max, int grid_points) {
  if (!(x_max > 0.0)) fail(Errc::analysis_precondition, "X_max must be positive");
  return sup_abs([&](double x) { return g(x) / (1.0 + x * x); }, 0.0, x_max, grid_points).value;
}

double weighted_rational_sup(double c2, double c1, double c0) {
  auto R = [&](double x) { return std::fabs((c2 * x * x + c1 * x + c0) / (1.0 + x * x)); };
  double best = std::max(R(0.0), std::fabs(c2));
  // Stationary points solve c1 x^2 - 2 (c2 - c0) x - c1 = 0.
  if (c1 != 0.0) {
    double b = -2.0 * (c2 - c0);
    double disc = std::sqrt(b * b + 4.0 * c1 * c1);
    double q = -0.5 * (b + std::copysign(disc, b));
    for (double x : {q / c1, -c1 / q})
      if (std::isfinite(x) && x >= 0.0) best = std::max(best, R(x));
  }
  return best;
}

KorovkinValues korovkin_weighted_check(const OperatorParams& params) {
  require_valid(params);
  double n = params.n;
  double b = params.beta;
  double m = params.rate();
  double a = params.alpha + 1.0;
  KorovkinValues out;
  out.e0 = 0.0;
  // M t - x = (beta x + alpha + 1) / (n - beta)
  out.e1 = weighted_rational_sup(0.0, b / m, a / m);
  // M t^2 - x^2 = (beta (2n - beta) x^2 + 2 (alpha + 2) n x + (alpha+1)(alpha+2)) / (n - beta)^2
  out.e2 = weighted_rational_sup(b * (2.0 * n - b) / (m * m), 2.0 * (a + 1.0) * n / (m * m), a * (a + 1.0) / (m * m));
  return out;
}

double lp_error(const TestFunction& f, const OperatorParams& params, double p, double R,
                const TruncationPolicy& policy, int panels) {
  check_p(p);
  if (!(R > 0.0)) fail(Errc::analysis_precondition, "R must be positive");
  DurrmeyerOperator op(params, f, policy);
  return lp_integral([&](double x) { return op(x) - f(x); }, p, 0.0, 0.0, R, panels, f.kinks());
}

WeightedLp weighted_lp_error(const TestFunction& f, const OperatorParams& params, double p, double gamma,
                             double R_max, const TruncationPolicy& policy, int panels) {
  check_p(p);
  if (!(gamma >= 0.0)) fail(Errc::analysis_precondition, "gamma must be nonnegative");
  if (!(R_max > 0.0)) fail(Errc::analysis_precondition, "R_max must be positive");
  DurrmeyerOperator op(params, f, policy);
  WeightedLp out;
  out.value = lp_integral([&](double x) { return op(x) - f(x); }, p, gamma, 0.0, R_max, panels, f.kinks());
  out.hypothesis_holds = gamma <= p * params.beta;
  return out;
}

SchurValue schur_E(const OperatorParams& params, double t) {
  require_valid(params);
  if (!(t >= 0.0)) fail(Errc::domain, "schur_E requires t >= 0");
  double al = params.alpha;
  double m = params.rate();
  SchurValue out;
  out.lemma_applies = al >= -0.5 && al <= 0.0 && params.beta >= 0.0;
  if (t == 0.0) {
    double order = 2.0 * al + 1.0;
    if (order > 0.0)
      out.value = 0.0;
    else if (order == 0.0)
      out.value = std::pow(m, 2.0 * al + 2.0) / std::tgamma(al + 2.0) / params.n;
    else
      out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = std::exp((al + 1.0) * std::log(m) + al * std::log(t)) * reg_lower_gamma(al + 1.0, m * t) / params.n;
  return out;
}

double schur_first_integral(const OperatorParams& params, double gamma, double p, double x) {
  require_valid(params);
  check_p(p);
  if (!(gamma >= 0.0)) fail(Errc::analysis_precondition, "gamma must be nonnegative");
  if (!(gamma < params.n * p)) fail(Errc::analysis_precondition, "first Schur integral requires gamma < n p");
  double m = params.rate();
  double g = gamma / p;
  return std::pow(m / (m + g), params.alpha + 1.0) * std::exp(x * g * (g - params.beta) / (m + g));
}

SchurSecond schur_second_integral(const OperatorParams& params, double gamma, double p, double t,
                                  const TruncationPolicy& policy) {
  require_valid(params);
  check_p(p);
  if (!(gamma >= 0.0)) fail(Errc::analysis_precondition, "gamma must be nonnegative");
  if (!(gamma < params.n * p)) fail(Errc::analysis_precondition, "second Schur integral requires gamma < n p");
  if (!(t > 0.0)) fail(Errc::analysis_precondition, "second Schur integral is evaluated for t > 0");
  SchurSecond out;
  double c = 1.0 - gamma / (params.n * p);
  out.bound = schur_E(params, t / c).value / c;

  double m = params.rate();
  double n = params.n;
  Integrand g = [&](double x) { return std::exp(gamma * x / p) * kernel(x, t, params, policy); };
  double mt = m * t;
  double peak = std::max(mt / n, 1.0 / n);
  double x_end = (2.0 * mt + 40.0 * std::sqrt(mt + 1.0) + 60.0) / n;
  double scale = std::max(g(peak), 1e-300);
  for (int i = 0; i < 60 && g(x_end) > 1e-20 * scale; ++i) x_end *= 1.5;
  double total = integrate_smooth(g, 0.0, std::min(peak, x_end), 1e-12).value +
                 integrate_smooth(g, std::min(peak, x_end), x_end, 1e-12).value;
  out.direct = total;
  return out;
}

SlopeFit rate_slope(const std::vector<double>& n, const std::vector<double>& errors) {
  if (n.size() != errors.size()) fail(Errc::degenerate_data, "n and error columns differ in length");
  SlopeFit fit;
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      ++fit.excluded_zero;
      continue;
    }
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(errors[i]));
  }
  fit.used = static_cast<int>(lx.size());
  if (fit.used < 3) fail(Errc::degenerate_data, "rate slope needs at least three positive errors");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= fit.used;
  my /= fit.used;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) fail(Errc::degenerate_data, "rate slope needs at least two distinct n");
  fit.slope = sxy / sxx;
  return fit;
}

double rate_slope(const ConvergenceReport& report) {
  std::vector<double> n;
  std::vector<double> e;
  for (const auto& row : report.rows) n.push_back(row.n), e.push_back(row.error);
  return rate_slope(n, e).slope;
}

ConvergenceReport convergence_study(const TestFunction& f, const OperatorParams& params_template,
                                    const std::vector<double>& n_grid, const NormSpec& norm,
                                    const TruncationPolicy& policy) {
  norm.validate();
  ConvergenceReport rep;
  if (norm.kind == NormSpec::Kind::sup_compact) {
    rep = compact_estimate_check(f, params_template, n_grid, norm.extent, policy, norm.grid_points);
  } else {
    rep.function = f.describe();
    rep.norm = norm;
    for (double n : n_grid) {
      OperatorParams p = params_template;
      p.n = n;
      ConvergenceRow row;
      row.n = n;
      switch (norm.kind) {
        case NormSpec::Kind::weighted_phi: {
          DurrmeyerOperator op(p, f, policy);
          row.error = weighted_phi_norm([&](double x) { return op(x) - f(x); }, norm.extent, norm.grid_points);
          break;
        }
        case NormSpec::Kind::lp: row.error = lp_error(f, p, norm.p, norm.extent, policy); break;
        case NormSpec::Kind::weighted_lp: {
          WeightedLp w = weighted_lp_error(f, p, norm.p, norm.gamma, norm.extent, policy);
          row.error = w.value;
          rep.hypothesis_holds = rep.hypothesis_holds && w.hypothesis_holds;
          break;
        }
        default: break;
      }
      rep.rows.push_back(row);
    }
  }
  int positive = 0;
  for (const auto& row : rep.rows) positive += row.error > 0.0 ? 1 : 0;
  if (positive >= 3) rep.fitted_slope = rate_slope(rep);
  return rep;
}

}  // namespace smld
