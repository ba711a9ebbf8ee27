#include "smld/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "smld/analysis.hpp"
#include "smld/error.hpp"
#include "smld/format.hpp"
#include "smld/moments.hpp"
#include "smld/operator.hpp"
#include "smld/spectral.hpp"

namespace smld {

namespace {

const std::vector<double> kGridN{5, 10, 50, 200};
const std::vector<double> kGridAlpha{-0.5, -0.25, 0, 0.5, 1};
const std::vector<double> kGridBeta{0, 0.5, 1, 2};
const std::vector<double> kGridX{0, 0.1, 1, 2, 5};

std::vector<OperatorParams> grid_params() {
  std::vector<OperatorParams> out;
  for (double n : kGridN)
    for (double a : kGridAlpha)
      for (double b : kGridBeta)
        if (n > b) out.push_back({n, a, b});
  return out;
}

std::string where(const OperatorParams& p) {
  return "n=" + format_number(p.n) + " alpha=" + format_number(p.alpha) + " beta=" + format_number(p.beta);
}

std::string where_shape(const OperatorParams& p) {
  return "alpha=" + format_number(p.alpha) + " beta=" + format_number(p.beta);
}

std::string where(const OperatorParams& p, double x) { return where(p) + " x=" + format_number(x); }

double rel(double value, double reference) {
  return std::fabs(value - reference) / std::max(std::fabs(reference), 1.0);
}

// Largest value seen, with the location it came from.
struct Worst {
  double value = -INFINITY;
  std::string at;
  void update(double v, const std::string& location) {
    if (!(v <= value)) {
      value = v;
      at = location;
    }
  }
};

// A check with several sub-conditions; measured is the worst metric/tolerance.
struct Parts {
  struct Part {
    std::string label;
    double metric;
    double tolerance;
    std::string at;
  };
  std::vector<Part> parts;

  void add(std::string label, const Worst& w, double tolerance) {
    parts.push_back({std::move(label), w.value, tolerance, w.at});
  }
  void add(std::string label, double metric, double tolerance, std::string at = {}) {
    parts.push_back({std::move(label), metric, tolerance, std::move(at)});
  }

  CheckResult finish(int id, std::string name) const {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.tolerance = parts.size() == 1 ? parts[0].tolerance : 1.0;
    r.passed = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Part& p = parts[i];
      bool ok = p.metric <= p.tolerance;
      r.passed = r.passed && ok;
      // A nonpositive tolerance cannot be scaled: report 0 when met, inf otherwise.
      double normalized = p.tolerance > 0.0 ? p.metric / p.tolerance : (ok ? 0.0 : INFINITY);
      if (parts.size() == 1) normalized = p.metric;
      r.measured = i == 0 ? normalized : std::max(r.measured, normalized);
      if (i) detail << "; ";
      detail << p.label << ' ' << format_number(p.metric) << " (tol " << format_number(p.tolerance) << ", "
             << (ok ? "ok" : "FAIL") << ")";
      if (!p.at.empty()) detail << " at " << p.at;
    }
    r.detail = detail.str();
    return r;
  }
};

TruncationPolicy tight_policy() {
  TruncationPolicy p;
  p.eps_tail = 1e-24;
  p.eps_quad = 1e-14;
  return p;
}

CheckResult normalization() {
  Worst w;
  for (const auto& p : grid_params()) {
    DurrmeyerOperator op(p, TestFunction::constant(1.0));
    for (double x : kGridX) w.update(std::fabs(op(x) - 1.0), where(p, x));
  }
  Parts parts;
  parts.add("max |M1 - 1|", w, 1e-12);
  return parts.finish(1, "normalization");
}

CheckResult moment_agreement() {
  Worst recurrence;
  Worst explicit_form;
  Worst quadrature;
  for (const auto& p : grid_params()) {
    for (unsigned r = 0; r <= 8; ++r) {
      std::unique_ptr<DurrmeyerOperator> op;
      if (r <= 4) op = std::make_unique<DurrmeyerOperator>(p, TestFunction::monomial(r));
      for (double x : kGridX) {
        double closed = raw_moment_closed(r, x, p);
        recurrence.update(rel(raw_moment_recurrence(r, x, p), closed), where(p, x) + " r=" + std::to_string(r));
        if (r >= 1 && r <= 4)
          explicit_form.update(rel(raw_moment_explicit(r, x, p), closed), where(p, x) + " r=" + std::to_string(r));
        if (op) quadrature.update(rel((*op)(x), closed), where(p, x) + " r=" + std::to_string(r));
      }
    }
  }
  Parts parts;
  parts.add("closed vs recurrence", recurrence, 1e-11);
  parts.add("closed vs explicit", explicit_form, 1e-12);
  parts.add("closed vs quadrature", quadrature, 1e-7);
  return parts.finish(2, "moment cross-agreement");
}

CheckResult three_term_recurrence() {
  Worst w;
  for (const auto& p : grid_params())
    for (double x : kGridX)
      for (unsigned r = 1; r <= 8; ++r) w.update(recurrence_residual(r, x, p), where(p, x) + " r=" + std::to_string(r));
  Parts parts;
  parts.add("relative residual", w, 1e-10);
  return parts.finish(3, "three-term recurrence");
}

CheckResult differential_recurrence() {
  Worst residual;
  Worst ratio_error;
  int vacuous = 0;
  for (const auto& p : grid_params()) {
    for (unsigned r : {2u, 3u}) {
      double full = diff_recurrence_residual(r, 1.0, p, 1e-3);
      double half = diff_recurrence_residual(r, 1.0, p, 5e-4);
      std::string loc = where(p, 1.0) + " r=" + std::to_string(r);
      residual.update(full, loc);
      // A quadratic moment has no truncation error: both residuals sit at
      // rounding level and their ratio carries no information.
      if (full <= 1e-10 && half <= 1e-10) {
        ++vacuous;
        continue;
      }
      ratio_error.update(std::fabs(full / half - 4.0), loc);
    }
  }
  Parts parts;
  parts.add("residual at h=1e-3", residual, 1e-5);
  parts.add("|halving ratio - 4|", ratio_error, 0.5);
  CheckResult r = parts.finish(4, "differential recurrence");
  r.detail += "; " + std::to_string(vacuous) + " cells with zero truncation error (ratio not applicable)";
  return r;
}

CheckResult central_moments() {
  Worst binomial;
  Worst quadrature;
  for (const auto& p : grid_params()) {
    for (unsigned r = 1; r <= 4; ++r) {
      for (double x : kGridX) {
        double e = central_moment_explicit(r, x, p);
        double b = central_moment_binomial(r, x, p).value;
        double q = central_moment_quadrature(r, x, p);
        std::string loc = where(p, x) + " r=" + std::to_string(r);
        double scale = std::max(std::fabs(e), 1e-300);
        binomial.update(std::fabs(b - e) / scale, loc);
        quadrature.update(std::fabs(q - e) / scale, loc);
      }
    }
  }
  Parts parts;
  parts.add("explicit vs binomial (rel)", binomial, 1e-10);
  parts.add("explicit vs quadrature (rel)", quadrature, 1e-6);
  return parts.finish(5, "central moments");
}

CheckResult asymptotics() {
  Worst first;
  Worst second;
  Worst third;
  for (double n : kGridN) {
    if (n < 50) continue;
    for (double a : kGridAlpha)
      for (double b : kGridBeta) {
        OperatorParams p{n, a, b};
        for (double x : kGridX) {
          double lead = a + 1.0 + b * x;
          double dev = std::fabs(n * central_moment(1, x, p) - lead);
          first.update(dev / (5.0 * lead / n), where(p, x));
        }
      }
  }
  for (double a : kGridAlpha)
    for (double b : kGridBeta) {
      OperatorParams p{1e4, a, b};
      second.update(std::fabs(p.n * central_moment(2, 1.0, p) / 2.0 - 1.0), where(p, 1.0));
    }
  for (double a : kGridAlpha)
    for (double b : {1.0, 2.0}) {
      OperatorParams p{1e5, a, b};
      double ratio = central_moment(3, 1.0, p) / asymptotic_prediction(3, 1.0, p);
      third.update(std::fabs(ratio - 1.0), where(p, 1.0) + " ratio=" + format_number(ratio));
    }
  Parts parts;
  parts.add("r=1 deviation / (5(a+1+bx)/n)", first, 1.0);
  parts.add("r=2 |n mu2/(2x) - 1| at n=1e4", second, 0.01);
  parts.add("r=3 |exact/predicted - 1| at n=1e5", third, 0.05);
  return parts.finish(6, "central moment asymptotics");
}

CheckResult eigenpairs() {
  std::vector<double> xs;
  for (int i = 0; i <= 20; ++i) xs.push_back(0.25 * i);
  TruncationPolicy tight = tight_policy();
  Worst op_constant;
  Worst op_exponential;
  Worst deficits;
  Worst vec_constant;
  Worst vec_exponential;
  Worst lambda_match;
  Worst lambda_spread;
  long k_max_used = 0;
  for (const auto& p : grid_params()) {
    auto c1 = eigen_operator_check(p, Eigenpair::constant, xs, tight);
    op_constant.update(*c1.operator_residual, where(p));
    auto c2 = eigen_operator_check(p, Eigenpair::exponential, xs, tight);
    op_exponential.update(*c2.operator_residual, where(p));

    TruncatedP P = build_P_adaptive(p);
    k_max_used = std::max(k_max_used, P.K);
    double upper_deficit = 0.0;
    for (long k = 0; k <= P.K / 2; ++k) upper_deficit = std::max(upper_deficit, P.row_deficits[k]);
    deficits.update(upper_deficit, where(p) + " K=" + std::to_string(P.K));
    vec_constant.update(*eigen_vector_check(P, Eigenpair::constant).vector_residual, where(p));
    if (p.beta > 0.0) {
      auto v2 = eigen_vector_check(P, Eigenpair::exponential);
      vec_exponential.update(*v2.vector_residual, where(p));
      double formula = std::pow(1.0 - p.beta / p.n, p.alpha + 1.0);
      DurrmeyerOperator op(p, TestFunction::exp_scaled(-p.beta).with_growth(0.0, 1.0), tight);
      double lo = INFINITY;
      double hi = -INFINITY;
      for (double x : xs) {
        double ratio = op(x) / std::exp(-p.beta * x);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        lambda_match.update(std::fabs(ratio - formula), where(p, x));
      }
      lambda_spread.update(hi - lo, where(p));
      lambda_match.update(std::fabs(v2.lambda - formula), where(p));
    }
  }
  Parts parts;
  parts.add("operator residual constant", op_constant, 1e-8);
  parts.add("operator residual exponential", op_exponential, 1e-8);
  parts.add("row deficits k<=K/2", deficits, 1e-12);
  parts.add("vector residual constant", vec_constant, 1e-10);
  parts.add("vector residual exponential", vec_exponential, 1e-10);
  parts.add("|operator ratio - (1-b/n)^(a+1)|", lambda_match, 1e-12);
  parts.add("operator ratio spread over x", lambda_spread, 1e-8);
  CheckResult r = parts.finish(7, "eigenpairs");
  r.detail += "; largest adaptive K " + std::to_string(k_max_used);
  return r;
}

CheckResult iterate_decay_check() {
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(0.5 * i);
  Worst w;
  for (double a : {0.0, 1.0}) {
    OperatorParams p{10.0, a, 2.0};
    IterateReport rep = iterate_decay(p, 4, xs);
    for (const auto& s : rep.steps)
      if (s.amplitude_ratio)
        w.update(std::fabs(*s.amplitude_ratio - rep.lambda), where(p) + " step=" + std::to_string(s.step));
  }
  Parts parts;
  parts.add("|amplitude ratio - lambda2|", w, 1e-6);
  return parts.finish(8, "iterate decay");
}

CheckResult compact_estimate() {
  TestFunction f = TestFunction::abs_shift(1.0);
  std::vector<double> ns{25, 100, 400, 1600};
  Worst spread;
  Worst trend;
  std::ostringstream ratios;
  for (OperatorParams base : {OperatorParams{0, 0.0, 0.0}, OperatorParams{0, 0.5, 1.0}}) {
    ConvergenceReport rep = compact_estimate_check(f, base, ns, 2.0);
    std::vector<double> r;
    for (const auto& row : rep.rows) r.push_back(row.ratio.value_or(0.0));
    double lo = *std::min_element(r.begin(), r.end());
    double hi = *std::max_element(r.begin(), r.end());
    spread.update(lo > 0.0 ? hi / lo : INFINITY, where_shape(base));
    trend.update(rate_slope(ns, r).slope, where_shape(base));
    ratios << " [" << where_shape(base) << ":";
    for (double v : r) ratios << ' ' << format_number(v);
    ratios << ']';
  }
  Parts parts;
  parts.add("max/min ratio", spread, 3.0);
  parts.add("log-log trend of ratio", trend, 0.0);
  CheckResult r = parts.finish(9, "compact estimate");
  r.detail += "; ratios" + ratios.str();
  return r;
}

CheckResult korovkin() {
  Worst e0;
  Worst e1;
  Worst e2;
  for (const auto& p : grid_params()) {
    OperatorParams doubled = p;
    doubled.n = 2.0 * p.n - p.beta;
    KorovkinValues v = korovkin_weighted_check(p);
    KorovkinValues w = korovkin_weighted_check(doubled);
    e0.update(std::max(std::fabs(v.e0), std::fabs(w.e0)), where(p));
    e1.update(std::fabs(v.e1 / w.e1 / 2.0 - 1.0), where(p));
    e2.update(std::fabs(v.e2 / w.e2 / 2.0 - 1.0), where(p) + " ratio=" + format_number(v.e2 / w.e2));
  }
  Parts parts;
  parts.add("e0 value", e0, 0.0);
  parts.add("e1 |ratio/2 - 1|", e1, 0.05);
  parts.add("e2 |ratio/2 - 1|", e2, 0.05);
  return parts.finish(10, "weighted Korovkin scaling");
}

CheckResult local_lp() {
  TestFunction f = TestFunction::abs_shift(1.0);
  std::vector<double> ns{10, 40, 160, 640};
  Worst increase;
  Worst final_ratio;
  std::ostringstream errors;
  for (OperatorParams base : {OperatorParams{0, 0.0, 0.0}, OperatorParams{0, 0.5, 1.0}}) {
    for (double pp : {1.0, 2.0}) {
      std::vector<double> e;
      for (double n : ns) {
        OperatorParams p = base;
        p.n = n;
        e.push_back(lp_error(f, p, pp, 2.0));
      }
      std::string loc = where_shape(base) + " p=" + format_number(pp);
      for (std::size_t i = 1; i < e.size(); ++i) increase.update(e[i] / e[i - 1], loc);
      final_ratio.update(e.back() / e.front(), loc);
      errors << " [" << loc << ":";
      for (double v : e) errors << ' ' << format_number(v);
      errors << ']';
    }
  }
  Parts parts;
  // Strict decrease: the tolerance is the largest double below 1.
  parts.add("max step ratio e(n_{i+1})/e(n_i)", increase, std::nextafter(1.0, 0.0));
  parts.add("final/initial", final_ratio, 0.25);
  CheckResult r = parts.finish(11, "local Lp convergence");
  r.detail += "; errors" + errors.str();
  return r;
}

CheckResult schur_bounds() {
  Worst first;
  for (const auto& p : grid_params())
    for (double pp : {1.0, 2.0})
      for (double gamma : {0.0, p.beta, pp * p.beta}) {
        if (!(gamma < p.n * pp)) continue;
        for (int i = 0; i <= 200; ++i) {
          double x = 0.1 * i;
          first.update(schur_first_integral(p, gamma, pp, x) - 1.0,
                       where(p, x) + " p=" + format_number(pp) + " gamma=" + format_number(gamma));
        }
      }

  std::vector<double> ns{5, 10, 100, 1000};
  std::vector<double> ts;
  for (int i = 0; i <= 1000; ++i) ts.push_back(0.01 * i);
  Worst growth;
  Worst alpha_zero;
  for (double a : {-0.5, -0.25, 0.0})
    for (double b : kGridBeta) {
      double previous = INFINITY;
      for (double n : ns) {
        OperatorParams p{n, a, b};
        double sup = 0.0;
        for (double t : ts) sup = std::max(sup, schur_E(p, t).value);
        if (std::isfinite(previous)) growth.update((sup - previous) / previous, where(p));
        if (a == 0.0) alpha_zero.update(sup - 1.0, where(p));
        previous = sup;
      }
    }

  Worst second;
  for (double n : kGridN)
    for (double a : {-0.5, -0.25, 0.0})
      for (double b : {0.0, 1.0, 2.0}) {
        if (!(n > b)) continue;
        OperatorParams p{n, a, b};
        for (double gamma : {0.0, b}) {
          for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            SchurSecond s = schur_second_integral(p, gamma, 1.0, t);
            second.update(s.direct - s.bound, where(p) + " t=" + format_number(t) + " gamma=" + format_number(gamma) +
                                                  " direct=" + format_number(s.direct) +
                                                  " bound=" + format_number(s.bound));
          }
        }
      }

  Parts parts;
  parts.add("first integral - 1", first, 1e-13);
  // Rounding allowance for comparing sups across n.
  parts.add("relative growth of sup E over n", growth, 1e-12);
  parts.add("sup E - 1 (alpha=0)", alpha_zero, 1e-13);
  parts.add("direct - bound (second integral)", second, 0.0);
  return parts.finish(12, "Schur bounds");
}

CheckResult specialization() {
  std::vector<TestFunction> fs{TestFunction::constant(1.0), TestFunction::monomial(1), TestFunction::monomial(2),
                               TestFunction::exp_scaled(-1.0)};
  Worst w;
  for (double n : {5.0, 20.0}) {
    OperatorParams p{n, 0.0, 0.0};
    for (const auto& f : fs) {
      DurrmeyerOperator op(p, f);
      for (double x : {0.0, 1.0, 2.0})
        w.update(std::fabs(op(x) - apply_mazhar_totik(f, x, n)), where(p, x) + " f=" + f.describe());
    }
  }
  Parts parts;
  parts.add("max |M - D|", w, 1e-9);
  return parts.finish(13, "alpha=beta=0 specialization");
}

std::vector<TestFunction> builtin_catalog() {
  return {TestFunction::constant(1.0),     TestFunction::monomial(1),       TestFunction::monomial(2),
          TestFunction::monomial(3),       TestFunction::polynomial({1.0, -2.0, 0.5}),
          TestFunction::exp_scaled(-1.0),  TestFunction::exp_scaled(0.5),   TestFunction::abs_shift(1.0),
          TestFunction::square_root(),     TestFunction::sin_scaled(1.0),   TestFunction::sin_scaled(3.0)};
}

CheckResult interpolation_at_zero() {
  Worst w;
  for (const auto& p : grid_params())
    for (const auto& f : builtin_catalog()) {
      if (validate(p, f)) continue;
      w.update(std::fabs(value_at_zero(f, p) - apply_operator(f, 0.0, p)), where(p) + " f=" + f.describe());
    }
  Parts parts;
  parts.add("max |value_at_zero - M f(0)|", w, 1e-10);
  return parts.finish(14, "interpolation at zero");
}

}  // namespace

CheckResult run_check(int id) {
  static const std::vector<std::function<CheckResult()>> checks{
      normalization,      moment_agreement, three_term_recurrence, differential_recurrence, central_moments,
      asymptotics,        eigenpairs,       iterate_decay_check,   compact_estimate,        korovkin,
      local_lp,           schur_bounds,     specialization,        interpolation_at_zero};
  if (id < kFirstCheck || id > kLastLibraryCheck) fail(Errc::usage, "no check numbered " + std::to_string(id));
  try {
    return checks[static_cast<std::size_t>(id - 1)]();
  } catch (const Error& e) {
    CheckResult r;
    r.id = id;
    r.name = "check " + std::to_string(id);
    r.measured = NAN;
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
    return r;
  }
}

std::vector<CheckResult> run_acceptance_suite() {
  std::vector<CheckResult> out;
  for (int id = kFirstCheck; id <= kLastLibraryCheck; ++id) out.push_back(run_check(id));
  return out;
}

}  // namespace smld
