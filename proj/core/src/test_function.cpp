#include "smld/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smld/error.hpp"
#include "smld/format.hpp"

namespace smld {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// max over t >= 0 of t^j e^{-t}
double power_envelope(unsigned j) {
  if (j == 0) return 1.0;
  return std::pow(j / std::exp(1.0), static_cast<double>(j));
}

std::pair<double, double> default_growth(const TestFunction::Kind& kind) {
  return std::visit(
      overloaded{
          [](const Monomial& m) -> std::pair<double, double> {
            if (m.r == 0) return {0.0, 1.0};
            return {1.0, power_envelope(m.r)};
          },
          [](const Polynomial& p) -> std::pair<double, double> {
            if (p.coeffs.size() <= 1) return {0.0, p.coeffs.empty() ? 0.0 : std::fabs(p.coeffs[0])};
            double K = std::fabs(p.coeffs[0]);
            double s = std::fabs(p.shift);
            for (std::size_t j = 1; j < p.coeffs.size(); ++j) {
              auto jj = static_cast<unsigned>(j);
              double term = s == 0.0 ? power_envelope(jj)
                                     : std::ldexp(power_envelope(jj) + std::pow(s, static_cast<double>(j)),
                                                  static_cast<int>(j) - 1);
              K += std::fabs(p.coeffs[j]) * term;
            }
            return {1.0, K};
          },
          [](const ExpScaled& e) -> std::pair<double, double> { return {std::max(e.c, 0.0), 1.0}; },
          [](const AbsShift& a) -> std::pair<double, double> {
            return {1.0, std::fabs(a.c) + std::exp(-1.0)};
          },
          [](const SquareRoot&) -> std::pair<double, double> { return {1.0, 0.5}; },
          [](const SinScaled&) -> std::pair<double, double> { return {0.0, 1.0}; },
          [](const Sampled& s) -> std::pair<double, double> {
            double m = 0.0;
            for (double v : s.v) m = std::max(m, std::fabs(v));
            return {0.0, m};
          },
      },
      kind);
}

void check_sampled(const Sampled& s) {
  if (s.t.size() != s.v.size()) fail(Errc::invalid_function, "sampled function: column lengths differ");
  if (s.t.size() < 2) fail(Errc::invalid_function, "sampled function needs at least two points");
  if (s.t.front() != 0.0) fail(Errc::invalid_function, "sampled function must start at t = 0");
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!std::isfinite(s.t[i]) || !std::isfinite(s.v[i]))
      fail(Errc::invalid_function, "sampled function has a non-finite entry");
    if (i > 0 && !(s.t[i] > s.t[i - 1]))
      fail(Errc::invalid_function, "sampled function grid must be strictly increasing");
  }
}

void check_kind(const TestFunction::Kind& kind) {
  std::visit(overloaded{
                 [](const Polynomial& p) {
                   for (double c : p.coeffs)
                     if (!std::isfinite(c)) fail(Errc::invalid_function, "non-finite polynomial coefficient");
                   if (!std::isfinite(p.shift)) fail(Errc::invalid_function, "non-finite polynomial shift");
                 },
                 [](const ExpScaled& e) {
                   if (!std::isfinite(e.c)) fail(Errc::invalid_function, "non-finite exponent");
                 },
                 [](const AbsShift& a) {
                   if (!std::isfinite(a.c)) fail(Errc::invalid_function, "non-finite shift");
                 },
                 [](const SinScaled& s) {
                   if (!std::isfinite(s.c)) fail(Errc::invalid_function, "non-finite frequency");
                 },
                 [](const Sampled& s) { check_sampled(s); },
                 [](const auto&) {},
             },
             kind);
}

}  // namespace

TestFunction::TestFunction(Kind kind) : kind_(std::move(kind)) {
  check_kind(kind_);
  std::tie(growth_A_, growth_K_) = default_growth(kind_);
}

TestFunction::TestFunction(Kind kind, double growth_A, double growth_K) : kind_(std::move(kind)) {
  check_kind(kind_);
  if (!(growth_A >= 0.0) || !(growth_K >= 0.0) || !std::isfinite(growth_A) || !std::isfinite(growth_K))
    fail(Errc::invalid_function, "growth constants must be finite and nonnegative");
  growth_A_ = growth_A;
  growth_K_ = growth_K;
}

TestFunction TestFunction::constant(double c) { return TestFunction(Polynomial{{c}, 0.0}); }
TestFunction TestFunction::monomial(unsigned r) { return TestFunction(Monomial{r}); }
TestFunction TestFunction::polynomial(std::vector<double> coeffs, double shift) {
  return TestFunction(Polynomial{std::move(coeffs), shift});
}
TestFunction TestFunction::exp_scaled(double c) { return TestFunction(ExpScaled{c}); }
TestFunction TestFunction::abs_shift(double c) { return TestFunction(AbsShift{c}); }
TestFunction TestFunction::square_root() { return TestFunction(SquareRoot{}); }
TestFunction TestFunction::sin_scaled(double c) { return TestFunction(SinScaled{c}); }
TestFunction TestFunction::sampled(std::vector<double> t, std::vector<double> v) {
  return TestFunction(Sampled{std::move(t), std::move(v)});
}

TestFunction TestFunction::load_sampled(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open sampled function file '" + path + "'");
  Sampled s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    double t = 0.0;
    double v = 0.0;
    std::string extra;
    if (!(fields >> t >> v) || (fields >> extra))
      fail(Errc::invalid_function, path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    s.t.push_back(t);
    s.v.push_back(v);
  }
  return TestFunction(std::move(s));
}

double TestFunction::operator()(double t) const {
  return std::visit(
      overloaded{
          [t](const Monomial& m) { return std::pow(t, static_cast<double>(m.r)); },
          [t](const Polynomial& p) {
            double u = t - p.shift;
            double acc = 0.0;
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * u + *it;
            return acc;
          },
          [t](const ExpScaled& e) { return std::exp(e.c * t); },
          [t](const AbsShift& a) { return std::fabs(t - a.c); },
          [t](const SquareRoot&) { return std::sqrt(t); },
          [t](const SinScaled& s) { return std::sin(s.c * t); },
          [t](const Sampled& s) {
            if (t <= s.t.front()) return s.v.front();
            if (t >= s.t.back()) return s.v.back();
            auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
            auto i = static_cast<std::size_t>(it - s.t.begin());
            double w = (t - s.t[i - 1]) / (s.t[i] - s.t[i - 1]);
            return s.v[i - 1] + w * (s.v[i] - s.v[i - 1]);
          },
      },
      kind_);
}

TestFunction TestFunction::with_growth(double growth_A, double growth_K) const {
  return TestFunction(kind_, growth_A, growth_K);
}

bool TestFunction::is_smooth() const {
  return std::holds_alternative<Monomial>(kind_) || std::holds_alternative<Polynomial>(kind_) ||
         std::holds_alternative<ExpScaled>(kind_) || std::holds_alternative<SinScaled>(kind_);
}

std::optional<unsigned> TestFunction::polynomial_degree() const {
  if (auto m = std::get_if<Monomial>(&kind_)) return m->r;
  if (auto p = std::get_if<Polynomial>(&kind_))
    return p->coeffs.empty() ? 0u : static_cast<unsigned>(p->coeffs.size() - 1);
  return std::nullopt;
}

std::vector<double> TestFunction::kinks() const {
  if (auto a = std::get_if<AbsShift>(&kind_)) {
    if (a->c > 0.0) return {a->c};
    return {};
  }
  if (auto s = std::get_if<Sampled>(&kind_)) return {s->t.begin() + 1, s->t.end()};
  return {};
}

bool TestFunction::growth_holds(double t_max, int points) const {
  for (int i = 0; i < points; ++i) {
    double t = t_max * i / (points - 1);
    double bound = growth_K_ * std::exp(growth_A_ * t);
    if (std::fabs((*this)(t)) > bound * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

std::string TestFunction::describe() const {
  return std::visit(overloaded{
                        [](const Monomial& m) { return "monomial:" + std::to_string(m.r); },
                        [](const Polynomial& p) {
                          std::string s = "poly:";
                          for (std::size_t j = 0; j < p.coeffs.size(); ++j) {
                            if (j) s += ',';
                            s += format_number(p.coeffs[j]);
                          }
                          if (p.shift != 0.0) s += "@" + format_number(p.shift);
                          return s;
                        },
                        [](const ExpScaled& e) { return "exp:" + format_number(e.c); },
                        [](const AbsShift& a) { return "abs:" + format_number(a.c); },
                        [](const SquareRoot&) { return std::string("sqrt"); },
                        [](const SinScaled& s) { return "sin:" + format_number(s.c); },
                        [](const Sampled& s) { return "sampled:" + std::to_string(s.t.size()) + "pts"; },
                    },
                    kind_);
}

}  // namespace smld
