#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace smld {

struct Monomial {
  unsigned r = 0;
};

// sum_j coeffs[j] * (t - shift)^j
struct Polynomial {
  std::vector<double> coeffs;
  double shift = 0.0;
};

// e^{c t}
struct ExpScaled {
  double c = 0.0;
};

// |t - c|
struct AbsShift {
  double c = 0.0;
};

struct SquareRoot {};

// sin(c t)
struct SinScaled {
  double c = 1.0;
};

// Piecewise-linear through (t_i, v_i), constant beyond the last node.
struct Sampled {
  std::vector<double> t;
  std::vector<double> v;
};

// A function on [0, inf) together with a declared bound |f(t)| <= K e^{A t}.
class TestFunction {
 public:
  using Kind = std::variant<Monomial, Polynomial, ExpScaled, AbsShift, SquareRoot, SinScaled, Sampled>;

  explicit TestFunction(Kind kind);
  TestFunction(Kind kind, double growth_A, double growth_K);

  static TestFunction constant(double c = 1.0);
  static TestFunction monomial(unsigned r);
  static TestFunction polynomial(std::vector<double> coeffs, double shift = 0.0);
  static TestFunction exp_scaled(double c);
  static TestFunction abs_shift(double c);
  static TestFunction square_root();
  static TestFunction sin_scaled(double c);
  static TestFunction sampled(std::vector<double> t, std::vector<double> v);
  // Two whitespace-separated columns (t, f(t)); '#' starts a comment line.
  static TestFunction load_sampled(const std::string& path);

  double operator()(double t) const;

  const Kind& kind() const { return kind_; }
  double growth_A() const { return growth_A_; }
  double growth_K() const { return growth_K_; }
  TestFunction with_growth(double growth_A, double growth_K) const;

  // True for kinds whose coefficients are integrated with fixed Gauss rules.
  bool is_smooth() const;
  std::optional<unsigned> polynomial_degree() const;
  // Points in (0, inf) where f or its derivative is not smooth.
  std::vector<double> kinks() const;
  // Checks |f(t)| <= K e^{A t} on an evenly spaced grid over [0, t_max].
  bool growth_holds(double t_max = 100.0, int points = 1001) const;
  std::string describe() const;

 private:
  Kind kind_;
  double growth_A_ = 0.0;
  double growth_K_ = 1.0;
};

}  // namespace smld
