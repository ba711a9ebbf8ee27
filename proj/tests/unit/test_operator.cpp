#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "oracle.hpp"
#include "smld/operator.hpp"
#include "smld/special_fn.hpp"
#include "support.hpp"

using namespace smld;
using support::error_code;
using support::rel_err;

namespace {

const OperatorParams kParamSets[] = {{10, 0, 0}, {5, -0.5, 2}, {50, 1, 0.5}, {200, -0.25, 1}, {7.5, 2.5, 3}};

}  // namespace

TEST_SUITE("operator_core") {
  TEST_CASE("parameter validation names the violated constraint") {
    CHECK(validate({10, 0, 0}) == std::nullopt);
    CHECK(validate({10, 0, 12}) == Errc::n_not_above_beta);
    CHECK(validate({10, -1.5, 0}) == Errc::alpha_not_above_minus_one);
    CHECK(validate({10, -1.0, 0}) == Errc::alpha_not_above_minus_one);
    CHECK(validate({4, 0, 0}, TestFunction::exp_scaled(5.0)) == Errc::n_not_above_beta_plus_growth);
    CHECK(error_code([] { apply_operator(TestFunction::constant(), 1.0, {10, 0, 12}); }) == Errc::n_not_above_beta);
    CHECK(error_code([] { apply_operator(TestFunction::constant(), -1.0, {10, 0, 0}); }) == Errc::domain);
    try {
      require_valid({10, -1.5, 0});
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("requires alpha > -1") != std::string::npos);
    }
  }

  TEST_CASE("truncation policy validation") {
    TruncationPolicy p;
    CHECK_NOTHROW(p.validate());
    p.eps_tail = 0.1;
    CHECK(error_code([&] { p.validate(); }) == Errc::invalid_policy);
  }

  TEST_CASE("certified range leaves at most eps outside") {
    oracle::Cases cases(707);
    for (int i = 0; i < 50; ++i) {
      double mean = cases.log_uniform(0.01, 2e4);
      double rho = 1.0 + cases.uniform(0.0, 0.3);
      double eps = 1e-14;
      IndexRange r = certified_range(mean, rho, 0.0, 1.0, eps, 10000000);
      long far = static_cast<long>(rho * mean + 60.0 * std::sqrt(rho * mean) + 200.0);
            double outside = 0.0;
      for (long k = 0; k <= far; ++k)
        if (k < r.lo || k > r.hi) outside += std::exp(k * std::log(rho) + log_poisson_density(static_cast<double>(k), mean));
      CHECK(outside <= eps * (1.0 + 1e-6));
      CHECK(r.lo <= r.hi);
    }
    CHECK(error_code([] { certified_range(1e6, 1.0, 0.0, 1.0, 1e-14, 1000); }) == Errc::k_max_exceeded);
  }

  TEST_CASE("normalization and reproduction of constants") {
    for (const auto& p : kParamSets) {
      DurrmeyerOperator op(p, TestFunction::constant(1.0));
      for (double x : {0.0, 0.1, 1.0, 3.0, 10.0}) CHECK(std::fabs(op(x) - 1.0) <= 1e-13);
    }
    CHECK(apply_operator(TestFunction::constant(2.5), 1.0, {10, 0, 0}) == doctest::Approx(2.5).epsilon(1e-14));
  }

  TEST_CASE("monomials agree with the 50-digit moment series") {
    for (const auto& p : kParamSets)
      for (unsigned r = 1; r <= 5; ++r) {
        DurrmeyerOperator op(p, TestFunction::monomial(r));
        for (double x : {0.0, 0.3, 2.0}) {
          double ref = oracle::raw_moment(r, x, p.n, p.alpha, p.beta);
          CHECK(rel_err(op(x), ref) <= 1e-12);
        }
      }
  }

  TEST_CASE("exponentials have a closed form") {
    // M e^{ct}(x) = (m/(m-c))^{a+1} exp(n x c/(m-c)). The series is
    // truncated to an absolute tolerance.
    for (const auto& p : kParamSets)
      for (double c : {-3.0, -0.5, 0.4}) {
        double m = p.rate();
        if (!(m - c > 1.0)) continue;
        for (double x : {0.0, 0.5, 4.0}) {
          double ref = std::pow(m / (m - c), p.alpha + 1.0) * std::exp(p.n * x * c / (m - c));
          CHECK(std::fabs(apply_operator(TestFunction::exp_scaled(c), x, p) - ref) <= 1e-14 + 1e-12 * ref);
        }
      }
  }

  TEST_CASE("non-smooth and oscillatory functions against 50-digit series") {
    for (const auto& p : kParamSets) {
      for (double x : {0.0, 0.7, 2.5}) {
        double ref_abs = oracle::operator_series(
            [](const oracle::Real& s, const oracle::Real& m) { return oracle::mean_abs_shift(s, m, 1.0); }, x, p.n,
            p.alpha, p.beta);
        CHECK(std::fabs(apply_operator(TestFunction::abs_shift(1.0), x, p) - ref_abs) <= 1e-11);
        double ref_sqrt = oracle::operator_series(
            [](const oracle::Real& s, const oracle::Real& m) { return oracle::mean_sqrt(s, m); }, x, p.n, p.alpha,
            p.beta);
        CHECK(std::fabs(apply_operator(TestFunction::square_root(), x, p) - ref_sqrt) <= 1e-11);
        double ref_sin = oracle::operator_series(
            [](const oracle::Real& s, const oracle::Real& m) { return oracle::mean_sin(s, m, 3.0); }, x, p.n,
            p.alpha, p.beta);
        CHECK(std::fabs(apply_operator(TestFunction::sin_scaled(3.0), x, p) - ref_sin) <= 1e-11);
      }
    }
  }

  TEST_CASE("Gauss rule and adaptive coefficients agree") {
    oracle::Cases cases(808);
    for (int i = 0; i < 40; ++i) {
      OperatorParams p{cases.uniform(3.0, 100.0), cases.uniform(-0.9, 3.0), 0.0};
      p.beta = cases.uniform(0.0, p.n - 2.0);
      long k = cases.integer(0, 300);
      TestFunction f = TestFunction::exp_scaled(-cases.uniform(0.0, 2.0));
      CHECK(rel_err(coefficient(f, k, p), coefficient_adaptive(f, k, p)) <= 1e-11);
    }
  }

  TEST_CASE("positivity: nonnegative f gives nonnegative values") {
    oracle::Cases cases(909);
    for (int i = 0; i < 8; ++i) {
      OperatorParams p{cases.uniform(2.0, 60.0), cases.uniform(-0.9, 2.0), 0.0};
      p.beta = cases.uniform(0.0, p.n - 1.0);
      double c = cases.uniform(0.0, 4.0);
      double x = cases.uniform(0.0, 6.0);
      CHECK(apply_operator(TestFunction::abs_shift(c), x, p) >= 0.0);
    }
  }

  TEST_CASE("growth bound dominates the operator") {
    oracle::Cases cases(1010);
    for (int i = 0; i < 12; ++i) {
      OperatorParams p{cases.uniform(5.0, 60.0), cases.uniform(-0.9, 2.0), cases.uniform(0.0, 2.0)};
      double c = cases.uniform(-1.0, 1.0);
      TestFunction f = TestFunction::exp_scaled(c);
      double x = cases.uniform(0.0, 5.0);
      CHECK(std::fabs(apply_operator(f, x, p)) <= growth_bound(p, f, x) * (1.0 + 1e-12));
    }
  }

  TEST_CASE("kernel is a probability density in t") {
    for (const auto& p : kParamSets) {
      if (p.alpha < 0.0) continue;
      for (double x : {0.2, 1.0, 3.0}) {
        auto density = [&](double t) { return kernel(x, t, p); };
        double upper = 20.0 * (x + 1.0);
        double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, 0.0, upper, 15, 1e-13);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(kernel(x, 1.0, p) >= 0.0);
      }
    }
  }

  TEST_CASE("interpolation at zero") {
    for (const auto& p : kParamSets) {
      double m = p.rate();
      double ref = std::pow(m / (m + 1.0), p.alpha + 1.0);
      CHECK(rel_err(value_at_zero(TestFunction::exp_scaled(-1.0), p), ref) <= 1e-12);
      CHECK(value_at_zero(TestFunction::monomial(1), p) == doctest::Approx((p.alpha + 1.0) / m).epsilon(1e-12));
    }
  }

  TEST_CASE("Szasz operator reproduces linear functions") {
    TestFunction t = TestFunction::monomial(1);
    TestFunction t2 = TestFunction::monomial(2);
    for (double n : {3.0, 20.0})
      for (double x : {0.0, 0.5, 2.0}) {
        CHECK(apply_szasz(t, x, n) == doctest::Approx(x).epsilon(1e-13));
        CHECK(apply_szasz(t2, x, n) == doctest::Approx(x * x + x / n).epsilon(1e-13));
      }
  }

  TEST_CASE("zero-parameter case matches the reference construction") {
    for (double n : {4.0, 15.0})
      for (double x : {0.0, 0.5, 2.0})
        CHECK(std::fabs(apply_operator(TestFunction::square_root(), x, {n, 0, 0}) -
                        apply_mazhar_totik(TestFunction::square_root(), x, n)) <= 1e-9);
  }

  TEST_CASE("sampled functions from a file") {
    std::string path = "smld_sampled_test.txt";
    {
      std::ofstream out(path);
      out << "# t value\n";
      for (int i = 0; i <= 400; ++i) out << 0.25 * i << ' ' << 0.25 * i << '\n';
    }
    TestFunction f = TestFunction::load_sampled(path);
    std::remove(path.c_str());
    OperatorParams p{20, 0.5, 1};
    double ref = oracle::raw_moment(1, 1.0, p.n, p.alpha, p.beta);
    CHECK(std::fabs(apply_operator(f, 1.0, p) - ref) <= 1e-10);
    CHECK(error_code([] { TestFunction::load_sampled("/nonexistent/sampled.txt"); }) == Errc::io);
    CHECK(error_code([] { TestFunction::sampled({0.0, 1.0, 0.5}, {1.0, 2.0, 3.0}); }) == Errc::invalid_function);
  }

  TEST_CASE("shared operator gives identical results across threads") {
    DurrmeyerOperator op({30, 0.5, 1}, TestFunction::abs_shift(1.0));
    std::vector<double> xs{0.1, 0.5, 1.0, 1.5, 2.0, 3.0};
    std::vector<std::vector<double>> results(4, std::vector<double>(xs.size()));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < results.size(); ++t)
      threads.emplace_back([&, t] {
        for (std::size_t i = 0; i < xs.size(); ++i) results[t][i] = op(xs[i]);
      });
    for (auto& th : threads) th.join();
    for (std::size_t t = 1; t < results.size(); ++t) CHECK(results[t] == results[0]);
  }

  TEST_CASE("test function catalog") {
    CHECK(TestFunction::monomial(3)(2.0) == 8.0);
    CHECK(TestFunction::polynomial({1.0, -2.0, 0.5})(2.0) == doctest::Approx(-1.0));
    CHECK(TestFunction::abs_shift(1.0)(0.25) == 0.75);
    CHECK(TestFunction::exp_scaled(0.5).growth_A() == 0.5);
    for (const auto& f : {TestFunction::monomial(4), TestFunction::polynomial({1.0, -2.0, 0.5}, 1.0),
                          TestFunction::exp_scaled(0.3), TestFunction::abs_shift(2.0), TestFunction::square_root(),
                          TestFunction::sin_scaled(2.0)})
      CHECK_MESSAGE(f.growth_holds(), f.describe());
    CHECK(TestFunction::abs_shift(1.0).kinks() == std::vector<double>{1.0});
    CHECK(TestFunction::monomial(2).polynomial_degree() == 2u);
  }
}
