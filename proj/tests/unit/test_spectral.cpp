#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "oracle.hpp"
#include "smld/special_fn.hpp"
#include "smld/spectral.hpp"
#include "support.hpp"

using namespace smld;
using support::error_code;
using support::rel_err;

namespace {

// Entry (k, j) of P in 50 digits from its negative binomial form.
double entry_reference(const OperatorParams& p, long k, long j) {
  oracle::Real two_n = 2 * oracle::Real(p.n) - oracle::Real(p.beta);
  oracle::Real prob = (oracle::Real(p.n) - oracle::Real(p.beta)) / two_n;
  oracle::Real q = oracle::Real(p.n) / two_n;
  oracle::Real s = oracle::Real(k) + oracle::Real(p.alpha) + 1;
  oracle::Real log_value = s * log(prob) + oracle::Real(j) * log(q) + boost::math::lgamma(s + j) -
                           boost::math::lgamma(s) - boost::math::lgamma(oracle::Real(j + 1));
  return static_cast<double>(exp(log_value));
}

// E psi_j(n T), T ~ Gamma(k + alpha + 1, n - beta), by adaptive quadrature.
double entry_by_quadrature(const OperatorParams& p, long k, long j) {
  double s = k + p.alpha + 1.0;
  double m = p.rate();
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(log_gamma_density(t, s, m) + poisson_weight_log(p.n, t, j));
  };
  double centre = (s + j) / (m + p.n);
  double upper = centre + 40.0 * std::sqrt(s + j + 1.0) / (m + p.n) + 10.0 / (m + p.n);
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, upper, 20, 1e-13);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("first entry example") {
    TruncatedP P = build_P({2, 0, 0}, 8);
    CHECK(P.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(entry_by_quadrature({2, 0, 0}, 0, 0) == doctest::Approx(0.5).epsilon(1e-10));
  }

  TEST_CASE("entries match the closed form and the defining integral") {
    oracle::Cases cases(1616);
    for (int i = 0; i < 20; ++i) {
      OperatorParams p{cases.uniform(2.0, 50.0), cases.uniform(-0.9, 2.0), 0.0};
      p.beta = cases.uniform(0.0, 0.9 * p.n);
      TruncatedP P = build_P(p, 200);
      for (int c = 0; c < 10; ++c) {
        long k = cases.integer(0, 100);
        long j = cases.integer(0, 200);
        double ref = entry_reference(p, k, j);
        if (ref > 1e-250) CHECK(rel_err(P.at(k, j), ref) <= 1e-12);
        if (ref > 1e-8) CHECK(rel_err(P.at(k, j), entry_by_quadrature(p, k, j)) <= 1e-8);
      }
    }
  }

  TEST_CASE("entries are nonnegative and deficits match the negative binomial tail") {
    for (OperatorParams p : {OperatorParams{10, 0, 2}, OperatorParams{5, -0.5, 1}, OperatorParams{50, 1, 0}}) {
      TruncatedP P = build_P(p, 300);
      for (double e : P.entries) CHECK(e >= 0.0);
      double two_n = 2.0 * p.n - p.beta;
      for (long k : {0L, 10L, 100L, 150L, 250L}) {
        double ref = oracle::negbin_tail(k + p.alpha + 1.0, p.rate() / two_n, 300);
        CHECK(std::fabs(P.row_deficits[static_cast<std::size_t>(k)] - ref) <= 1e-12);
        CHECK(std::fabs(negative_binomial_tail(p, k, 300) - ref) <= 1e-14 + 1e-12 * ref);
      }
    }
  }

  TEST_CASE("row deficits shrink as K grows") {
    OperatorParams p{10, 0.5, 2};
    TruncatedP small = build_P(p, 100);
    TruncatedP large = build_P(p, 200);
    for (long k = 0; k <= 100; k += 10)
      CHECK(large.row_deficits[static_cast<std::size_t>(k)] <= small.row_deficits[static_cast<std::size_t>(k)]);
    TruncatedP adaptive = build_P_adaptive(p);
    CHECK(adaptive.row_deficits[static_cast<std::size_t>(adaptive.K / 2)] <= 1e-12);
    // Row k has mean k n/(n - beta); once beta >= n/2 row K/2 reaches past K
    // for every K and the adaptive rule cannot succeed.
    CHECK(error_code([] { build_P_adaptive({10, 0, 6}, 512, 1e-12, 2000); }) == Errc::k_max_exceeded);
  }

  TEST_CASE("eigenvalues") {
    CHECK(eigenvalue({10, 0, 2}, Eigenpair::exponential) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(eigenvalue({10, 1, 2}, Eigenpair::exponential) == doctest::Approx(0.64).epsilon(1e-15));
    CHECK(eigenvalue({10, 1, 2}, Eigenpair::constant) == 1.0);
    CHECK(eigenvalue({10, 1, 0}, Eigenpair::exponential) == 1.0);
    oracle::Cases cases(1717);
    for (int i = 0; i < 50; ++i) {
      OperatorParams p{cases.uniform(1.0, 100.0), cases.uniform(-0.9, 3.0), 0.0};
      p.beta = cases.uniform(1e-6, p.n * (1.0 - 1e-6));
      double lambda = eigenvalue(p, Eigenpair::exponential);
      CHECK(lambda > 0.0);
      CHECK(lambda < 1.0);
    }
  }

  TEST_CASE("vector-level eigen checks") {
    TruncatedP P = build_P_adaptive({10, 0, 2});
    EigenCheck c1 = eigen_vector_check(P, Eigenpair::constant);
    CHECK(c1.passed);
    CHECK(*c1.vector_residual <= 1e-12);
    EigenCheck c2 = eigen_vector_check(P, Eigenpair::exponential);
    CHECK(c2.lambda == doctest::Approx(0.8));
    CHECK(*c2.vector_residual <= 1e-12);
    TruncatedP flat = build_P({10, 0, 0}, 64);
    CHECK(error_code([&] { eigen_vector_check(flat, Eigenpair::exponential); }) == Errc::eigen_precondition);
  }

  TEST_CASE("operator-level eigen checks") {
    std::vector<double> xs{0.0, 1.0, 2.5, 5.0};
    EigenCheck c = eigen_operator_check({10, 0, 2}, Eigenpair::exponential, xs);
    CHECK(c.passed);
    CHECK(*c.operator_residual <= 1e-8);
    CHECK(*eigen_operator_check({10, 0.5, 1}, Eigenpair::constant, xs).operator_residual <= 1e-12);
    EigenCheck degenerate = eigen_operator_check({10, 0, 0}, Eigenpair::exponential, xs);
    CHECK(degenerate.lambda == 1.0);
  }

  TEST_CASE("lift examples") {
    std::vector<double> ones(400, 1.0);
    CHECK(lift(ones, 1.3, 10.0) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> geometric(400);
    for (std::size_t j = 0; j < geometric.size(); ++j) geometric[j] = std::pow(0.8, static_cast<double>(j));
    CHECK(lift(geometric, 1.0, 10.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    std::vector<double> unit(400, 0.0);
    unit[0] = 1.0;
    CHECK(lift(unit, 0.0, 10.0) == 1.0);
    std::vector<double> bad{1.0, INFINITY};
    CHECK(error_code([&] { lift(bad, 0.0, 10.0); }) == Errc::unbounded_coefficients);
    std::vector<double> short_vector(5, 1.0);
    CHECK(error_code([&] { lift(short_vector, 10.0, 10.0); }) == Errc::k_max_exceeded);
  }

  TEST_CASE("operator acts on coefficients through P") {
    // M[Phi_v](x) = sum_k psi_k(nx) sum_j P_kj v_j, with P from the closed form.
    oracle::Cases cases(1818);
    for (int i = 0; i < 5; ++i) {
      OperatorParams p{cases.uniform(3.0, 20.0), cases.uniform(-0.5, 1.5), 0.0};
      p.beta = cases.uniform(0.0, 0.4 * p.n);
      TruncatedP P = build_P_adaptive(p);
      // Support of v kept short so the reference sum stays cheap.
      const long support = 48;
      std::vector<double> v(static_cast<std::size_t>(P.K + 1), 0.0);
      for (long j = 0; j <= support; ++j) v[static_cast<std::size_t>(j)] = cases.uniform(-1.0, 1.0);
      std::vector<double> Pv = P.apply(v);
      double x = cases.uniform(0.0, 2.0);
      double direct = 0.0;
      long k_hi = static_cast<long>(p.n * x + 30.0 * std::sqrt(p.n * x + 1.0) + 40.0);
      for (long k = 0; k <= k_hi; ++k) {
        double w = std::exp(poisson_weight_log(p.n, x, k));
        if (w < 1e-30) continue;
        double row = 0.0;
        for (long j = 0; j <= support; ++j) row += entry_reference(p, k, j) * v[static_cast<std::size_t>(j)];
        direct += w * row;
      }
      CHECK(std::fabs(lift(Pv, x, p.n) - direct) <= 1e-12);
    }
  }

  TEST_CASE("iterate decay follows powers of the eigenvalue") {
    IterateReport rep = iterate_decay({10, 0, 2}, 3, {0.0, 1.0, 2.0});
    REQUIRE(rep.steps.size() == 4);
    CHECK(rep.steps[0].max_deviation <= 1e-14);
    for (std::size_t i = 1; i < rep.steps.size(); ++i) {
      CHECK(*rep.steps[i].amplitude_ratio == doctest::Approx(0.8).epsilon(1e-9));
      CHECK(rep.steps[i].max_deviation <= rep.tolerance);
    }
    CHECK_FALSE(rep.truncation_dominated);
    CHECK(error_code([] { iterate_decay({10, 0, 0}, 2, {1.0}); }) == Errc::eigen_precondition);
  }
}
