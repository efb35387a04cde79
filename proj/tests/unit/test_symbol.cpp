#include <doctest.h>

#include <cmath>
#include <random>

#include "nontan/errors.hpp"
#include "nontan/symbol.hpp"

using namespace nontan;

TEST_SUITE("symbol") {
  TEST_CASE("power symbol values") {
    const PhaseSymbol s = power_symbol(2.0);
    const std::vector<double> w{1.0};
    CHECK(s.value(3.0, w) == doctest::Approx(9.0));
    CHECK(s.d1(3.0, w) == doctest::Approx(6.0));
    CHECK(s.d2(3.0, w) == doctest::Approx(2.0));
    CHECK(s.beta() == 1.0);
    CHECK(s.d1(s.R(), w) > 1.0);
    CHECK(power_symbol(1.5).d1(4.0, w) == doctest::Approx(3.0));
  }

  TEST_CASE("power symbol rejects a <= 1") {
    CHECK_THROWS_AS(power_symbol(1.0), ValidationError);
    CHECK_THROWS_AS(power_symbol(0.5), ValidationError);
  }

  TEST_CASE("admissibility of r^2") {
    const PhaseSymbol s = power_symbol(2.0);
    const AdmissibilityReport rep = check_admissibility(s, 1, 1e4, 101, 2);
    // r * 2 / (2r)^2 = 1/(2r), largest at the first grid radius
    double want = 0.0;
    for (double r : rep.r_grid) want = std::max(want, 1.0 / (2.0 * r));
    CHECK(rep.sup_ratio == doctest::Approx(want).epsilon(1e-12));
    CHECK(rep.sup_ratio <= 0.5);
    CHECK(rep.monotone_escape);
  }

  TEST_CASE("bounded derivative is rejected") {
    const PhaseSymbol flat("flat", [](double r, Direction) { return 0.5 * r; },
                           [](double, Direction) { return 0.5; }, [](double, Direction) { return 0.0; },
                           1.0, 1.0);
    CHECK_THROWS_AS(check_admissibility(flat, 1, 100.0, 10, 2), ValidationError);
  }

  TEST_CASE("grid ratio matches the analytic ratio for random exponents") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(1.05, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double a = ua(rng);
      const PhaseSymbol s = power_symbol(a);
      const AdmissibilityReport rep = check_admissibility(s, 2, 1e3, 33, 8);
      double want = 0.0;
      for (double r : rep.r_grid) {
        want = std::max(want, a * (a - 1) * r * std::pow(r, a - 2) / std::pow(a * std::pow(r, a - 1), 2));
      }
      CHECK(rep.sup_ratio == doctest::Approx(want).epsilon(1e-12));
    }
  }

  TEST_CASE("central differences converge at second order") {
    const std::vector<double> w{1.0};
    for (double a : {1.5, 2.0, 3.7}) {
      const PhaseSymbol s = power_symbol(a);
      for (double r : {2.0, 17.0, 300.0}) {
        auto err = [&](double h) {
          return std::abs((s.value(r + h, w) - s.value(r - h, w)) / (2 * h) - s.d1(r, w));
        };
        auto err2 = [&](double h) {
          return std::abs((s.d1(r + h, w) - s.d1(r - h, w)) / (2 * h) - s.d2(r, w));
        };
        const double h = r * 1e-2;
        const double order1 = std::log2(err(h) / err(h / 2));
        const double order2 = std::log2(err2(h) / err2(h / 2));
        if (a == 2.0) {  // both differences are exact up to rounding
          CHECK(err(h) <= 1e-10 * r);
          continue;
        }
        CHECK(order1 >= 1.9);
        CHECK(order2 >= 1.9);
      }
    }
  }

  TEST_CASE("log-domain derivative bounds agree with pointwise values") {
    PrecisionScope prec(256);
    const PhaseSymbol s = power_symbol(2.5);
    const std::vector<double> w{1.0};
    const double lo = std::log(10.0), hi = std::log(1e4);
    CHECK(to_double(s.log_inf_abs_d1(BigFloat(lo), BigFloat(hi), 1)) ==
          doctest::Approx(std::log(s.d1(10.0, w))).epsilon(1e-12));
    auto r0 = s.log_radius_d1_exceeds(BigFloat(std::log(50.0)), 1);
    REQUIRE(r0);
    CHECK(s.d1(std::exp(to_double(*r0)) * 1.0001, w) > 50.0);
  }

  TEST_CASE("sphere sampling") {
    CHECK(sample_sphere(1, 8).directions.size() == 2);
    const SphereGrid g = sample_sphere(2, 12);
    double total = 0.0;
    for (double wt : g.weights) total += wt;
    CHECK(total == doctest::Approx(2 * M_PI));
    for (const auto& d : sample_sphere(3, 6).directions) {
      CHECK(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] == doctest::Approx(1.0));
    }
  }
}
