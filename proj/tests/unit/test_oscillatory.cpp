#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <random>

#include "nontan/errors.hpp"
#include "nontan/oscillatory.hpp"

using namespace nontan;
namespace mp = boost::multiprecision;
using boost::math::quadrature::gauss_kronrod;
using cplx = std::complex<double>;

namespace {

Schedule scenario_a() {
  ScheduleParams prm;
  prm.k_max = 2;
  prm.radii.N = 4;
  return build_schedule(power_symbol(2.0), prm);
}

// (2pi)^{-1} sum_{omega = +-1} int_R^R' r^{-1} (log r)^{-B} e^{i(r dx omega + dt r^a)} dr,
// adaptive Gauss-Kronrod on many equal pieces of r.
cplx reference_d1(double R, double Rp, double dx, double dt, double B, double a = 2.0) {
  const int pieces = 400;
  cplx total = 0.0;
  for (double w : {1.0, -1.0}) {
    for (int part = 0; part < 2; ++part) {
      auto f = [&](double r) {
        const double ph = r * dx * w + dt * std::pow(r, a);
        const double amp = 1.0 / (r * std::pow(std::log(r), B));
        return amp * (part == 0 ? std::cos(ph) : std::sin(ph));
      };
      double acc = 0.0;
      for (int i = 0; i < pieces; ++i) {
        const double lo = R + (Rp - R) * i / pieces, hi = R + (Rp - R) * (i + 1) / pieces;
        acc += gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-14);
      }
      total += part == 0 ? cplx(acc, 0.0) : cplx(0.0, acc);
    }
  }
  return total / (2.0 * M_PI);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("oscillatory") {
  TEST_CASE("phase derivatives match central differences") {
    const PhaseSymbol s = power_symbol(2.5);
    PhaseState ps{{0.3}, 0.07, &s, {-1.0}};
    for (double r : {3.0, 7.5, 20.0}) {
      double prev1 = 0, prev2 = 0;
      for (int level = 0; level < 4; ++level) {
        const double h = 0.05 * std::ldexp(1.0, -level);
        const double e1 = std::abs((ps.F(r + h) - ps.F(r - h)) / (2 * h) - ps.dF(r));
        const double e2 = std::abs((ps.dF(r + h) - ps.dF(r - h)) / (2 * h) - ps.d2F(r));
        if (level > 0) {
          CHECK(std::log2(prev1 / e1) >= 1.9);
          CHECK(std::log2(prev2 / e2) >= 1.9);
        }
        prev1 = e1;
        prev2 = e2;
      }
    }
    CHECK(ps.dx_dot_omega() == doctest::Approx(-0.3));
    CHECK(ps.F(2.0) == doctest::Approx(-0.6 + 0.07 * std::pow(2.0, 2.5)));
  }

  TEST_CASE("diagonal closed form") {
    const Schedule sch = scenario_a();
    const CounterexampleSpec spec = single_spec(sch, 2.0);
    const double d1 = diag_closed_form(sch, spec, 1);
    const double want = (4.0 / M_PI) * (std::pow(std::log(81.0), 0.25) - std::pow(std::log(3.0), 0.25));
    CHECK(d1 == doctest::Approx(want).epsilon(1e-14));
    CHECK(d1 == doctest::Approx(0.5401).epsilon(5e-4));
    auto f = [](double r) { return 1.0 / (M_PI * r * std::pow(std::log(r), 0.75)); };
    CHECK(d1 == doctest::Approx(gauss_kronrod<double, 61>::integrate(f, 3.0, 81.0, 20, 1e-14)).epsilon(1e-12));

    const IntegralResult dir = eval_Aj_direct(sch, spec, 1, lattice_point(sch, 1));
    REQUIRE(dir.value);
    CHECK(std::abs(dir.value->real() - d1) / d1 <= 1e-10);
    CHECK(dir.value->imag() == 0.0);
    CHECK(dir.value->real() > 0.0);

    // with R' = R^N the value is sigma (2pi)^{-d} (1 - N^{B-1}) (log R'_k)^{1-B} / (1 - B)
    PrecisionScope prec(sch.precision_bits);
    for (std::size_t k = 2; k <= sch.annuli(); ++k) {
      const BigFloat lo = sch.log_outer(k);
      const BigFloat lower = (1 - mp::pow(BigFloat(4), BigFloat(-0.25))) * mp::pow(lo, BigFloat(0.25)) * 4 / big_pi();
      const BigFloat dk = diag_closed_form_big(sch, spec, k);
      CHECK(mp::abs(dk / lower - 1) < 1e-40);
    }
  }

  TEST_CASE("d = 2 diagonal against direct") {
    const AnnulusProblem pb = toy_annulus(power_symbol(2.0), 3.0, 40.0, {0.0, 0.0}, 0.0);
    CHECK(pb.dim == 2);
    CHECK(pb.diagonal);
    const IntegralResult r = eval_direct(pb);
    REQUIRE(r.value);
    const double want = (1.0 / (2.0 * M_PI)) * 4.0 * (std::pow(std::log(40.0), 0.25) - std::pow(std::log(3.0), 0.25));
    CHECK(r.value->real() == doctest::Approx(want).epsilon(1e-10));
    CHECK(to_double(mp::exp(log_amplitude_majorant(pb))) == doctest::Approx(want).epsilon(1e-12));
  }

  TEST_CASE("toy annulus: direct, ibp and an independent rule") {
    const PhaseSymbol s = power_symbol(2.0);
    const AnnulusProblem pb = toy_annulus(s, 3.0, 10.0, {0.2}, 0.05);
    const IntegralResult d = eval_direct(pb);
    const IntegralResult i = eval_ibp(pb);
    REQUIRE(d.value);
    REQUIRE(i.value);
    CHECK(d.method == Method::direct);
    CHECK(i.method == Method::ibp);
    CHECK(rel(*d.value, *i.value) <= 1e-6);
    CHECK(rel(*d.value, reference_d1(3.0, 10.0, 0.2, 0.05, 0.75)) <= 1e-9);
    CHECK(std::abs(*d.value) <= d.abs_bound());
    CHECK(d.panels > 0);
  }

  TEST_CASE("randomized toy annuli: agreement and soundness") {
    const PhaseSymbol s = power_symbol(2.0);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> uR(3.0, 10.0), uw(0.0, 1.0), ux(-1.0, 1.0), ut(-0.2, 0.2);
    int agreed = 0, trials = 0;
    while (trials < 1000) {
      const double R = uR(rng);
      const double Rp = R + (50.0 - R) * uw(rng);
      if (Rp < R * 1.01) continue;
      const double dx = ux(rng), dt = ut(rng);
      // no stationary point: |dx| stays away from 2|dt| r on [R, R']
      const bool slow = std::abs(dx) > 2 * std::abs(dt) * Rp + 0.05;
      const bool fast = 2 * std::abs(dt) * R > std::abs(dx) + 0.05;
      if (!slow && !fast) continue;
      ++trials;
      const AnnulusProblem pb = toy_annulus(s, R, Rp, {dx}, dt);
      const IntegralResult d = eval_direct(pb);
      REQUIRE(d.value);
      CHECK(std::abs(*d.value) <= d.abs_bound() * (1 + 1e-9));
      if (trials <= 150) {
        const IntegralResult i = eval_ibp(pb);
        REQUIRE(i.value);
        CHECK(std::abs(*i.value) <= i.abs_bound() * (1 + 1e-9));
        if (rel(*d.value, *i.value) <= 1e-6) ++agreed;
        else MESSAGE("R=" << R << " R'=" << Rp << " dx=" << dx << " dt=" << dt);
      }
    }
    CHECK(agreed == 150);
  }

  TEST_CASE("d = 2 toy annulus") {
    const AnnulusProblem pb = toy_annulus(power_symbol(2.0), 3.0, 8.0, {0.3, -0.2}, 0.1);
    const IntegralResult d = eval_direct(pb);
    const IntegralResult i = eval_ibp(pb);
    REQUIRE(d.value);
    REQUIRE(i.value);
    CHECK(rel(*d.value, *i.value) <= 1e-6);
    CHECK(std::abs(*d.value) <= d.abs_bound());
  }

  TEST_CASE("conjugate symmetry and real values") {
    const PhaseSymbol s = power_symbol(2.0);
    const IntegralResult a = eval_direct(toy_annulus(s, 4.0, 12.0, {0.4}, 0.03));
    const IntegralResult b = eval_direct(toy_annulus(s, 4.0, 12.0, {-0.4}, -0.03));
    CHECK(rel(*a.value, std::conj(*b.value)) < 1e-12);
    const IntegralResult c = eval_direct(toy_annulus(s, 4.0, 12.0, {0.7}, 0.0));
    CHECK(std::abs(c.value->imag()) < 1e-14);
    const IntegralResult ci = eval_ibp(toy_annulus(s, 4.0, 12.0, {0.7}, 0.0));
    CHECK(rel(*c.value, *ci.value) <= 1e-6);
  }

  TEST_CASE("refusals") {
    const PhaseSymbol s = power_symbol(2.0);
    // stationary point at r = 5
    CHECK_THROWS_AS(eval_ibp(toy_annulus(s, 3.0, 10.0, {1.0}, -0.1)), NumericalRefusal);
    OscillatoryOptions opt;
    opt.panel_budget = 1e4;
    CHECK_THROWS_WITH_AS(eval_direct(toy_annulus(s, 3.0, 1e6, {0.0}, 0.2), opt), doctest::Contains("panel"),
                         NumericalRefusal);
    CHECK_THROWS_AS(eval_bound(toy_annulus(s, 3.0, 10.0, {0.0}, 0.0)), NumericalRefusal);
  }

  TEST_CASE("scenario A off-diagonal terms") {
    const Schedule sch = scenario_a();
    const CounterexampleSpec spec = single_spec(sch, 2.0);
    const EvalPoint at2 = lattice_point(sch, 2);
    const IntegralResult d = eval_Aj_direct(sch, spec, 1, at2);
    const IntegralResult i = eval_Aj_ibp(sch, spec, 1, at2);
    REQUIRE(d.value);
    REQUIRE(i.value);
    CHECK(rel(*d.value, *i.value) <= 1e-8);
    CHECK(std::abs(*d.value) <= eval_Aj_bound(sch, spec, 1, at2).abs_bound());

    // j = 3 seen from (x_1, t_1), and j = 5 entirely in the log domain
    const EvalPoint at1 = lattice_point(sch, 1);
    PrecisionScope prec(sch.precision_bits);
    const IntegralResult b3 = eval_Aj_bound(sch, spec, 3, at1);
    CHECK(b3.method == Method::certified_bound);
    CHECK_FALSE(b3.value);
    CHECK(b3.log_abs_bound < log_amplitude_majorant(annulus_problem(sch, spec, 3, at1)));
    const IntegralResult b5 = eval_Aj_bound(sch, spec, 5, at1);
    CHECK(mp::isfinite(b5.log_abs_bound));
    CHECK(to_double(b5.log_abs_bound) < -5 * std::log(2.0));
    CHECK_THROWS_AS(eval_Aj_direct(sch, spec, 5, at1), NumericalRefusal);
  }

  TEST_CASE("partial sums") {
    const Schedule sch = scenario_a();
    const CounterexampleSpec spec = single_spec(sch, 2.0);
    const EvalPoint at2 = lattice_point(sch, 2);
    const PartialSum ps = partial_sum(sch, spec, 2, at2, SumMode::automatic);
    REQUIRE(ps.per_j.size() == 2);
    CHECK(ps.per_j[0].method == Method::ibp);
    CHECK(ps.per_j[1].method == Method::closed_form);
    CHECK_FALSE(ps.bracket);
    const cplx want = *eval_Aj_direct(sch, spec, 1, at2).value + diag_closed_form(sch, spec, 2);
    CHECK(rel(ps.value, want) < 1e-8);
    CHECK(std::abs(ps.value) <= ps.abs_bound());

    const PartialSum empty = partial_sum(sch, spec, 0, at2, SumMode::automatic);
    CHECK(empty.value == cplx(0.0));
    CHECK(empty.per_j.empty());

    // far annuli degrade to a bracket
    const PartialSum far = partial_sum(sch, spec, 6, lattice_point(sch, 1), SumMode::automatic);
    CHECK(far.per_j.size() == 6);
    CHECK(far.per_j[0].method == Method::closed_form);
    CHECK(std::abs(far.value) <= far.abs_bound() + far.est_error);
    CHECK_THROWS_AS(parse_sum_mode("fast"), ValidationError);
    CHECK(parse_sum_mode("auto") == SumMode::automatic);
  }
}
