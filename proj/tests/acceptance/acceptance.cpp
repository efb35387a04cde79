// Acceptance checks, one line per criterion. Usage: nontan_acceptance [id ...]
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nontan/certifier.hpp"
#include "nontan/counterexample.hpp"
#include "nontan/errors.hpp"
#include "nontan/oscillatory.hpp"
#include "nontan/schedule.hpp"

using namespace nontan;
namespace mp = boost::multiprecision;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

Schedule scenario_a(int N = 4, int k_max = 2) {
  ScheduleParams prm;
  prm.k_max = k_max;
  prm.radii.N = N;
  prm.radii.R1 = 3.0;
  prm.radii.relax = 1.0;
  return build_schedule(power_symbol(2.0), prm);
}

// 1. closed form vs direct quadrature on the diagonal, k = 1
Verdict criterion1() {
  const auto t0 = Clock::now();
  const Schedule sch = scenario_a();
  const CounterexampleSpec spec = single_spec(sch, 2.0, 0.75);
  const double closed = diag_closed_form(sch, spec, 1);
  const IntegralResult dir = eval_Aj_direct(sch, spec, 1, lattice_point(sch, 1));
  const double rel = std::abs(*dir.value - closed) / closed;
  const double secs = seconds_since(t0);
  return {rel <= 1e-10 && secs < 1.0 && std::abs(closed - 0.5401) <= 5e-4,
          "closed=" + num(closed, 12) + " rel_err=" + num(rel, 3) + " time=" + num(secs, 3) + "s"};
}

// 2. direct vs ibp on randomized toy annuli, plus bound soundness
Verdict criterion2() {
  const auto t0 = Clock::now();
  const PhaseSymbol s = power_symbol(2.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uR(3.0, 10.0), uw(0.0, 1.0), ux(-1.0, 1.0), ut(-0.2, 0.2);
  int trials = 0, agree = 0, sound = 0;
  double worst = 0.0;
  while (trials < 200) {
    const double R = uR(rng);
    const double Rp = R + (50.0 - R) * uw(rng);
    if (Rp < R * 1.01) continue;
    const double dx = ux(rng), dt = ut(rng);
    const bool slow = std::abs(dx) > 2 * std::abs(dt) * Rp + 0.05;
    const bool fast = 2 * std::abs(dt) * R > std::abs(dx) + 0.05;
    if (!slow && !fast) continue;
    ++trials;
    const AnnulusProblem pb = toy_annulus(s, R, Rp, {dx}, dt);
    const IntegralResult d = eval_direct(pb);
    const IntegralResult i = eval_ibp(pb);
    const double rel = std::abs(*d.value - *i.value) / std::abs(*d.value);
    worst = std::max(worst, rel);
    if (rel <= 1e-6) ++agree;
    if (std::abs(*d.value) <= d.abs_bound() && std::abs(*i.value) <= i.abs_bound()) ++sound;
  }
  const double secs = seconds_since(t0);
  return {agree == trials && sound == trials && secs < 60.0,
          "trials=" + std::to_string(trials) + " agree=" + std::to_string(agree) + " sound=" +
              std::to_string(sound) + " worst_rel=" + num(worst, 3) + " time=" + num(secs, 3) + "s"};
}

// 3. schedule validity with an independent rational oracle
Verdict criterion3() {
  const Schedule sch = scenario_a(4, 2);
  PrecisionScope prec(sch.precision_bits);
  const ScheduleReport rep = verify_schedule(sch);
  const std::size_t n = sch.size();

  // times and points rebuilt from the equal-spacing rule and the lattice
  std::vector<Rational> t, x;
  for (int k = 0; k <= 2; ++k) {
    const long long lim = (k + 1) * (k + 2);  // |z| / (k+2) < k+1
    std::vector<Rational> block;
    for (long long z = -lim; z <= lim; ++z) {
      if (std::llabs(z) < lim) block.push_back(Rational(z, k + 2));
    }
    const Rational hi(1, k + 1), lo(1, k + 2);
    const Rational step = (hi - lo) / Rational(static_cast<long long>(block.size()) + 1);
    for (std::size_t i = 0; i < block.size(); ++i) {
      x.push_back(block[i]);
      t.push_back(hi - Rational(static_cast<long long>(i) + 1) * step);
    }
  }
  bool times_match = t.size() == n;
  for (std::size_t i = 0; times_match && i < n; ++i) {
    times_match = t[i] == sch.times[i] && x[i] == (*sch.x_exact(i + 1))[0];
  }
  const bool demand_32 = Rational(4) / (t[0] - t[1]) == Rational(32);

  // 5a and 5b margins recomputed: R_j > 2^j / (t_l - t_j), 2 R_j > 2|x_l - x_j| / (t_l - t_j)
  BigFloat min5a = 1e9, min5b = 1e9;
  for (std::size_t j = 2; j <= n; ++j) {
    for (std::size_t l = 1; l < j; ++l) {
      const Rational gap = t[l - 1] - t[j - 1];
      const Rational rhs_a = Rational(BigInt(1) << j) / gap;
      const BigFloat ma = sch.log_inner(j) - mp::log(to_big(rhs_a));
      if (ma < min5a) min5a = ma;
      const Rational d = x[l - 1] > x[j - 1] ? x[l - 1] - x[j - 1] : x[j - 1] - x[l - 1];
      if (d == 0) continue;
      const Rational rhs_b = Rational(2) * d / gap;
      const BigFloat mb = mp::log(BigFloat(2)) + sch.log_inner(j) - mp::log(to_big(rhs_b));
      if (mb < min5b) min5b = mb;
    }
  }
  const BigFloat tol = mp::ldexp(BigFloat(1), -200);
  const bool oracle_match = mp::abs(rep.find("5a")->log_margin - min5a) < tol &&
                            mp::abs(rep.find("5b")->log_margin - min5b) < tol;

  bool margins = rep.ok();
  std::ostringstream detail;
  detail << "annuli=" << n;
  for (const char* id : {"1a", "1b", "2", "3", "4", "5a", "5b"}) {
    const ConditionMargin* m = rep.find(id);
    if (!m) {
      margins = false;
      continue;
    }
    // (1) and (2) are non-strict / equalities by construction: R_1 = 2 + R, R'_j = R_j^N
    const bool strict = std::string(id) == "3" || std::string(id) == "4" || std::string(id)[0] == '5';
    if (strict ? !(m->log_margin > 0) : !(m->log_margin >= 0 || std::string(id) == "2")) margins = false;
    if (std::string(id) == "2" && !m->satisfied) margins = false;
    detail << " " << id << "=" << num(m->margin(), 8);
  }
  detail << " oracle=" << (oracle_match && times_match ? "match" : "MISMATCH")
         << " 4/(t1-t2)=" << (demand_32 ? "32" : "?");
  return {margins && oracle_match && times_match && demand_32, detail.str()};
}

// 4. old terms below the majorant, diagonal above its lower bound
Verdict criterion4() {
  const Schedule sch = scenario_a();
  const CounterexampleSpec spec = single_spec(sch, 2.0, 0.75);
  PrecisionScope prec(sch.precision_bits);
  bool ok = true;
  int feasible = 0;
  std::ostringstream detail;
  for (std::size_t k = 2; k <= sch.annuli(); ++k) {
    const OldTermsCheck c = check_old_terms(sch, spec, k);
    if (!c.computed_sum) continue;
    ++feasible;
    ok = ok && *c.computed_sum <= c.majorant * (1 + 1e-9);
    detail << "k=" << k << ": " << num(*c.computed_sum, 4) << " <= " << num(c.majorant, 5) << "; ";
  }
  const BigFloat one_b = BigFloat(1) - BigFloat(spec.B);
  const BigFloat factor = (1 - mp::pow(BigFloat(sch.radii.N), -one_b)) * 2 / (2 * big_pi()) / one_b;
  std::size_t diag_ok = 0;
  for (std::size_t k = 1; k <= sch.annuli(); ++k) {
    const BigFloat lower = factor * mp::pow(sch.log_outer(k), one_b);
    if (diag_closed_form_big(sch, spec, k) * (1 + BigFloat(1e-9)) >= lower) ++diag_ok;
  }
  detail << "diag lower bound holds for " << diag_ok << "/" << sch.annuli() << " annuli";
  return {ok && feasible > 0 && diag_ok == sch.annuli(), detail.str()};
}

// 5. abs_bound * 2^j bounded by one constant for k = 2, j = 3..6
Verdict criterion5() {
  const auto t0 = Clock::now();
  const Schedule sch = scenario_a();
  const CounterexampleSpec spec = single_spec(sch, 2.0, 0.75);
  const DecayTable t = check_decay(sch, spec, 2, 3, 6);
  const double secs = seconds_since(t0);
  std::ostringstream detail;
  detail << "log(bound*2^j):";
  for (const auto& r : t.rows) detail << " j=" << r.j << ":" << num(to_double(r.log_scaled), 5);
  detail << " log(max/min)=" << num(to_double(t.log_spread), 5) << " (need < log 10)"
         << " time=" << num(secs, 3) << "s";
  return {t.bounded(10.0) && secs < 30.0, detail.str()};
}

// 6. divergence certificate with auto N; N = 2 negative control
Verdict criterion6() {
  const int N = choose_N(0.75);
  const Schedule sch = scenario_a(N);
  const CounterexampleSpec spec = single_spec(sch, 2.0, 0.75);
  CertificateOptions opt;
  opt.k_lo = 1;
  opt.k_hi = 3;
  opt.m = 8;
  const CertificateReport rep = divergence_certificate(sch, spec, opt);
  std::ostringstream detail;
  detail << "N=" << N << " L=";
  bool increasing = true;
  for (std::size_t i = 0; i < rep.per_k.size(); ++i) {
    detail << (i ? "," : "") << num(rep.per_k[i].L, 5);
    if (i > 0 && !(rep.per_k[i].L > rep.per_k[i - 1].L)) increasing = false;
  }
  bool positive = !rep.per_k.empty();
  for (const auto& r : rep.per_k) positive = positive && r.L > 0;
  detail << " c=" << num(rep.c_measured, 4);

  const Schedule weak = scenario_a(2);
  const CertificateReport neg = divergence_certificate(weak, spec, opt);
  bool old_dominant = false;
  for (const auto& r : neg.per_k) {
    if (r.L <= 0 && r.dominant == "old_terms") old_dominant = true;
  }
  detail << " | N=2 pass=" << (neg.pass ? "true" : "false") << " old_terms_dominant=" << (old_dominant ? "yes" : "no");
  return {rep.pass && positive && increasing && rep.c_measured > 0 && !neg.pass && old_dominant, detail.str()};
}

// 7. norm membership, divergence flag, mixed case
Verdict criterion7() {
  const Schedule sch = scenario_a();
  const CounterexampleSpec spec = single_spec(sch, 2.0, 0.75);
  const NormResult r = fl_norm(sch, spec, 0.5);
  bool partial_ok = !r.per_annulus.empty();
  double partial = 0.0;
  for (const auto& an : r.per_annulus) {
    const double next = partial + an.quadrature;
    partial_ok = partial_ok && next > partial && next <= r.total_bound;
    partial = next;
  }
  CounterexampleSpec low = spec;
  low.B = 0.25;
  const bool div_quarter = fl_norm(sch, low, 0.5).divergent;
  low.B = 0.5;
  const bool div_half = fl_norm(sch, low, 0.5).divergent;

  const MixedNormResult mixed = mixed_fl_norm(mixed_spec(1, 1, 3.0, 3.0, 3.0, 5.0 / 6.0, 0.5), 2.0 / 3.0, 2.0 / 3.0);
  bool rejected = false;
  std::string why;
  try {
    mixed_spec(1, 1, 3.0, 2.0, 2.0, 0.9, 0.5);
  } catch (const ValidationError& e) {
    why = e.what();
    rejected = why.find("1/p + 1/q < 1") != std::string::npos;
  }
  std::ostringstream detail;
  detail << "bound=" << num(r.total_bound) << " partial=" << num(partial) << " divergent(Bp=1/2,1)="
         << div_quarter << "," << div_half << " mixed_bound=" << num(mixed.total_bound) << " p=q=2: " << why;
  return {!r.divergent && std::isfinite(r.total_bound) && partial_ok && div_quarter && div_half &&
              std::isfinite(mixed.total_bound) && rejected,
          detail.str()};
}

// 8. convergence above the critical regularity
Verdict criterion8() {
  const ContrastReport rep = convergence_contrast(2.0, 0.6, 0.0, ApproachCurve::identity(), 6);
  std::ostringstream detail;
  detail << "errors:";
  for (const auto& r : rep.rows) detail << " " << num(r.sup_error, 3);
  detail << " holder_bound=" << num(rep.bound, 5);
  return {rep.rows.size() == 6 && rep.monotone && rep.final_error < 1e-3 && rep.holder_holds, detail.str()};
}

// 9. dense approach, decided in exact arithmetic
Verdict criterion9() {
  const int k_max = 6;
  const BlockLayout L = build_blocks(ApproachCurve::identity(), 1, k_max);
  const Schedule sch{L, power_symbol(2.0), assign_times(L), {}, {}, RadiiOptions{}, kDefaultPrecisionBits};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  int pairs = 0, good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x{ux(rng)};
    const int k0 = static_cast<int>(std::ceil(std::abs(x[0])));
    for (const auto& pr : dense_approach(sch, x, 0, k_max - k0 + 1)) {
      ++pairs;
      const Rational xn = (*sch.x_exact(pr.index))[0];
      const Rational diff = xn - exact_rational(x[0]);
      if (diff * diff < pr.time * pr.time && pr.time == sch.t(pr.index)) ++good;
    }
  }
  return {pairs > 0 && good == pairs, "pairs=" + std::to_string(pairs) + " exact_ok=" + std::to_string(good)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Verdict()>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (const auto& [id, f] : criteria) ids.push_back(id);
  }
  int failed = 0;
  for (int id : ids) {
    auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cout << "criterion " << id << ": FAIL unknown criterion\n";
      ++failed;
      continue;
    }
    Verdict v;
    try {
      v = it->second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
