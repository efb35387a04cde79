#include "nontan/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "nontan/errors.hpp"

namespace nontan {

namespace mp = boost::multiprecision;
using cplx = std::complex<double>;

namespace {

constexpr double kHalfPi = M_PI / 2.0;
constexpr double kMaxDirectLog = 300.0;   // r <= e^300 for any pointwise evaluation
constexpr double kPhaseNoise = 1e-6;      // tolerated absolute phase error
constexpr double kBoundSlack = 1e-12;     // covers rounding in bound evaluation
constexpr int kSignSamples = 513;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

template <unsigned N>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  Rule r;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wt[i]);
      continue;
    }
    r.x.push_back(-a[i]);
    r.w.push_back(wt[i]);
    r.x.push_back(a[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}

const Rule& rule16() {
  static const Rule r = make_rule<16>();
  return r;
}
const Rule& rule8() {
  static const Rule r = make_rule<8>();
  return r;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

BigFloat log_prefactor(int dim) {
  return mp::log(big_sphere_area(dim)) - BigFloat(dim) * mp::log(2 * big_pi());
}

double prefactor(int dim) { return std::pow(2.0 * M_PI, -dim); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct RadialPart {
  cplx value{0.0, 0.0};
  double est_error = 0.0;
  std::size_t panels = 0;
};

// int_a^b g(u) du for an integrand whose phase changes at rate |dphase/du|,
// with panels holding the phase change below pi/2 and a relative width cap.
RadialPart paneled(const std::function<cplx(double)>& g, const std::function<double(double)>& rate,
                   double a, double b) {
  RadialPart out;
  const Rule& r16 = rule16();
  const Rule& r8 = rule8();
  double u = a;
  while (u < b) {
    const double cap = std::max(0.5 * u, 1e-3);
    double h = std::min(cap, b - u);
    const double s0 = rate(u);
    if (s0 * h > kHalfPi) h = kHalfPi / s0;
    while (h > 1e-300 && std::max(s0, rate(u + h)) * h > kHalfPi) h *= 0.5;
    const bool last = h >= b - u;
    const double mid = u + h / 2.0;
    const double half = h / 2.0;
    cplx s16{0.0, 0.0};
    cplx s8{0.0, 0.0};
    for (std::size_t i = 0; i < r16.x.size(); ++i) s16 += r16.w[i] * g(mid + half * r16.x[i]);
    for (std::size_t i = 0; i < r8.x.size(); ++i) s8 += r8.w[i] * g(mid + half * r8.x[i]);
    out.value += half * s16;
    out.est_error += std::abs(half * (s16 - s8));
    ++out.panels;
    if (last) break;
    u += h;
  }
  return out;
}

// Panel count needed on one ray, estimated from the total phase variation.
double panel_estimate(const PhaseState& ps, double a, double b) {
  const double R = std::exp(a);
  const double Rp = std::exp(b);
  const double turns = std::abs(ps.F(Rp) - ps.F(R)) + std::abs(ps.dx_dot_omega()) * (Rp - R);
  return turns / kHalfPi + std::log2(std::max(b / std::max(a, 1e-3), 2.0)) * 2.0 + 1.0;
}

struct AngularSum {
  cplx value{0.0, 0.0};
  double est_error = 0.0;
  std::size_t panels = 0;
};

// (2pi)^{-d} sum over the sphere of per_omega(omega).
AngularSum angular(int dim, const std::function<RadialPart(const std::vector<double>&)>& per_omega,
                   const OscillatoryOptions& opt) {
  AngularSum out;
  if (dim == 1) {
    for (double w : {-1.0, 1.0}) {
      RadialPart r = per_omega({w});
      out.value += r.value;
      out.est_error += r.est_error;
      out.panels += r.panels;
    }
    out.value *= prefactor(1);
    out.est_error *= prefactor(1);
    return out;
  }
  if (dim != 2) throw NumericalRefusal("direct quadrature supports d = 1 and d = 2 only");
  int n = std::max(opt.n_omega, 4);
  auto node = [](int i, int count) {
    const double th = 2.0 * M_PI * i / count;
    return std::vector<double>{std::cos(th), std::sin(th)};
  };
  cplx raw{0.0, 0.0};
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    RadialPart r = per_omega(node(i, n));
    raw += r.value;
    err += r.est_error;
    out.panels += r.panels;
  }
  cplx S = raw * (2.0 * M_PI / n);
  double change = 0.0;
  for (;;) {
    if (2 * n > opt.max_omega) break;
    cplx odd{0.0, 0.0};
    for (int i = 1; i < 2 * n; i += 2) {
      RadialPart r = per_omega(node(i, 2 * n));
      odd += r.value;
      err += r.est_error;
      out.panels += r.panels;
    }
    const cplx S2 = S / 2.0 + odd * (2.0 * M_PI / (2 * n));
    change = std::abs(S2 - S);
    S = S2;
    n *= 2;
    if (change <= opt.angular_tol * std::max(std::abs(S), 1e-300)) break;
  }
  out.value = S * prefactor(2);
  out.est_error = (err * 2.0 * M_PI / n + change) * prefactor(2);
  return out;
}

void require_double_range(const AnnulusProblem& pb, const char* what) {
  if (pb.log_hi > kMaxDirectLog) {
    throw NumericalRefusal(std::string(what) + ": outer radius exp(" +
                           pb.log_hi.str(8) + ") is beyond the pointwise range");
  }
}

void check_budget(const AnnulusProblem& pb, const OscillatoryOptions& opt, double a, double b,
                  const char* what) {
  PhaseState ps{pb.dx, pb.dt, &pb.symbol, {}};
  double need = 0.0;
  const SphereGrid g = sample_sphere(pb.dim, std::max(opt.n_omega, 4));
  for (const auto& om : g.directions) {
    ps.omega = om;
    need = std::max(need, panel_estimate(ps, a, b));
  }
  need *= static_cast<double>(g.directions.size());
  if (!(need <= opt.panel_budget)) {
    throw NumericalRefusal(std::string(what) + " needs about " + fmt(need) +
                           " panels, budget is " + fmt(opt.panel_budget));
  }
}

// Whether F' keeps one strict sign on [a, b] for every sampled direction.
bool fprime_keeps_sign(const AnnulusProblem& pb, double a, double b, int n_omega) {
  PhaseState ps{pb.dx, pb.dt, &pb.symbol, {}};
  const SphereGrid g = sample_sphere(pb.dim, std::max(n_omega, 4));
  for (const auto& om : g.directions) {
    ps.omega = om;
    int sign = 0;
    for (int i = 0; i < kSignSamples; ++i) {
      const double u = a + (b - a) * i / (kSignSamples - 1);
      const double v = ps.dF(std::exp(u));
      const int sv = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (sv == 0) return false;
      if (sign == 0) sign = sv;
      if (sv != sign) return false;
    }
  }
  return true;
}

BigFloat with_slack(const BigFloat& lb) { return lb + mp::log1p(BigFloat(kBoundSlack)); }

}  // namespace

double PhaseState::dx_dot_omega() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dx.size(); ++i) s += dx[i] * omega[i];
  return s;
}

double PhaseState::F(double r) const { return r * dx_dot_omega() + dt * symbol->value(r, omega); }
double PhaseState::dF(double r) const { return dx_dot_omega() + dt * symbol->d1(r, omega); }
double PhaseState::d2F(double r) const { return dt * symbol->d2(r, omega); }

std::string method_name(Method m) {
  switch (m) {
    case Method::direct: return "direct";
    case Method::ibp: return "ibp";
    case Method::closed_form: return "closed_form";
    case Method::certified_bound: return "certified_bound";
  }
  return "unknown";
}

EvalPoint lattice_point(const Schedule& sch, std::size_t k) {
  return EvalPoint{sch.x(k), sch.t(k), k};
}

EvalPoint free_point(std::vector<double> x, double t) {
  return EvalPoint{std::move(x), exact_rational(t), std::nullopt};
}

AnnulusProblem annulus_problem(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                               const EvalPoint& at) {
  if (j < 1 || j > sch.annuli()) throw ValidationError("annulus index out of range");
  if (static_cast<int>(at.x.size()) != sch.dim()) throw ValidationError("point has wrong dimension");
  AnnulusProblem pb{sch.symbol, sch.dim(), spec.B, sch.log_inner(j), sch.log_outer(j), {}, 0.0,
                    false};
  if (at.lattice) {
    const auto xk = sch.x_big(*at.lattice);
    const auto xj = sch.x_big(j);
    for (std::size_t i = 0; i < xk.size(); ++i) pb.dx.push_back(to_double(BigFloat(xk[i] - xj[i])));
    pb.diagonal = *at.lattice == j;
  } else {
    const auto xj = sch.x(j);
    for (std::size_t i = 0; i < xj.size(); ++i) pb.dx.push_back(at.x[i] - xj[i]);
  }
  const Rational dt = at.t - sch.t(j);
  pb.dt = to_double(dt);
  if (!at.lattice) {
    pb.diagonal = dt == 0 && std::all_of(pb.dx.begin(), pb.dx.end(), [](double v) { return v == 0.0; });
  }
  return pb;
}

AnnulusProblem toy_annulus(const PhaseSymbol& s, double R, double Rp, std::vector<double> dx,
                           double dt, double B) {
  if (!(R > 1.0 && Rp > R)) throw ValidationError("toy annulus requires 1 < R < R'");
  const bool diag = dt == 0.0 && std::all_of(dx.begin(), dx.end(), [](double v) { return v == 0.0; });
  const int dim = static_cast<int>(dx.size());
  return AnnulusProblem{s, dim, B, BigFloat(std::log(R)), BigFloat(std::log(Rp)), std::move(dx), dt,
                        diag};
}

double resolve_growth_constant(const PhaseSymbol& s, int dim, const OscillatoryOptions& opt) {
  if (opt.growth_constant) return *opt.growth_constant;
  return check_admissibility(s, dim, s.R() * 1e6, 257, 16).C_measured;
}

BigFloat log_amplitude_majorant(const AnnulusProblem& pb) {
  const BigFloat one_b = BigFloat(1) - BigFloat(pb.B);
  const BigFloat span = mp::pow(pb.log_hi, one_b) - mp::pow(pb.log_lo, one_b);
  return log_prefactor(pb.dim) + mp::log(span / one_b);
}

std::optional<BigFloat> log_ibp_bound(const AnnulusProblem& pb, double C) {
  if (pb.dt == 0.0) return std::nullopt;
  const BigFloat& a = pb.log_lo;
  const BigFloat& b = pb.log_hi;
  const BigFloat B(pb.B);
  const BigFloat beta(pb.symbol.beta());
  const BigFloat log_dt = mp::log(BigFloat(std::abs(pb.dt)));
  const BigFloat log_phi_min = pb.symbol.log_inf_abs_d1(a, b, pb.dim);
  const BigFloat log_phi_a = pb.symbol.log_inf_abs_d1(a, a, pb.dim);
  const BigFloat log_phi_b = pb.symbol.log_inf_abs_d1(b, b, pb.dim);
  const BigFloat log_a = mp::log(a);
  const BigFloat log_b = mp::log(b);

  // Worst-case |dx . omega| against the sign of dt; in d = 1 each of the two
  // directions gets its own value.
  std::vector<std::pair<double, BigFloat>> rays;  // (|adverse dx.omega|, log weight)
  if (pb.dim == 1) {
    const double sgn = pb.dt > 0 ? 1.0 : -1.0;
    for (double w : {-1.0, 1.0}) rays.emplace_back(std::max(0.0, -sgn * pb.dx[0] * w), BigFloat(0));
  } else {
    rays.emplace_back(norm(pb.dx), mp::log(big_sphere_area(pb.dim)));
  }

  std::vector<BigFloat> terms;
  for (const auto& [adverse, log_w] : rays) {
    BigFloat theta = 0;
    if (adverse > 0) theta = mp::exp(mp::log(BigFloat(adverse)) - log_dt - log_phi_min);
    if (theta >= 1) return std::nullopt;
    const BigFloat log_1mt = mp::log1p(-theta);
    const BigFloat log_fl = log_1mt + log_dt;
    std::vector<BigFloat> parts;
    parts.push_back(-a - B * log_a - log_fl - log_phi_a);
    parts.push_back(-b - B * log_b - log_fl - log_phi_b);
    const BigFloat shrink1 = mp::log1p(-mp::exp(a - b));
    parts.push_back(mp::log1p(B / a) - B * log_a - log_fl - log_phi_min - a + shrink1);
    if (C > 0) {
      const BigFloat shrink2 = mp::log1p(-mp::exp(-beta * (b - a)));
      parts.push_back(mp::log(BigFloat(C)) - 2 * log_1mt - log_dt - B * log_a - beta * a + shrink2 -
                      mp::log(beta));
    }
    terms.push_back(log_w + log_sum(parts));
  }
  return BigFloat(-pb.dim) * mp::log(2 * big_pi()) + log_sum(terms);
}

BigFloat log_best_bound(const AnnulusProblem& pb, const OscillatoryOptions& opt) {
  BigFloat lb = log_amplitude_majorant(pb);
  if (!pb.diagonal && pb.dt != 0.0) {
    if (auto ib = log_ibp_bound(pb, resolve_growth_constant(pb.symbol, pb.dim, opt))) {
      lb = mp::min(lb, *ib);
    }
  }
  return with_slack(lb);
}

IntegralResult eval_direct(const AnnulusProblem& pb, const OscillatoryOptions& opt) {
  require_double_range(pb, "direct quadrature");
  const double a = to_double(pb.log_lo);
  const double b = to_double(pb.log_hi);
  check_budget(pb, opt, a, b, "direct quadrature");
  const double B = pb.B;
  auto per_omega = [&](const std::vector<double>& om) {
    PhaseState ps{pb.dx, pb.dt, &pb.symbol, om};
    auto g = [&](double u) {
      const double r = std::exp(u);
      return std::pow(u, -B) * std::polar(1.0, ps.F(r));
    };
    auto rate = [&](double u) {
      const double r = std::exp(u);
      return std::abs(r * ps.dF(r));
    };
    return paneled(g, rate, a, b);
  };
  AngularSum s = angular(pb.dim, per_omega, opt);
  IntegralResult res;
  res.value = s.value;
  res.method = Method::direct;
  res.panels = s.panels;
  res.est_error = s.est_error;
  res.log_abs_bound = log_best_bound(pb, opt);
  return res;
}

IntegralResult eval_ibp(const AnnulusProblem& pb, const OscillatoryOptions& opt) {
  if (pb.diagonal) throw NumericalRefusal("integration by parts needs F' != 0; F vanishes identically");
  const double C = resolve_growth_constant(pb.symbol, pb.dim, opt);
  const std::optional<BigFloat> ibp = log_ibp_bound(pb, C);
  const bool in_range = !(pb.log_hi > kMaxDirectLog);
  if (!ibp) {
    if (!in_range) throw NumericalRefusal("no lower bound for |F'| on an annulus beyond double range");
    if (!fprime_keeps_sign(pb, to_double(pb.log_lo), to_double(pb.log_hi), opt.n_omega)) {
      throw NumericalRefusal("F' changes sign on the annulus (stationary point); integration by parts refused");
    }
  }

  const double B = pb.B;
  const double a = in_range ? to_double(pb.log_lo) : 0.0;
  const double b = in_range ? to_double(pb.log_hi) : 0.0;

  bool remainder_fits = in_range;
  if (in_range) {
    try {
      check_budget(pb, opt, a, b, "ibp remainder");
    } catch (const NumericalRefusal&) {
      remainder_fits = false;
    }
  }
  if (!remainder_fits && !ibp) {
    throw NumericalRefusal("ibp remainder exceeds the panel budget and has no closed-form bound");
  }

  // |A bracket| at one endpoint, in the log domain, for the cases the
  // endpoint cannot be evaluated pointwise.
  const BigFloat log_dt = mp::log(BigFloat(std::abs(pb.dt)));
  auto log_bracket_bound = [&](const BigFloat& u) {
    const BigFloat lphi = pb.symbol.log_inf_abs_d1(u, u, pb.dim);
    const BigFloat theta = mp::exp(mp::log(BigFloat(norm(pb.dx) + 1e-300)) - log_dt - lphi);
    if (theta >= 1) throw NumericalRefusal("endpoint |F'| has no lower bound; bracket cannot be bounded");
    return -u - BigFloat(B) * mp::log(u) - mp::log1p(-theta) - log_dt - lphi;
  };

  auto per_omega = [&](const std::vector<double>& om) {
    PhaseState ps{pb.dx, pb.dt, &pb.symbol, om};
    RadialPart part;
    // A bracket: e^{iF}/(r L^B i F') from R to R'.
    auto endpoint = [&](const BigFloat& ubig, double sign) {
      const double u = to_double(ubig);
      if (u <= kMaxDirectLog) {
        const double r = std::exp(u);
        const double F = ps.F(r);
        if (std::abs(F) * 4e-16 <= kPhaseNoise) {
          const cplx term = std::polar(1.0, F) / (cplx(0.0, 1.0) * r * std::pow(u, B) * ps.dF(r));
          part.value += sign * term;
          return;
        }
        part.est_error += std::abs(1.0 / (r * std::pow(u, B) * ps.dF(r)));
        return;
      }
      part.est_error += to_double(mp::exp(log_bracket_bound(ubig)));
    };
    endpoint(pb.log_hi, 1.0);
    endpoint(pb.log_lo, -1.0);
    if (remainder_fits) {
      auto g = [&](double u) {
        const double r = std::exp(u);
        const double L = u;
        const double LB = std::pow(L, B);
        const double f1 = ps.dF(r);
        const double f2 = ps.d2F(r);
        const double den = r * LB * f1;
        const double D0 = -(LB * f1 + B * std::pow(L, B - 1.0) * f1 + r * LB * f2) / (den * den);
        return D0 * r * std::polar(1.0, ps.F(r)) / cplx(0.0, 1.0);
      };
      auto rate = [&](double u) {
        const double r = std::exp(u);
        return std::abs(r * ps.dF(r));
      };
      RadialPart rem = paneled(g, rate, a, b);
      part.value -= rem.value;
      part.est_error += rem.est_error;
      part.panels += rem.panels;
    }
    return part;
  };

  IntegralResult res;
  res.method = Method::ibp;
  if (pb.dim <= 2) {
    AngularSum s = angular(pb.dim, per_omega, opt);
    res.value = s.value;
    res.est_error = s.est_error;
    res.panels = s.panels;
  } else {
    throw NumericalRefusal("integration-by-parts evaluation supports d = 1 and d = 2 only");
  }
  if (!remainder_fits) {
    // The remainder is only bounded: take the whole IBP majorant as its error.
    res.est_error += to_double(mp::exp(*ibp));
  }
  res.log_abs_bound = log_best_bound(pb, opt);
  return res;
}

IntegralResult eval_bound(const AnnulusProblem& pb, const OscillatoryOptions& opt) {
  if (pb.diagonal) throw NumericalRefusal("bound mode needs F' bounded below; the point is on the diagonal");
  const auto ib = log_ibp_bound(pb, resolve_growth_constant(pb.symbol, pb.dim, opt));
  if (!ib) throw NumericalRefusal("lower bound for |F'| is not positive; no certificate possible");
  IntegralResult res;
  res.method = Method::certified_bound;
  res.log_abs_bound = with_slack(*ib);
  return res;
}

IntegralResult eval_Aj_direct(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                              const EvalPoint& at, const OscillatoryOptions& opt) {
  return eval_direct(annulus_problem(sch, spec, j, at), opt);
}

IntegralResult eval_Aj_ibp(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                           const EvalPoint& at, const OscillatoryOptions& opt) {
  return eval_ibp(annulus_problem(sch, spec, j, at), opt);
}

IntegralResult eval_Aj_bound(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                             const EvalPoint& at, const OscillatoryOptions& opt) {
  return eval_bound(annulus_problem(sch, spec, j, at), opt);
}

BigFloat diag_closed_form_big(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k) {
  if (k < 1 || k > sch.annuli()) throw ValidationError("annulus index out of range");
  const BigFloat one_b = BigFloat(1) - BigFloat(spec.B);
  const BigFloat span = mp::pow(sch.log_outer(k), one_b) - mp::pow(sch.log_inner(k), one_b);
  return mp::exp(log_prefactor(sch.dim())) * span / one_b;
}

double diag_closed_form(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k) {
  return to_double(diag_closed_form_big(sch, spec, k));
}

SumMode parse_sum_mode(const std::string& s) {
  if (s == "direct") return SumMode::direct;
  if (s == "ibp") return SumMode::ibp;
  if (s == "auto") return SumMode::automatic;
  throw ValidationError("unknown mode '" + s + "' (expected direct, ibp or auto)");
}

PartialSum partial_sum(const Schedule& sch, const CounterexampleSpec& spec, std::size_t m,
                       const EvalPoint& at, SumMode mode, const OscillatoryOptions& opt_in) {
  if (m > sch.annuli()) throw ValidationError("m exceeds the number of annuli in the schedule");
  OscillatoryOptions opt = opt_in;
  if (!opt.growth_constant) opt.growth_constant = resolve_growth_constant(sch.symbol, sch.dim(), opt);

  PartialSum out;
  out.log_abs_bound = neg_infinity();
  std::vector<BigFloat> bounds;
  for (std::size_t j = 1; j <= m; ++j) {
    const AnnulusProblem pb = annulus_problem(sch, spec, j, at);
    IntegralResult r;
    if (mode == SumMode::direct) {
      r = eval_direct(pb, opt);
    } else if (mode == SumMode::ibp) {
      r = eval_ibp(pb, opt);
    } else if (pb.diagonal) {
      r.method = Method::closed_form;
      r.value = cplx(to_double(diag_closed_form_big(sch, spec, j)), 0.0);
      r.log_abs_bound = with_slack(log_amplitude_majorant(pb));
    } else {
      bool done = false;
      try {
        r = eval_ibp(pb, opt);
        done = true;
      } catch (const NumericalRefusal&) {
      }
      if (!done) {
        try {
          r = eval_direct(pb, opt);
          done = true;
        } catch (const NumericalRefusal&) {
        }
      }
      if (!done) {
        r.method = Method::certified_bound;
        r.log_abs_bound = log_best_bound(pb, opt);
      }
    }
    if (r.value) {
      out.value += *r.value;
      out.est_error += r.est_error;
    } else {
      out.bracket = true;
      out.est_error += r.abs_bound();
    }
    bounds.push_back(r.log_abs_bound);
    out.per_j.push_back(std::move(r));
  }
  if (!bounds.empty()) out.log_abs_bound = log_sum(bounds);
  return out;
}

}  // namespace nontan
