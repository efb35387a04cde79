#include "nontan/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nontan/errors.hpp"

namespace nontan {

namespace mp = boost::multiprecision;
using cplx = std::complex<double>;

namespace {

constexpr double kComputedTol = 1e-8;  // quadrature error below which a value counts as computed

BigFloat log_prefactor(int dim) {
  return mp::log(big_sphere_area(dim)) - BigFloat(dim) * mp::log(2 * big_pi());
}

double exp_double(const BigFloat& v) { return to_double(mp::exp(v)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// |A_j(x_k, t_k)| + error when fully computable, else empty.
std::optional<double> computed_abs(const AnnulusProblem& pb, const OscillatoryOptions& opt,
                                   IntegralResult& out) {
  try {
    out = eval_ibp(pb, opt);
  } catch (const NumericalRefusal&) {
    try {
      out = eval_direct(pb, opt);
    } catch (const NumericalRefusal&) {
      out = IntegralResult{};
      out.log_abs_bound = log_best_bound(pb, opt);
      return std::nullopt;
    }
  }
  if (!out.value || !(out.est_error <= kComputedTol)) return std::nullopt;
  return std::abs(*out.value) + out.est_error;
}

// log abs_bound of A_j(x_k, t_k), falling back to the amplitude majorant.
BigFloat decay_log_bound(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                         std::size_t k, const OscillatoryOptions& opt, bool& fallback) {
  const AnnulusProblem pb = annulus_problem(sch, spec, j, lattice_point(sch, k));
  try {
    return eval_bound(pb, opt).log_abs_bound;
  } catch (const NumericalRefusal&) {
    fallback = true;
    return log_amplitude_majorant(pb);
  }
}

}  // namespace

double old_terms_majorant(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k) {
  PrecisionScope prec(sch.precision_bits);
  if (k < 2 || k > sch.annuli() + 1) throw ValidationError("old-terms bound needs 2 <= k <= annuli + 1");
  const BigFloat one_b = BigFloat(1) - BigFloat(spec.B);
  const BigFloat span = mp::pow(sch.log_outer(k - 1), one_b) - mp::pow(mp::log(BigFloat(2)), one_b);
  return to_double(mp::exp(log_prefactor(sch.dim())) * span / one_b);
}

OldTermsCheck check_old_terms(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k,
                              const OscillatoryOptions& opt_in) {
  PrecisionScope prec(sch.precision_bits);
  OscillatoryOptions opt = opt_in;
  if (!opt.growth_constant) opt.growth_constant = resolve_growth_constant(sch.symbol, sch.dim(), opt);
  OldTermsCheck out;
  out.k = k;
  out.majorant = old_terms_majorant(sch, spec, k);
  double sum = 0.0;
  bool all = true;
  const EvalPoint at = lattice_point(sch, k);
  for (std::size_t j = 1; j < k; ++j) {
    IntegralResult r;
    const auto v = computed_abs(annulus_problem(sch, spec, j, at), opt, r);
    if (v) {
      sum += *v;
    } else {
      all = false;
    }
    out.per_j.push_back(std::move(r));
  }
  if (all) {
    out.computed_sum = sum;
    out.holds = sum <= out.majorant * (1.0 + kCertificateSlack);
  }
  return out;
}

FprimeCheck check_fprime_lower(const Schedule& sch, std::size_t j, std::size_t k, int n_r,
                               int n_omega) {
  const auto xk = sch.x_big(k);
  const auto xj = sch.x_big(j);
  std::vector<double> dx;
  for (std::size_t i = 0; i < xk.size(); ++i) dx.push_back(to_double(BigFloat(xk[i] - xj[i])));
  return check_fprime_lower(sch, j, k, dx, n_r, n_omega);
}

FprimeCheck check_fprime_lower(const Schedule& sch, std::size_t j, std::size_t k,
                               const std::vector<double>& dx, int n_r, int n_omega) {
  if (!(j > k)) throw ValidationError("check_fprime_lower needs j > k");
  if (n_r < 2) throw ValidationError("n_r must be >= 2");
  const Rational dtq = sch.t(k) - sch.t(j);
  const BigFloat log_dt = mp::log(to_big(dtq));
  const BigFloat& a = sch.log_inner(j);
  const BigFloat& b = sch.log_outer(j);
  const SphereGrid g = sample_sphere(sch.dim(), n_omega);
  FprimeCheck out;
  out.j = j;
  out.k = k;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& om : g.directions) {
    double dot = 0.0;
    for (std::size_t i = 0; i < dx.size(); ++i) dot += dx[i] * om[i];
    for (int i = 0; i < n_r; ++i) {
      const BigFloat u = a + (b - a) * BigFloat(i) / BigFloat(n_r - 1);
      // F' / (dt phi') = 1 + dot / (dt phi'), ratio = 2 |that|
      BigFloat q;
      if (u <= 690) {
        const double r = std::exp(to_double(u));
        const double d1 = sch.symbol.d1(r, om);
        q = BigFloat(dot) / (to_big(dtq) * BigFloat(d1));
      } else {
        // phi' is known in magnitude only: take the adverse sign
        const BigFloat lphi = sch.symbol.log_inf_abs_d1(u, u, sch.dim());
        q = dot == 0.0 ? BigFloat(0) : -mp::exp(mp::log(BigFloat(std::abs(dot))) - log_dt - lphi);
      }
      out.min_ratio = std::min(out.min_ratio, to_double(2 * mp::abs(1 + q)));
    }
  }
  out.ok = out.min_ratio >= 1.0;
  return out;
}

double DecayTable::C_measured() const { return exp_double(log_C); }
double DecayTable::spread() const { return exp_double(log_spread); }
bool DecayTable::bounded(double max_spread) const {
  return log_spread < mp::log(BigFloat(max_spread));
}

DecayTable check_decay(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k,
                       std::size_t j_lo, std::size_t j_hi, const OscillatoryOptions& opt_in) {
  PrecisionScope prec(sch.precision_bits);
  if (!(j_lo > k) || j_hi < j_lo) throw ValidationError("check_decay needs k < j_lo <= j_hi");
  if (j_hi > sch.annuli()) throw ValidationError("check_decay range exceeds the schedule");
  OscillatoryOptions opt = opt_in;
  if (!opt.growth_constant) opt.growth_constant = resolve_growth_constant(sch.symbol, sch.dim(), opt);
  DecayTable t;
  t.k = k;
  const EvalPoint at = lattice_point(sch, k);
  const BigFloat log2 = mp::log(BigFloat(2));
  BigFloat lo = std::numeric_limits<double>::infinity();
  BigFloat hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    DecayRow row;
    row.j = j;
    row.log_bound = eval_bound(annulus_problem(sch, spec, j, at), opt).log_abs_bound;
    row.log_scaled = row.log_bound + BigFloat(j) * log2;
    lo = mp::min(lo, row.log_scaled);
    hi = mp::max(hi, row.log_scaled);
    t.rows.push_back(std::move(row));
  }
  t.log_C = hi;
  t.log_spread = hi - lo;
  return t;
}

CertificateReport divergence_certificate(const Schedule& sch, const CounterexampleSpec& spec,
                                         const CertificateOptions& opt_in) {
  CertificateOptions opt = opt_in;
  if (opt.k_lo < 1 || opt.k_hi < opt.k_lo) throw ValidationError("k range must satisfy 1 <= k_lo <= k_hi");
  if (!(opt.m > opt.k_hi)) throw ValidationError("m must exceed the largest k");
  if (opt.m > sch.annuli()) throw ValidationError("m exceeds the number of annuli in the schedule");
  if (!opt.osc.growth_constant) {
    opt.osc.growth_constant = resolve_growth_constant(sch.symbol, sch.dim(), opt.osc);
  }
  PrecisionScope prec(sch.precision_bits);

  CertificateReport rep;
  rep.m = opt.m;
  rep.mode = sch.radii.relax == 1.0 ? "strict" : "relaxed(" + fmt(sch.radii.relax) + ")";
  const std::size_t tail_end = std::min(sch.annuli(), opt.m + opt.tail_terms);
  rep.tail_terms = tail_end - opt.m;
  const double one_b = 1.0 - spec.B;
  const BigFloat log2 = mp::log(BigFloat(2));
  BigFloat log_C = neg_infinity();

  for (std::size_t k = opt.k_lo; k <= opt.k_hi; ++k) {
    CertificateRow row;
    row.k = k;
    row.log_outer = to_double(sch.log_outer(k));
    row.diag = diag_closed_form(sch, spec, k);
    if (k >= 2) {
      row.old_terms = old_terms_majorant(sch, spec, k);
      const double scale = std::pow(to_double(sch.log_outer(k - 1)), one_b);
      rep.C_prime_measured = std::max(rep.C_prime_measured, row.old_terms / scale);
    }
    bool fallback = false;
    std::vector<BigFloat> decay;
    for (std::size_t j = k + 1; j <= opt.m; ++j) {
      decay.push_back(decay_log_bound(sch, spec, j, k, opt.osc, fallback));
      if (!fallback) log_C = mp::max(log_C, decay.back() + BigFloat(j) * log2);
    }
    row.decay = decay.empty() ? 0.0 : exp_double(log_sum(decay));

    std::vector<BigFloat> tail;
    for (std::size_t j = opt.m + 1; j <= tail_end; ++j) {
      tail.push_back(decay_log_bound(sch, spec, j, k, opt.osc, fallback));
    }
    if (tail.size() < 2) {
      row.tail = std::numeric_limits<double>::infinity();
      row.notes.push_back("too few annuli beyond m for the tail estimate");
    } else {
      BigFloat log_ratio = tail[1] - tail[0];
      for (std::size_t i = 2; i < tail.size(); ++i) log_ratio = mp::max(log_ratio, tail[i] - tail[i - 1]);
      if (log_ratio >= 0) {
        row.tail = std::numeric_limits<double>::infinity();
        row.notes.push_back("tail bounds are not decreasing; no geometric extrapolation");
      } else {
        const BigFloat rho = mp::exp(log_ratio);
        const BigFloat extra = tail.back() + log_ratio - mp::log1p(-rho);
        tail.push_back(extra);
        row.tail = exp_double(log_sum(tail));
      }
    }
    if (fallback) row.notes.push_back("some |F'| lower bound failed; amplitude majorant used there");

    const double pos = row.diag / (1.0 + kCertificateSlack);
    const double neg = (row.old_terms + row.decay + row.tail) * (1.0 + kCertificateSlack);
    row.L = pos - neg;
    if (row.old_terms >= row.decay && row.old_terms >= row.tail) {
      row.dominant = "old_terms";
    } else if (row.decay >= row.tail) {
      row.dominant = "decay";
    } else {
      row.dominant = "tail";
    }
    rep.per_k.push_back(std::move(row));
  }
  rep.C_measured = exp_double(log_C);

  rep.positive = std::all_of(rep.per_k.begin(), rep.per_k.end(), [](const auto& r) { return r.L > 0; });
  rep.increasing = true;
  for (std::size_t i = 1; i < rep.per_k.size(); ++i) {
    if (!(rep.per_k[i].L > rep.per_k[i - 1].L)) rep.increasing = false;
  }
  rep.c_measured = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.per_k) rep.c_measured = std::min(rep.c_measured, r.L / std::pow(r.log_outer, one_b));
  for (auto& r : rep.per_k) r.threshold = rep.c_measured * std::pow(r.log_outer, one_b);
  rep.pass = rep.positive && rep.increasing && rep.c_measured > 0;

  std::vector<double> origin(static_cast<std::size_t>(sch.dim()), 0.0);
  const int blocks = sch.layout.block_count();
  if (blocks > 0) rep.approach = dense_approach(sch, origin, 0, blocks);

  if (!rep.pass) {
    std::ostringstream d;
    for (const auto& r : rep.per_k) {
      if (r.L <= 0) {
        d << "L_" << r.k << " = " << fmt(r.L) << " <= 0, dominated by " << r.dominant << " ("
          << fmt(r.dominant == "old_terms" ? r.old_terms : (r.dominant == "decay" ? r.decay : r.tail))
          << " against diag " << fmt(r.diag) << "); ";
      }
    }
    if (!rep.increasing) d << "L_k is not strictly increasing; ";
    if (rep.per_k.size() > 0 && rep.per_k.back().dominant == "old_terms") {
      d << "the old-terms bound carries the factor N^{B-1} relative to diag; increase N";
    }
    rep.diagnosis = d.str();
  }
  return rep;
}

ContinuityReport continuity_check(const Schedule& sch, const CounterexampleSpec& spec,
                                  const Box& box, const ContinuityOptions& opt_in) {
  if (!(box.t_lo > 0.0)) throw ValidationError("continuity box needs t_min > 0");
  if (!(box.t_hi > box.t_lo) || !(box.x_hi > box.x_lo)) throw ValidationError("empty continuity box");
  if (sch.dim() != 1) throw ValidationError("continuity_check samples d = 1 boxes only");
  if (opt_in.m_lo < 1 || opt_in.m_hi < opt_in.m_lo) throw ValidationError("bad m range");
  if (opt_in.m_hi + 1 > sch.annuli()) throw ValidationError("m range exceeds the schedule");
  if (opt_in.grid < 2) throw ValidationError("grid needs at least 2 nodes per axis");
  ContinuityOptions opt = opt_in;
  if (!opt.osc.growth_constant) {
    opt.osc.growth_constant = resolve_growth_constant(sch.symbol, sch.dim(), opt.osc);
  }
  PrecisionScope prec(sch.precision_bits);
  ContinuityReport rep;

  auto node = [&](int n, int ix, int it) {
    const double x = box.x_lo + (box.x_hi - box.x_lo) * ix / (n - 1);
    const double t = box.t_lo + (box.t_hi - box.t_lo) * it / (n - 1);
    return free_point({x}, t);
  };

  // |S_{m+1} - S_m| = |A_{m+1}| against its bound, node by node.
  const int n0 = opt.grid;
  for (std::size_t m = opt.m_lo; m <= opt.m_hi; ++m) {
    ContinuityRow row;
    row.m = m;
    for (int ix = 0; ix < n0; ++ix) {
      for (int it = 0; it < n0; ++it) {
        const AnnulusProblem pb = annulus_problem(sch, spec, m + 1, node(n0, ix, it));
        IntegralResult r;
        const auto v = computed_abs(pb, opt.osc, r);
        const double bound = r.value ? r.abs_bound() : exp_double(log_best_bound(pb, opt.osc));
        row.sup_bound = std::max(row.sup_bound, bound);
        if (v) {
          ++row.computed;
          const double a = std::abs(*r.value);
          row.sup_difference = std::max(row.sup_difference, a);
          if (!(a <= bound + r.est_error)) row.ok = false;
        }
      }
    }
    rep.rows.push_back(row);
  }

  // Modulus of continuity of S_{m_lo} on successively refined grids.
  int n = n0;
  for (int level = 0; level <= opt.refinements; ++level) {
    std::vector<std::vector<cplx>> S(n, std::vector<cplx>(n));
    for (int ix = 0; ix < n; ++ix) {
      for (int it = 0; it < n; ++it) {
        S[ix][it] = partial_sum(sch, spec, opt.m_lo, node(n, ix, it), SumMode::automatic, opt.osc).value;
      }
    }
    double mod = 0.0;
    for (int ix = 0; ix < n; ++ix) {
      for (int it = 0; it < n; ++it) {
        if (ix + 1 < n) mod = std::max(mod, std::abs(S[ix + 1][it] - S[ix][it]));
        if (it + 1 < n) mod = std::max(mod, std::abs(S[ix][it + 1] - S[ix][it]));
      }
    }
    rep.modulus.push_back(mod);
    n = 2 * n - 1;
  }

  // Summability window: the first annuli after m_hi whose times lie below the box.
  std::size_t start = 0;
  for (std::size_t j = opt.m_hi + 1; j <= sch.annuli(); ++j) {
    if (sch.t_double(j) < box.t_lo) {
      start = j;
      break;
    }
  }
  rep.tail_start = start;
  if (start == 0 || start + opt.window - 1 > sch.annuli()) {
    rep.detail = "schedule has too few annuli with t_j below the box for the summability window";
  } else {
    bool ok = true;
    for (std::size_t j = start; j < start + opt.window && ok; ++j) {
      BigFloat sup = neg_infinity();
      for (int ix = 0; ix < n0 && ok; ++ix) {
        for (int it = 0; it < n0; ++it) {
          const AnnulusProblem pb = annulus_problem(sch, spec, j, node(n0, ix, it));
          const auto ib = log_ibp_bound(pb, *opt.osc.growth_constant);
          if (!ib) {
            ok = false;
            rep.detail = "no |F'| lower bound at annulus " + std::to_string(j);
            break;
          }
          sup = mp::max(sup, *ib);
        }
      }
      rep.tail_log_bounds.push_back(to_double(sup));
    }
    if (ok) {
      rep.summable = true;
      // geometric: every ratio of consecutive sup bounds at most 1/2
      for (std::size_t i = 1; i < rep.tail_log_bounds.size(); ++i) {
        if (!(rep.tail_log_bounds[i] - rep.tail_log_bounds[i - 1] <= -std::log(2.0))) rep.summable = false;
      }
      if (!rep.summable) rep.detail = "window bounds do not decay geometrically";
    }
  }

  bool rows_ok = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.ok; });
  rep.pass = rows_ok && rep.summable;
  return rep;
}

double weight_norm(double p, double s, int d) {
  if (!(p >= 1.0)) throw ValidationError("p >= 1 required");
  if (p == 1.0) return s >= 0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double sigma = sphere_area(d);
  // L^{p'} norm of <xi>^{-s}; p' = 1 when p = infinity
  const double pp = std::isinf(p) ? 1.0 : p / (p - 1.0);
  const double alpha = s * pp / 2.0;  // integrand (1 + r^2)^{-alpha} r^{d-1}
  if (!(2.0 * alpha > d)) return std::numeric_limits<double>::infinity();
  boost::math::quadrature::tanh_sinh<double> ts;
  auto inner = [&](double r) { return std::pow(1.0 + r * r, -alpha) * std::pow(r, d - 1); };
  // r = 1/v on [1, inf)
  auto outer = [&](double v) {
    return v > 0 ? std::pow(1.0 + v * v, -alpha) * std::pow(v, 2.0 * alpha - d - 1.0) : 0.0;
  };
  const double I = sigma * (ts.integrate(inner, 0.0, 1.0) + ts.integrate(outer, 0.0, 1.0));
  return std::pow(I, 1.0 / pp);
}

std::complex<double> gaussian_propagator(double y, double t, double a) {
  // (2pi)^{-1} int e^{i(y xi + t |xi|^a)} sqrt(2pi) e^{-xi^2/2} dxi over |xi| <= 40
  using G = boost::math::quadrature::gauss<double, 20>;
  const double L = 40.0;
  const int panels = 640;
  const double h = 2.0 * L / panels;
  cplx sum{0.0, 0.0};
  for (int i = 0; i < panels; ++i) {
    const double mid = -L + (i + 0.5) * h;
    auto f = [&](double xi) {
      return std::exp(-xi * xi / 2.0) * std::polar(1.0, y * xi + t * std::pow(std::abs(xi), a));
    };
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double off = h / 2.0 * x[k];
      if (x[k] == 0.0) {
        sum += w[k] * f(mid);
      } else {
        sum += w[k] * (f(mid - off) + f(mid + off));
      }
    }
  }
  return sum * (h / 2.0) / std::sqrt(2.0 * M_PI);
}

ContrastReport convergence_contrast(double p, double s, double x, const ApproachCurve& gamma,
                                    int ladder, double a) {
  const int d = 1;
  if (!(p >= 1.0)) throw ValidationError("p >= 1 required");
  if (ladder < 1) throw ValidationError("t ladder needs at least one step");
  if (p == 1.0) {
    if (!(s >= 0.0)) throw ValidationError("p = 1 requires s >= 0");
  } else if (std::isinf(p)) {
    if (!(s > d)) throw ValidationError("p = infinity requires s > d");
  } else if (!(s > d * (p - 1.0) / p)) {
    throw ValidationError("s > d(p-1)/p fails: s = " + fmt(s) + ", d(p-1)/p = " + fmt(d * (p - 1.0) / p));
  }
  ContrastReport rep;
  rep.p = p;
  rep.s = s;
  rep.holder_constant = weight_norm(p, s, d);
  // ||f||_{FL^p_s} for the Gaussian
  {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto g = [&](double xi) {
      return std::pow(1.0 + xi * xi, s / 2.0) * std::sqrt(2.0 * M_PI) * std::exp(-xi * xi / 2.0);
    };
    if (std::isinf(p)) {
      double sup = 0.0;
      for (int i = 0; i <= 4000; ++i) sup = std::max(sup, g(i * 0.01));
      rep.data_norm = sup;
    } else {
      auto gp = [&](double xi) { return std::pow(g(xi), p); };
      rep.data_norm = std::pow(2.0 * ts.integrate(gp, 0.0, 40.0), 1.0 / p);
    }
  }
  rep.bound = rep.holder_constant * rep.data_norm / (2.0 * M_PI);
  const double f0 = std::exp(-x * x / 2.0);
  rep.holder_holds = true;
  for (int n = 1; n <= ladder; ++n) {
    ContrastRow row;
    row.n = n;
    row.t = std::pow(4.0, -n);
    const double g = gamma(row.t);
    const int samples = 41;
    for (int i = 0; i < samples; ++i) {
      const double y = x + g * (1.0 - 1e-12) * (2.0 * i / (samples - 1) - 1.0);
      const cplx v = gaussian_propagator(y, row.t, a);
      row.sup_error = std::max(row.sup_error, std::abs(v - f0));
      row.sup_value = std::max(row.sup_value, std::abs(v));
    }
    if (!(row.sup_value <= rep.bound)) rep.holder_holds = false;
    rep.rows.push_back(row);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (!(rep.rows[i].sup_error < rep.rows[i - 1].sup_error)) rep.monotone = false;
  }
  rep.final_error = rep.rows.back().sup_error;
  return rep;
}

MixedContrast mixed_contrast(double p, double q, double s1, double s2, int d1, int d2) {
  if (d1 < 1 || d2 < 1) throw ValidationError("d1, d2 >= 1 required");
  auto check = [](double r, double s, int dd, const char* name) {
    if (!(r >= 1.0)) throw ValidationError(std::string(name) + " >= 1 required");
    if (r == 1.0) {
      if (!(s >= 0.0)) throw ValidationError(std::string(name) + " = 1 requires s >= 0");
      return;
    }
    const double crit = std::isinf(r) ? dd : dd * (r - 1.0) / r;
    if (!(s > crit)) {
      throw ValidationError("s > d(r-1)/r fails for " + std::string(name) + ": s = " + fmt(s) +
                            ", threshold " + fmt(crit));
    }
  };
  check(p, s1, d1, "p");
  check(q, s2, d2, "q");
  MixedContrast out;
  out.c1 = weight_norm(p, s1, d1);
  out.c2 = weight_norm(q, s2, d2);
  out.product = out.c1 * out.c2;
  out.finite = std::isfinite(out.product);
  return out;
}

}  // namespace nontan
