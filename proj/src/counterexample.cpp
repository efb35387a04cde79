#include "nontan/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nontan/errors.hpp"

namespace nontan {

namespace mp = boost::multiprecision;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kQuadTol = 1e-13;
constexpr double kLogCutover = 40.0;  // (1 + e^{-2u})^{w/2} == 1 in double beyond this

bool critical(double e, double scale) { return std::abs(e) <= 1e-12 * (1.0 + std::abs(scale)); }

double weight_factor(double w) { return w > 0 ? std::pow(2.0, w / 2.0) : 1.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// int_lo^hi u^{-lambda} du
double power_log_integral(double lo, double hi, double lambda) {
  if (!(hi > lo)) return 0.0;
  if (lambda == 1.0) return std::log(hi / lo);
  if (std::isinf(hi)) return lambda > 1.0 ? std::pow(lo, 1.0 - lambda) / (lambda - 1.0) : kInfinity;
  return (std::pow(hi, 1.0 - lambda) - std::pow(lo, 1.0 - lambda)) / (1.0 - lambda);
}

// sigma * int_a^b e^{e u} (1 + e^{-2u})^{w/2} u^{-lambda} du, b may be +inf.
double log_radial_quadrature(double sigma, double e, double w, double lambda, double a, double b,
                             double scale) {
  auto f = [&](double u) {
    return std::exp(e * u) * std::pow(1.0 + std::exp(-2.0 * u), w / 2.0) * std::pow(u, -lambda);
  };
  if (critical(e, scale)) {
    const double cut = std::min(b, std::max(a, kLogCutover));
    double v = cut > a ? gauss_kronrod<double, 31>::integrate(f, a, cut, 15, kQuadTol) : 0.0;
    v += power_log_integral(std::max(a, cut), b, lambda);
    return sigma * v;
  }
  if (e < 0) {
    const double hi = std::min(b, a + 800.0 / -e);
    return sigma * gauss_kronrod<double, 31>::integrate(f, a, hi, 15, kQuadTol);
  }
  if (e * b > 700.0) return kInfinity;
  return sigma * gauss_kronrod<double, 31>::integrate(f, a, b, 15, kQuadTol);
}

// Closed-form majorant of the same integral on [a, b] in BigFloat.
BigFloat log_radial_bound(double sigma, double e, double w, double lambda, const BigFloat& a,
                          const BigFloat& b, double scale) {
  const BigFloat W = BigFloat(sigma) * BigFloat(weight_factor(w));
  if (critical(e, scale)) {
    if (lambda == 1.0) return W * (mp::log(b) - mp::log(a));
    const BigFloat l1 = BigFloat(1.0 - lambda);
    return W * (mp::pow(b, l1) - mp::pow(a, l1)) / l1;
  }
  const BigFloat E(e);
  const BigFloat amp = mp::pow(a, BigFloat(-lambda));
  if (e < 0) return W * amp * (mp::exp(E * a) - mp::exp(E * b)) / -E;
  return W * amp * (mp::exp(E * b) - mp::exp(E * a)) / E;
}

}  // namespace

double choose_B(double p) {
  if (!(p >= 1.0)) throw ValidationError("choose_B requires p >= 1, got p = " + fmt(p));
  if (p == 1.0) return 0.5;
  return (1.0 / p + 1.0) / 2.0;
}

std::pair<double, double> choose_B_split(double p, double q) {
  if (!(p > 1.0) || !(q > 1.0)) throw ValidationError("mixed exponents require p > 1 and q > 1");
  const double ip = 1.0 / p;
  const double iq = 1.0 / q;
  if (!(ip + iq < 1.0)) {
    throw ValidationError("1/p + 1/q < 1 fails: 1/p + 1/q = " + fmt(ip + iq));
  }
  return {(ip + iq + 1.0) / 2.0, ip / (ip + iq)};
}

void validate_single(const CounterexampleSpec& spec) {
  const double p = spec.p;
  const double B = spec.B;
  if (spec.dim < 1) throw ValidationError("dimension must be >= 1");
  if (!(p >= 1.0)) throw ValidationError("p >= 1 fails: p = " + fmt(p));
  if (!(spec.mu > 2.0)) throw ValidationError("mu > 2 fails: mu = " + fmt(spec.mu));
  if (p == 1.0 || std::isinf(p)) {
    if (!(B > 0.0 && B < 1.0)) throw ValidationError("0 < B < 1 fails: B = " + fmt(B));
    return;
  }
  if (!(1.0 / p < B && B < 1.0)) {
    throw ValidationError("1/p < B < 1 fails: 1/p = " + fmt(1.0 / p) + ", B = " + fmt(B));
  }
}

void validate_mixed(const CounterexampleSpec& spec) {
  if (spec.d1 < 1 || spec.d2 < 1) throw ValidationError("d1 >= 1 and d2 >= 1 required");
  if (spec.d1 + spec.d2 != spec.dim) throw ValidationError("d1 + d2 = d fails");
  if (std::isinf(spec.p) || std::isinf(spec.q)) {
    throw ValidationError("mixed norm with p or q = infinity is not supported");
  }
  if (!(spec.p > 1.0) || !(spec.q > 1.0)) throw ValidationError("p > 1 and q > 1 required");
  const double ip = 1.0 / spec.p;
  const double iq = 1.0 / spec.q;
  if (!(ip + iq < 1.0)) {
    throw ValidationError("1/p + 1/q < 1 fails: 1/p + 1/q = " + fmt(ip + iq));
  }
  const double k = spec.split_k;
  const double B = spec.B;
  if (!(k > 0.0 && k < 1.0)) throw ValidationError("0 < k < 1 fails: k = " + fmt(k));
  if (!(ip < B * k && B * k < 1.0)) {
    throw ValidationError("1/p < B k < 1 fails: B k = " + fmt(B * k) + ", 1/p = " + fmt(ip));
  }
  if (!(iq < B * (1.0 - k) && B * (1.0 - k) < 1.0)) {
    throw ValidationError("1/q < B (1-k) < 1 fails: B (1-k) = " + fmt(B * (1.0 - k)) +
                          ", 1/q = " + fmt(iq));
  }
  if (!(spec.mu > 2.0)) throw ValidationError("mu > 2 fails: mu = " + fmt(spec.mu));
}

CounterexampleSpec single_spec(const Schedule& sch, double p, std::optional<double> B) {
  CounterexampleSpec spec;
  spec.dim = sch.dim();
  spec.p = p;
  spec.B = B ? *B : choose_B(p);
  spec.mu = sch.has_radii() ? to_double(mp::exp(sch.log_inner(1))) : sch.radii.R1;
  validate_single(spec);
  return spec;
}

CounterexampleSpec mixed_spec(int d1, int d2, double mu, double p, double q,
                              std::optional<double> B, std::optional<double> split_k) {
  CounterexampleSpec spec;
  spec.d1 = d1;
  spec.d2 = d2;
  spec.dim = d1 + d2;
  spec.mu = mu;
  spec.p = p;
  spec.q = q;
  if (!B || !split_k) {
    auto [b, k] = choose_B_split(p, q);
    spec.B = B.value_or(b);
    spec.split_k = split_k.value_or(k);
  } else {
    spec.B = *B;
    spec.split_k = *split_k;
  }
  validate_mixed(spec);
  return spec;
}

AnnularFunction counterexample_function(const Schedule& sch, const CounterexampleSpec& spec) {
  std::vector<std::vector<double>> xs;
  std::vector<double> ts;
  for (std::size_t j = 1; j <= sch.annuli(); ++j) {
    xs.push_back(sch.x(j));
    ts.push_back(sch.t_double(j));
  }
  AnnularFunction g;
  g.log_exponent = spec.B;
  g.multiplier_sup = 1.0;
  g.multiplier = [xs = std::move(xs), ts = std::move(ts), sym = sch.symbol](
                     std::size_t j, std::span<const double> xi) {
    double r2 = 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      r2 += xi[i] * xi[i];
      dot += xs[j - 1][i] * xi[i];
    }
    const double r = std::sqrt(r2);
    std::vector<double> omega(xi.begin(), xi.end());
    for (auto& v : omega) v /= r;
    const double phase = dot + ts[j - 1] * sym.value(r, omega);
    return std::polar(1.0, -phase);
  };
  return g;
}

std::size_t annulus_of(const Schedule& sch, double radius) {
  if (!(radius > 0.0)) return 0;
  const double lr = std::log(radius);
  for (std::size_t j = 1; j <= sch.annuli(); ++j) {
    const double lo = to_double(sch.log_inner(j));
    const double hi = to_double(sch.log_outer(j));
    const double tol_lo = 1e-13 * std::max(1.0, std::abs(lo));
    const double tol_hi = 1e-13 * std::max(1.0, std::abs(hi));
    if (lr <= lo + tol_lo) return 0;  // annuli increase, so nothing further can match
    if (lr < hi - tol_hi) return j;
    if (lr <= hi + tol_hi) return 0;
  }
  return 0;
}

std::complex<double> eval_annular(const Schedule& sch, const AnnularFunction& g,
                                  std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != sch.dim()) throw ValidationError("xi has wrong dimension");
  double r2 = 0.0;
  for (double v : xi) r2 += v * v;
  if (r2 == 0.0) throw ValidationError("eval at xi = 0");
  const double r = std::sqrt(r2);
  const std::size_t j = annulus_of(sch, r);
  if (j == 0) return {0.0, 0.0};
  const double amp = std::pow(r, -sch.dim()) * std::pow(std::log(r), -g.log_exponent);
  return amp * (g.multiplier ? g.multiplier(j, xi) : std::complex<double>(1.0, 0.0));
}

std::complex<double> eval_fhat(const Schedule& sch, const CounterexampleSpec& spec,
                               std::span<const double> xi) {
  return eval_annular(sch, counterexample_function(sch, spec), xi);
}

double NormResult::norm_bound() const {
  if (std::isinf(p)) return total_bound;
  return std::pow(total_bound, 1.0 / p);
}

NormResult fl_norm(const Schedule& sch, const CounterexampleSpec& spec, double s,
                   const NormOptions& opt) {
  if (!sch.has_radii()) throw ValidationError("schedule has no radii");
  if (!(spec.p >= 1.0)) throw ValidationError("p >= 1 fails: p = " + fmt(spec.p));
  if (!(spec.B > 0.0)) throw ValidationError("B > 0 fails: B = " + fmt(spec.B));
  const int d = sch.dim();
  const double p = spec.p;
  const double B = spec.B;
  const double sigma = sphere_area(d);
  const std::size_t jmax = std::min(opt.j_max.value_or(sch.annuli()), sch.annuli());
  const BigFloat log_mu = sch.log_inner(1);
  const double mu = to_double(mp::exp(log_mu));
  const double M = opt.multiplier_sup;

  NormResult out;
  out.p = p;
  out.s = s;

  if (std::isinf(p)) {
    const double Mp = M;
    // r^{-d}(1+r^2)^{s/2}(log r)^{-B} is decreasing in r when s <= d, so the
    // sup over an annulus sits at its inner radius.
    out.divergent = s > d;
    for (std::size_t j = 1; j <= jmax; ++j) {
      const BigFloat& a = sch.log_inner(j);
      const BigFloat lh = BigFloat(-d) * a + BigFloat(s / 2.0) * (2 * a + mp::log1p(mp::exp(-2 * a))) -
                          BigFloat(B) * mp::log(a);
      AnnulusNorm an;
      an.j = j;
      an.bound = BigFloat(Mp) * mp::exp(lh);
      an.quadrature = to_double(an.bound);
      out.partial_sum = std::max(out.partial_sum, an.quadrature);
      out.per_annulus.push_back(std::move(an));
    }
    if (out.divergent) {
      out.total_bound = kInfinity;
    } else if (critical(s - d, d)) {
      out.total_bound = Mp * std::pow(2.0, d / 2.0) * std::pow(std::log(mu), -B);
    } else {
      out.total_bound = Mp * weight_factor(s) * std::pow(mu, s - d) * std::pow(std::log(mu), -B);
    }
    return out;
  }

  const double w = s * p;
  const double lambda = B * p;
  const double e = w - d * (p - 1.0);
  const double Mp = std::pow(M, p);
  const bool crit = critical(e, w);
  out.divergent = (!crit && e > 0) || (crit && lambda <= 1.0);

  for (std::size_t j = 1; j <= jmax; ++j) {
    const BigFloat& a = sch.log_inner(j);
    const BigFloat& b = sch.log_outer(j);
    AnnulusNorm an;
    an.j = j;
    an.bound = BigFloat(Mp) * log_radial_bound(sigma, e, w, lambda, a, b, w);
    an.quadrature = Mp * log_radial_quadrature(sigma, e, w, lambda, to_double(a), to_double(b), w);
    out.partial_sum += an.quadrature;
    out.per_annulus.push_back(std::move(an));
  }

  if (out.divergent) {
    out.total_bound = kInfinity;
  } else {
    const TailIntegral tail = radial_tail(sigma, -d * p + d - 1.0, w, lambda, mu);
    out.total_bound = Mp * tail.bound;
  }
  return out;
}

TailIntegral radial_tail(double sigma, double c, double w, double lambda, double mu) {
  if (!(mu > 1.0)) throw ValidationError("radial tail requires mu > 1");
  TailIntegral t;
  const double e = c + w + 1.0;
  const double lm = std::log(mu);
  const double W = weight_factor(w);
  if (critical(e, c + w)) {
    t.finite = lambda > 1.0;
    if (!t.finite) return t;
    t.bound = W * sigma * std::pow(lm, 1.0 - lambda) / (lambda - 1.0);
  } else if (e < 0) {
    t.bound = W * sigma * std::pow(lm, -lambda) * std::pow(mu, e) / -e;
  } else {
    t.finite = false;
    return t;
  }
  t.quadrature = log_radial_quadrature(sigma, e, w, lambda, lm, kInfinity, c + w);
  return t;
}

double radial_ball(double sigma, int d, double w, double mu) {
  auto f = [&](double r) { return std::pow(1.0 + r * r, w / 2.0) * std::pow(r, d - 1); };
  return sigma * gauss_kronrod<double, 31>::integrate(f, 0.0, mu, 15, kQuadTol);
}

MixedNormResult mixed_fl_norm(const CounterexampleSpec& spec, std::optional<double> s1,
                              std::optional<double> s2) {
  validate_mixed(spec);
  const double p = spec.p;
  const double q = spec.q;
  const int d1 = spec.d1;
  const int d2 = spec.d2;
  const int d = d1 + d2;
  const double B = spec.B;
  const double k = spec.split_k;
  const double mu = spec.mu;
  const double sg1 = sphere_area(d1);
  const double sg2 = sphere_area(d2);

  MixedNormResult out;
  out.s1 = s1.value_or(d1 * (p - 1.0) / p);
  out.s2 = s2.value_or(d2 * (q - 1.0) / q);
  const double w1 = out.s1 * p;
  const double w2 = out.s2 * q;
  const double qp = q / p;
  out.combine_factor = std::pow(2.0, std::max(qp - 1.0, 0.0));

  const double ball1 = radial_ball(sg1, d1, w1, mu);
  const double ball2 = radial_ball(sg2, d2, w2, mu);

  // (i) |xi_1| < mu < |xi_2|: |xi| >= |xi_2|
  const TailIntegral ti = radial_tail(sg2, -d * q + d2 - 1.0, w2, B * q, mu);
  // (ii) |xi_2| < mu < |xi_1|: |xi| >= |xi_1|
  const TailIntegral tii = radial_tail(sg1, -d * p + d1 - 1.0, w1, B * p, mu);
  // (iii) both large: |xi|^{-d} <= |xi_1|^{-d_1}|xi_2|^{-d_2} and the log split
  out.k1 = radial_tail(sg1, -d1 * p + d1 - 1.0, w1, B * k * p, mu);
  out.k2 = radial_tail(sg2, -d2 * q + d2 - 1.0, w2, B * (1.0 - k) * q, mu);
  // corner: both small but |xi| > mu, amplitude at most mu^{-d}(log mu)^{-B}
  const double corner_amp = std::pow(mu, -d * p) * std::pow(std::log(mu), -B * p);

  auto region = [&](std::string name, double bound, double quad) {
    out.regions.push_back({std::move(name), bound, quad});
  };
  region("i", std::pow(ball1, qp) * ti.bound, std::pow(ball1, qp) * ti.quadrature);
  region("ii", std::pow(tii.bound, qp) * ball2, std::pow(tii.quadrature, qp) * ball2);
  region("iii", std::pow(out.k1.bound, qp) * out.k2.bound,
         std::pow(out.k1.quadrature, qp) * out.k2.quadrature);
  const double corner = std::pow(corner_amp * ball1, qp) * ball2;
  region("corner", corner, corner);

  double sum = 0.0;
  for (const auto& r : out.regions) sum += r.bound;
  out.total_q_bound = out.combine_factor * sum;
  out.total_bound = std::pow(out.total_q_bound, 1.0 / q);
  return out;
}

}  // namespace nontan
