#include "nontan/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nontan/errors.hpp"

namespace nontan {

namespace {

constexpr double kMaxSampledLogRadius = 690.0;  // exp(690) ~ 1e299
constexpr int kSampledRadii = 257;
constexpr int kSampledDirections = 16;

void check_sampling_range(const BigFloat& log_hi) {
  if (log_hi > kMaxSampledLogRadius) {
    throw NumericalRefusal(
        "symbol has no closed-form log-domain bounds and the radius exceeds double range");
  }
}

}  // namespace

SphereGrid sample_sphere(int dim, int n_omega) {
  if (dim < 1) throw ValidationError("dimension must be >= 1");
  SphereGrid g;
  g.dim = dim;
  if (dim == 1) {
    g.directions = {{-1.0}, {1.0}};
    g.weights = {1.0, 1.0};
    return g;
  }
  if (n_omega < 2) throw ValidationError("n_omega must be >= 2");
  if (dim == 2) {
    for (int i = 0; i < n_omega; ++i) {
      const double th = 2.0 * M_PI * i / n_omega;
      g.directions.push_back({std::cos(th), std::sin(th)});
      g.weights.push_back(2.0 * M_PI / n_omega);
    }
    return g;
  }
  // Product grid: dim-2 polar angles in (0, pi) at midpoints, one azimuth in [0, 2pi).
  const int n_polar = std::max(2, n_omega / 2);
  std::vector<int> idx(static_cast<std::size_t>(dim - 1), 0);
  const double area = sphere_area(dim);
  double wsum = 0.0;
  while (true) {
    std::vector<double> angles(static_cast<std::size_t>(dim - 1));
    double jac = 1.0;
    for (int a = 0; a < dim - 2; ++a) {
      angles[a] = M_PI * (idx[a] + 0.5) / n_polar;
      jac *= std::pow(std::sin(angles[a]), dim - 2 - a);
    }
    angles[dim - 2] = 2.0 * M_PI * idx[dim - 2] / n_omega;
    std::vector<double> w(static_cast<std::size_t>(dim));
    double sprod = 1.0;
    for (int a = 0; a < dim - 1; ++a) {
      w[a] = sprod * std::cos(angles[a]);
      sprod *= std::sin(angles[a]);
    }
    w[dim - 1] = sprod;
    g.directions.push_back(std::move(w));
    g.weights.push_back(jac);
    wsum += jac;
    int a = 0;
    for (; a < dim - 1; ++a) {
      const int lim = (a == dim - 2) ? n_omega : n_polar;
      if (++idx[a] < lim) break;
      idx[a] = 0;
    }
    if (a == dim - 1) break;
  }
  for (auto& w : g.weights) w *= area / wsum;
  return g;
}

PhaseSymbol::PhaseSymbol(std::string name, RadialFunction phi, RadialFunction d1,
                         RadialFunction d2, double R, double beta)
    : name_(std::move(name)),
      phi_(std::move(phi)),
      d1_(std::move(d1)),
      d2_(std::move(d2)),
      R_(R),
      beta_(beta) {
  if (!(R > 0.0)) throw ValidationError("symbol radius R must be positive");
  if (!(beta > 0.0)) throw ValidationError("symbol growth exponent beta must be positive");
}

PhaseSymbol power_symbol(double a) {
  if (!(a > 1.0)) {
    throw ValidationError("power symbol requires a > 1 (|phi'| must tend to infinity)");
  }
  auto phi = [a](double r, Direction) { return std::pow(r, a); };
  auto d1 = [a](double r, Direction) { return a * std::pow(r, a - 1.0); };
  auto d2 = [a](double r, Direction) { return a * (a - 1.0) * std::pow(r, a - 2.0); };
  // a r^{a-1} > 1 iff r > (1/a)^{1/(a-1)}, which is below 1 for every a > 1.
  const double R = std::max(1.0, std::ceil(std::pow(1.0 / a, 1.0 / (a - 1.0))));
  std::ostringstream name;
  name << "power(" << a << ")";
  PhaseSymbol s(name.str(), phi, d1, d2, R, 1.0);
  s.power_ = a;
  return s;
}

BigFloat PhaseSymbol::log_inf_abs_d1(const BigFloat& log_lo, const BigFloat& log_hi,
                                     int dim) const {
  if (power_) {
    const double a = *power_;
    return boost::multiprecision::log(BigFloat(a)) + BigFloat(a - 1.0) * log_lo;
  }
  check_sampling_range(log_hi);
  const auto sphere = sample_sphere(dim, kSampledDirections);
  const double lo = to_double(log_lo), hi = to_double(log_hi);
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSampledRadii; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / (kSampledRadii - 1));
    for (const auto& w : sphere.directions) inf = std::min(inf, std::abs(d1_(r, w)));
  }
  if (inf <= 0.0) return neg_infinity();
  return BigFloat(std::log(inf));
}

BigFloat PhaseSymbol::log_sup_abs_d2(const BigFloat& log_lo, const BigFloat& log_hi,
                                     int dim) const {
  if (power_) {
    const double a = *power_;
    const BigFloat& at = a >= 2.0 ? log_hi : log_lo;
    return boost::multiprecision::log(BigFloat(a * (a - 1.0))) + BigFloat(a - 2.0) * at;
  }
  check_sampling_range(log_hi);
  const auto sphere = sample_sphere(dim, kSampledDirections);
  const double lo = to_double(log_lo), hi = to_double(log_hi);
  double sup = 0.0;
  for (int i = 0; i < kSampledRadii; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / (kSampledRadii - 1));
    for (const auto& w : sphere.directions) sup = std::max(sup, std::abs(d2_(r, w)));
  }
  if (sup <= 0.0) return neg_infinity();
  return BigFloat(std::log(sup));
}

std::optional<BigFloat> PhaseSymbol::log_radius_d1_exceeds(const BigFloat& log_m,
                                                           int dim) const {
  const BigFloat log_R = boost::multiprecision::log(BigFloat(R_));
  if (power_) {
    const double a = *power_;
    BigFloat r0 = (log_m - boost::multiprecision::log(BigFloat(a))) / BigFloat(a - 1.0);
    return r0 > log_R ? r0 : log_R;
  }
  // Scan geometric windows [r0, r0 * e^8]; accept the first window whose
  // sampled infimum clears the level and keeps clearing it further out.
  const double target = to_double(log_m);
  for (double lr = std::log(R_); lr + 16.0 < kMaxSampledLogRadius; lr += 0.5) {
    const BigFloat a(lr), b(lr + 8.0), c(lr + 16.0);
    if (to_double(log_inf_abs_d1(a, b, dim)) > target &&
        to_double(log_inf_abs_d1(b, c, dim)) > target) {
      return a;
    }
  }
  return std::nullopt;
}

AdmissibilityReport check_admissibility(const PhaseSymbol& s, int dim, double r_max, int n_r,
                                        int n_omega) {
  if (!(r_max > s.R())) throw ValidationError("r_max must exceed the symbol radius R");
  if (n_r < 2) throw ValidationError("n_r must be >= 2");
  if (dim != 1 && n_omega < 2) throw ValidationError("n_omega must be >= 2");
  const auto sphere = sample_sphere(dim, dim == 1 ? 2 : n_omega);
  AdmissibilityReport rep;
  rep.dim = dim;
  rep.n_omega = static_cast<int>(sphere.directions.size());
  const double lo = std::log(s.R()), hi = std::log(r_max);
  for (int i = 0; i < n_r; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / (n_r - 1));
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& w : sphere.directions) {
      const double g1 = std::abs(s.d1(r, w));
      if (!(g1 > 1.0)) {
        std::ostringstream msg;
        msg << "|phi'| = " << g1 << " <= 1 at r = " << r
            << " >= R; the symbol violates |phi'(r)| > 1 for r >= R";
        throw ValidationError(msg.str());
      }
      inf = std::min(inf, g1);
      const double ratio = std::pow(r, s.beta()) * std::abs(s.d2(r, w)) / (g1 * g1);
      rep.sup_ratio = std::max(rep.sup_ratio, ratio);
    }
    rep.r_grid.push_back(r);
    rep.inf_d1_curve.push_back(inf);
  }
  rep.C_measured = rep.sup_ratio;
  const double last = rep.inf_d1_curve.back();
  rep.monotone_escape =
      std::all_of(rep.inf_d1_curve.begin(), rep.inf_d1_curve.end() - 1,
                  [last](double v) { return v < last; });
  return rep;
}

}  // namespace nontan
