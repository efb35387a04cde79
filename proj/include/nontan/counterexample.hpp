#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nontan/numeric.hpp"
#include "nontan/schedule.hpp"

namespace nontan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Exponents of the counterexample f^ = |xi|^{-d} (log|xi|)^{-B} sum_j chi_j e^{-i(x_j.xi + t_j phi)}.
// p = kInfinity stands for p = infinity. The mixed fields are used only by
// the mixed Fourier-Lebesgue checks.
struct CounterexampleSpec {
  int dim = 1;
  double p = 2.0;
  double B = 0.75;
  double mu = 3.0;  // inner cutoff, identified with R_1
  double q = 0.0;
  double split_k = 0.0;
  int d1 = 0;
  int d2 = 0;

  bool mixed() const { return d1 > 0 && d2 > 0; }
  // rho of the annular-function lemma: B p (single case), B (mixed case)
  double rho() const { return mixed() ? B : (std::isinf(p) ? B : B * p); }
};

// B = (1/p + 1)/2 for p in (1, infinity]; B = 1/2 for p = 1.
double choose_B(double p);
// split_k = (1/p)/(1/p + 1/q), B = (1/p + 1/q + 1)/2.
std::pair<double, double> choose_B_split(double p, double q);

// Throws ValidationError naming the failing inequality.
void validate_single(const CounterexampleSpec& spec);
void validate_mixed(const CounterexampleSpec& spec);

CounterexampleSpec single_spec(const Schedule& sch, double p, std::optional<double> B = {});
CounterexampleSpec mixed_spec(int d1, int d2, double mu, double p, double q,
                              std::optional<double> B = {}, std::optional<double> split_k = {});

// g^(xi) = |xi|^{-d} (log|xi|)^{-log_exponent} b_j(xi) on Omega_j.
struct AnnularFunction {
  double log_exponent = 0.75;
  std::function<std::complex<double>(std::size_t j, std::span<const double> xi)> multiplier;
  double multiplier_sup = 1.0;
};

// The counterexample's own multipliers b_j = exp(-i(x_j.xi + t_j phi(xi))).
AnnularFunction counterexample_function(const Schedule& sch, const CounterexampleSpec& spec);

// Index j (1-based) of the annulus R_j < |xi| < R'_j, or 0 when |xi| is in no
// annulus or within floating tolerance of a boundary.
std::size_t annulus_of(const Schedule& sch, double radius);

std::complex<double> eval_annular(const Schedule& sch, const AnnularFunction& g,
                                  std::span<const double> xi);
std::complex<double> eval_fhat(const Schedule& sch, const CounterexampleSpec& spec,
                               std::span<const double> xi);

struct AnnulusNorm {
  std::size_t j = 0;
  double quadrature = 0.0;  // p-th power contribution with the exact <xi> weight
  BigFloat bound;           // closed-form upper bound of the same contribution
};

struct NormResult {
  double p = 2.0;
  double s = 0.0;
  bool divergent = false;
  double total_bound = 0.0;  // bound on the p-th power norm (sup for p = infinity)
  double partial_sum = 0.0;  // sum of per-annulus quadrature values
  std::vector<AnnulusNorm> per_annulus;
  double norm_bound() const;  // total_bound^{1/p}
};

struct NormOptions {
  std::optional<std::size_t> j_max;
  double multiplier_sup = 1.0;
};

NormResult fl_norm(const Schedule& sch, const CounterexampleSpec& spec, double s,
                   const NormOptions& opt = {});

// sigma * int_mu^inf r^c (1 + r^2)^{w/2} (log r)^{-lambda} dr, by quadrature and
// by a closed-form majorant.
struct TailIntegral {
  bool finite = true;
  double quadrature = kInfinity;
  double bound = kInfinity;
};
TailIntegral radial_tail(double sigma, double c, double w, double lambda, double mu);
// sigma * int_0^mu (1 + r^2)^{w/2} r^{d-1} dr
double radial_ball(double sigma, int d, double w, double mu);

struct MixedRegion {
  std::string name;
  double bound = 0.0;       // certified from closed-form tails
  double quadrature = 0.0;  // same region with quadrature tails
};

struct MixedNormResult {
  double s1 = 0.0;
  double s2 = 0.0;
  std::vector<MixedRegion> regions;  // (i), (ii), (iii), corner
  double combine_factor = 1.0;       // (a + b)^{q/p} <= c (a^{q/p} + b^{q/p})
  double total_q_bound = 0.0;        // bound on ||f||^q
  double total_bound = 0.0;          // bound on ||f||
  // factors of region (iii): quadrature vs closed form
  TailIntegral k1;
  TailIntegral k2;
};

MixedNormResult mixed_fl_norm(const CounterexampleSpec& spec, std::optional<double> s1 = {},
                              std::optional<double> s2 = {});

}  // namespace nontan
