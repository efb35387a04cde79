#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nontan/counterexample.hpp"
#include "nontan/oscillatory.hpp"
#include "nontan/schedule.hpp"

namespace nontan {

inline constexpr double kCertificateSlack = 1e-9;

struct OldTermsCheck {
  std::size_t k = 0;
  double majorant = 0.0;
  // sum of |A_j(x_k, t_k)| + quadrature error over j < k, when every term has a value
  std::optional<double> computed_sum;
  std::vector<IntegralResult> per_j;
  bool holds = true;
};

// Triangle-inequality majorant of sum_{j<k} |A_j(x, t)| over |xi| <= R'_{k-1}:
// sigma (2pi)^{-d} ((log R'_{k-1})^{1-B} - (log 2)^{1-B}) / (1 - B).
double old_terms_majorant(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k);
OldTermsCheck check_old_terms(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k,
                              const OscillatoryOptions& opt = {});

struct FprimeCheck {
  std::size_t j = 0;
  std::size_t k = 0;
  double min_ratio = 0.0;  // min |F'| / ((t_k - t_j) |phi'| / 2)
  bool ok = false;
};

// Samples |F'| at (x_k, t_k) on a log grid of [R_j, R'_j] and every direction.
FprimeCheck check_fprime_lower(const Schedule& sch, std::size_t j, std::size_t k, int n_r = 257,
                               int n_omega = 16);
// Same check with an explicit point displacement (used for forced breaches).
FprimeCheck check_fprime_lower(const Schedule& sch, std::size_t j, std::size_t k,
                               const std::vector<double>& dx, int n_r = 257, int n_omega = 16);

struct DecayRow {
  std::size_t j = 0;
  BigFloat log_bound;   // log abs_bound of A_j(x_k, t_k)
  BigFloat log_scaled;  // log(abs_bound * 2^j)
};

struct DecayTable {
  std::size_t k = 0;
  std::vector<DecayRow> rows;
  BigFloat log_C;       // log max_j abs_bound * 2^j
  BigFloat log_spread;  // log(max / min) of abs_bound * 2^j
  double C_measured() const;
  double spread() const;  // inf when beyond double range
  bool bounded(double max_spread) const;
};

DecayTable check_decay(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k,
                       std::size_t j_lo, std::size_t j_hi, const OscillatoryOptions& opt = {});

struct CertificateRow {
  std::size_t k = 0;
  double diag = 0.0;
  double old_terms = 0.0;
  double decay = 0.0;  // sum_{j=k+1}^m abs_bound_j
  double tail = 0.0;   // bound on sum_{j>m}
  double L = 0.0;
  double threshold = 0.0;  // c_measured (log R'_k)^{1-B}
  double log_outer = 0.0;  // log R'_k
  std::string dominant;    // largest of old_terms, decay, tail
  std::vector<std::string> notes;
};

struct CertificateReport {
  std::vector<CertificateRow> per_k;
  double c_measured = 0.0;
  double C_measured = 0.0;        // max over rows of abs_bound_j 2^j
  double C_prime_measured = 0.0;  // max over k >= 2 of old_terms / (log R'_{k-1})^{1-B}
  bool increasing = false;
  bool positive = false;
  bool pass = false;
  std::string mode;  // "strict" or "relaxed(kappa)"
  std::size_t m = 0;
  std::size_t tail_terms = 0;
  double slack = kCertificateSlack;
  std::vector<ApproachPair> approach;  // dense approach to x = 0 along the blocks
  std::string diagnosis;
};

struct CertificateOptions {
  std::size_t k_lo = 1;
  std::size_t k_hi = 3;
  std::size_t m = 8;
  std::size_t tail_terms = 8;
  OscillatoryOptions osc;
};

CertificateReport divergence_certificate(const Schedule& sch, const CounterexampleSpec& spec,
                                         const CertificateOptions& opt = {});

struct Box {
  double x_lo = -1.0;
  double x_hi = 1.0;
  double t_lo = 0.3;
  double t_hi = 0.8;
};

struct ContinuityRow {
  std::size_t m = 0;                 // compares S_{m+1} with S_m
  double sup_difference = 0.0;       // sup over computed grid values of |A_{m+1}|
  double sup_bound = 0.0;            // sup over the grid of abs_bound_{m+1}
  std::size_t computed = 0;          // grid nodes where A_{m+1} had a value
  bool ok = true;
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  std::vector<double> modulus;       // adjacent-node max difference of S_{m_lo}, per refinement
  std::size_t tail_start = 0;        // first annulus of the summability window
  std::vector<double> tail_log_bounds;  // log of the sup-grid bounds over the window
  bool summable = false;
  bool pass = false;
  std::string detail;
};

struct ContinuityOptions {
  std::size_t m_lo = 1;
  std::size_t m_hi = 2;
  int grid = 7;           // nodes per axis at the coarsest level
  int refinements = 1;    // grid doublings for the modulus estimate
  std::size_t window = 4;
  OscillatoryOptions osc;
};

ContinuityReport continuity_check(const Schedule& sch, const CounterexampleSpec& spec,
                                  const Box& box, const ContinuityOptions& opt = {});

// ||<.>^{-s}||_{L^{p'}(R^d)}; infinite when not integrable.
double weight_norm(double p, double s, int d);

struct ContrastRow {
  int n = 0;
  double t = 0.0;
  double sup_error = 0.0;  // sup over sampled |y| < gamma(t) of |S f(y, t) - f(0)|
  double sup_value = 0.0;  // sup of |S f(y, t)| over the same samples
};

struct ContrastReport {
  double p = 2.0;
  double s = 0.6;
  double holder_constant = 0.0;  // ||<.>^{-s}||_{L^{p'}}
  double data_norm = 0.0;        // ||f||_{FL^p_s}
  double bound = 0.0;            // (2pi)^{-1} holder_constant * data_norm
  std::vector<ContrastRow> rows;
  bool monotone = false;
  bool holder_holds = false;
  double final_error = 0.0;
};

// Gaussian data f^(xi) = sqrt(2pi) exp(-xi^2/2) in d = 1 under the power
// symbol |xi|^a, along t = 4^{-n}, n = 1..ladder.
ContrastReport convergence_contrast(double p, double s, double x, const ApproachCurve& gamma,
                                    int ladder, double a = 2.0);
// S f(y, t) for that Gaussian, by paneled quadrature over |xi| <= 40.
std::complex<double> gaussian_propagator(double y, double t, double a = 2.0);

struct MixedContrast {
  double c1 = 0.0;  // ||<.>^{-s1}||_{L^{p'}(R^{d1})}, 1 when p = 1
  double c2 = 0.0;
  double product = 0.0;
  bool finite = false;
};

MixedContrast mixed_contrast(double p, double q, double s1, double s2, int d1, int d2);

}  // namespace nontan
