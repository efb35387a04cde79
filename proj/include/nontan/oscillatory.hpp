#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nontan/counterexample.hpp"
#include "nontan/numeric.hpp"
#include "nontan/schedule.hpp"
#include "nontan/symbol.hpp"

namespace nontan {

// F(r) = r dx.omega + dt phi(r, omega) and its radial derivatives.
struct PhaseState {
  std::vector<double> dx;
  double dt = 0.0;
  const PhaseSymbol* symbol = nullptr;
  std::vector<double> omega;

  double dx_dot_omega() const;
  double F(double r) const;
  double dF(double r) const;
  double d2F(double r) const;
};

enum class Method { direct, ibp, closed_form, certified_bound };
std::string method_name(Method m);

struct IntegralResult {
  std::optional<std::complex<double>> value;
  BigFloat log_abs_bound;  // log of the certified bound on |A_j|
  Method method = Method::certified_bound;
  std::size_t panels = 0;
  double est_error = 0.0;

  double abs_bound() const { return to_double(boost::multiprecision::exp(log_abs_bound)); }
};

// One annular integral
//   (2pi)^{-d} int_{R < |xi| < R'} e^{i(dx.xi + dt phi(xi))} |xi|^{-d} (log|xi|)^{-B} dxi.
struct AnnulusProblem {
  PhaseSymbol symbol;
  int dim = 1;
  double B = 0.75;
  BigFloat log_lo;
  BigFloat log_hi;
  std::vector<double> dx;
  double dt = 0.0;
  bool diagonal = false;  // dx == 0 and dt == 0 exactly
};

// The evaluation point (x, t); `lattice` marks (x, t) = (x_k, t_k).
struct EvalPoint {
  std::vector<double> x;
  Rational t;
  std::optional<std::size_t> lattice;
};

EvalPoint lattice_point(const Schedule& sch, std::size_t k);
EvalPoint free_point(std::vector<double> x, double t);

AnnulusProblem annulus_problem(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                               const EvalPoint& at);
AnnulusProblem toy_annulus(const PhaseSymbol& s, double R, double Rp, std::vector<double> dx,
                           double dt, double B = 0.75);

struct OscillatoryOptions {
  double panel_budget = 1e7;
  int n_omega = 16;           // starting angular node count (d = 2)
  int max_omega = 1 << 12;
  double angular_tol = 1e-8;
  std::optional<double> growth_constant;  // C of sup r^beta |phi''| / |phi'|^2
};

// C from the symbol's admissibility report unless given in the options.
double resolve_growth_constant(const PhaseSymbol& s, int dim, const OscillatoryOptions& opt);

// log of sigma (2pi)^{-d} int r^{-1} (log r)^{-B} dr over the annulus; the
// value on the diagonal and a majorant everywhere.
BigFloat log_amplitude_majorant(const AnnulusProblem& pb);
// Integration-by-parts majorant; empty when |F'| has no positive lower bound
// of the form (1 - theta) |dt| |phi'|.
std::optional<BigFloat> log_ibp_bound(const AnnulusProblem& pb, double C);

// min of the two majorants above, with a small rounding slack.
BigFloat log_best_bound(const AnnulusProblem& pb, const OscillatoryOptions& opt = {});

IntegralResult eval_direct(const AnnulusProblem& pb, const OscillatoryOptions& opt = {});
IntegralResult eval_ibp(const AnnulusProblem& pb, const OscillatoryOptions& opt = {});
IntegralResult eval_bound(const AnnulusProblem& pb, const OscillatoryOptions& opt = {});

IntegralResult eval_Aj_direct(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                              const EvalPoint& at, const OscillatoryOptions& opt = {});
IntegralResult eval_Aj_ibp(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                           const EvalPoint& at, const OscillatoryOptions& opt = {});
IntegralResult eval_Aj_bound(const Schedule& sch, const CounterexampleSpec& spec, std::size_t j,
                             const EvalPoint& at, const OscillatoryOptions& opt = {});

// A_k(x_k, t_k) = sigma (2pi)^{-d} ((log R'_k)^{1-B} - (log R_k)^{1-B}) / (1 - B).
BigFloat diag_closed_form_big(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k);
double diag_closed_form(const Schedule& sch, const CounterexampleSpec& spec, std::size_t k);

enum class SumMode { direct, ibp, automatic };
SumMode parse_sum_mode(const std::string& s);

struct PartialSum {
  std::complex<double> value;  // sum of the computed parts
  BigFloat log_abs_bound;      // log of the sum of per-annulus bounds
  double est_error = 0.0;      // quadrature error plus bounds of uncomputed parts
  std::vector<IntegralResult> per_j;
  bool bracket = false;        // some annulus contributed only a bound

  double abs_bound() const { return to_double(boost::multiprecision::exp(log_abs_bound)); }
};

// S_m f(x, t) = sum_{j <= m} A_j(x, t). In automatic mode each annulus uses
// the closed form on the diagonal, then integration by parts when F' keeps
// its sign, then direct quadrature within budget, then the bound alone.
PartialSum partial_sum(const Schedule& sch, const CounterexampleSpec& spec, std::size_t m,
                       const EvalPoint& at, SumMode mode, const OscillatoryOptions& opt = {});

}  // namespace nontan
