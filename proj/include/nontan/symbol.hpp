#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nontan/numeric.hpp"

namespace nontan {

using Direction = std::span<const double>;

// Quadrature/sampling nodes on S^{d-1}. d = 1 is {-1, +1} with unit weights,
// d = 2 equispaced angles (periodic trapezoid), d >= 3 a product grid in
// spherical coordinates (used for admissibility sampling only).
struct SphereGrid {
  int dim = 1;
  std::vector<std::vector<double>> directions;
  std::vector<double> weights;
};

SphereGrid sample_sphere(int dim, int n_omega);

// A real phase symbol phi(xi) = phi(r, omega) together with its first and
// second radial derivatives, plus the growth data (R, beta) used by the
// radius schedule. Power-law symbols also carry closed-form log-domain
// bounds so radii far beyond double range can be handled.
class PhaseSymbol {
 public:
  using RadialFunction = std::function<double(double r, Direction omega)>;

  PhaseSymbol(std::string name, RadialFunction phi, RadialFunction d1, RadialFunction d2,
              double R, double beta);

  const std::string& name() const { return name_; }
  double R() const { return R_; }
  double beta() const { return beta_; }
  std::optional<double> power_exponent() const { return power_; }

  double value(double r, Direction omega) const { return phi_(r, omega); }
  double d1(double r, Direction omega) const { return d1_(r, omega); }
  double d2(double r, Direction omega) const { return d2_(r, omega); }

  // log of inf |phi'| over exp(log_lo) <= r <= exp(log_hi) and all directions.
  BigFloat log_inf_abs_d1(const BigFloat& log_lo, const BigFloat& log_hi, int dim) const;
  // log of sup |phi''| over the same range.
  BigFloat log_sup_abs_d2(const BigFloat& log_lo, const BigFloat& log_hi, int dim) const;
  // log r0 such that |phi'| > exp(log_m) for every r > r0 (r0 >= R); empty
  // when |phi'| stays bounded.
  std::optional<BigFloat> log_radius_d1_exceeds(const BigFloat& log_m, int dim) const;

 private:
  friend PhaseSymbol power_symbol(double a);

  std::string name_;
  RadialFunction phi_;
  RadialFunction d1_;
  RadialFunction d2_;
  double R_;
  double beta_;
  std::optional<double> power_;
};

// phi(xi) = |xi|^a, a > 1, with beta = 1 and R = 1.
PhaseSymbol power_symbol(double a);

struct AdmissibilityReport {
  std::vector<double> r_grid;
  std::vector<double> inf_d1_curve;  // inf over sampled omega of |phi'| at each r
  double sup_ratio = 0.0;            // sup of r^beta |phi''| / |phi'|^2 over the grid
  double C_measured = 0.0;
  bool monotone_escape = false;
  int dim = 1;
  int n_omega = 0;
};

// Samples phi on a geometric r-grid over [R, r_max] times a sphere grid and
// measures the growth constants. Throws ValidationError when |phi'| <= 1 at a
// sampled r >= R.
AdmissibilityReport check_admissibility(const PhaseSymbol& s, int dim, double r_max, int n_r,
                                        int n_omega);

}  // namespace nontan
