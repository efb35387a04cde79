#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nontan/numeric.hpp"
#include "nontan/symbol.hpp"

namespace nontan {

// Strictly increasing continuous gamma with gamma(0) = 0; the width of the
// approach region |y - x| < gamma(t).
class ApproachCurve {
 public:
  enum class Kind { identity, power, sqrt };

  static ApproachCurve identity() { return ApproachCurve(Kind::identity, 1.0); }
  static ApproachCurve power(double alpha);
  static ApproachCurve sqrt() { return ApproachCurve(Kind::sqrt, 0.5); }
  // "identity", "sqrt", "power:<alpha>".
  static ApproachCurve parse(const std::string& text);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  std::string name() const;

  double operator()(double t) const;
  BigFloat eval(const BigFloat& t) const;
  double inverse(double y) const;
  // gamma(t) as an exact rational when it is one.
  std::optional<Rational> exact(const Rational& t) const;
  // gamma(t)^2 as an exact rational when it is one.
  std::optional<Rational> exact_square(const Rational& t) const;

 private:
  ApproachCurve(Kind k, double alpha) : kind_(k), alpha_(alpha) {}
  Kind kind_;
  double alpha_;
};

// A lattice point of block k: x = delta_{k+1} * z.
struct LatticePoint {
  int block = 0;
  std::vector<long long> z;
};

struct BlockLayout {
  int dim = 1;
  ApproachCurve gamma = ApproachCurve::identity();
  std::vector<BigFloat> deltas;        // deltas[k] = delta_k, k = 0 .. k_max + 1
  std::vector<std::size_t> blocks;     // blocks[k] = m_k, k = 0 .. k_max + 1, m_0 = 0
  std::vector<LatticePoint> points;    // x_1 .. x_{m_{k_max+1}} (stored 0-based)

  int block_count() const { return static_cast<int>(blocks.size()) - 1; }
};

// Lattice blocks B_{k+1}(0) ∩ delta_{k+1} Z^d for k = 0..k_max, each in
// lexicographic order of the integer coordinates.
BlockLayout build_blocks(const ApproachCurve& gamma, int dim, int k_max);

// Equal spacing inside (1/(k+2), 1/(k+1)) with one free slot at each end.
std::vector<Rational> assign_times(const BlockLayout& layout);

struct RadiiOptions {
  int N = 2;
  double R1 = 3.0;
  double relax = 1.0;               // kappa in (0, 1], scales the 2^j demand only
  double margin_fraction = 0x1p-20;  // log-margin is log(1 + margin_fraction)
};

struct Radii {
  std::vector<BigFloat> logR;
  std::vector<BigFloat> logRp;
};

// Radii satisfying the interleaving, power, growth and derivative conditions,
// computed in the log domain at the current BigFloat precision.
Radii build_radii(const PhaseSymbol& s, const BlockLayout& layout,
                  const std::vector<Rational>& times, const RadiiOptions& opt);

struct Schedule {
  BlockLayout layout;
  PhaseSymbol symbol;
  std::vector<Rational> times;
  std::vector<BigFloat> logR;
  std::vector<BigFloat> logRp;
  RadiiOptions radii;
  unsigned precision_bits = kDefaultPrecisionBits;

  int dim() const { return layout.dim; }
  std::size_t size() const { return layout.points.size(); }
  bool has_radii() const { return !logR.empty(); }
  std::size_t annuli() const { return logR.size(); }

  // 1-based accessors, j = 1 .. size().
  int block_of(std::size_t j) const { return layout.points.at(j - 1).block; }
  std::vector<double> x(std::size_t j) const;
  std::vector<BigFloat> x_big(std::size_t j) const;
  std::optional<std::vector<Rational>> x_exact(std::size_t j) const;
  const Rational& t(std::size_t j) const { return times.at(j - 1); }
  double t_double(std::size_t j) const { return to_double(t(j)); }
  const BigFloat& log_inner(std::size_t j) const { return logR.at(j - 1); }
  const BigFloat& log_outer(std::size_t j) const { return logRp.at(j - 1); }

  std::optional<Rational> delta_exact(int k) const;
  std::optional<Rational> delta_squared_exact(int k) const;
};

struct ScheduleParams {
  ApproachCurve gamma = ApproachCurve::identity();
  int dim = 1;
  int k_max = 2;
  RadiiOptions radii;
  unsigned precision_bits = kDefaultPrecisionBits;
};

// precision_bits is a floor: it is raised (in steps of 64) until the radius
// margins survive rounding at the largest log R'_j. The schedule records the
// precision actually used.
Schedule build_schedule(const PhaseSymbol& s, const ScheduleParams& params);

// Smallest integer N >= 2 with 1 - 2 N^{B-1} >= 1/2.
int choose_N(double B);

struct ConditionMargin {
  std::string condition;    // "1a", "1b", "2", "3", "4", "5a", "5b"
  BigFloat log_margin;      // log of the minimum multiplicative margin
  std::size_t j = 0;        // where the minimum is attained
  std::size_t l = 0;
  bool satisfied = true;
  double margin() const;    // exp(log_margin), inf when beyond double range
};

struct Violation {
  std::string condition;
  std::size_t j = 0;
  std::size_t l = 0;
  std::string detail;
};

struct ScheduleReport {
  std::vector<ConditionMargin> margins;
  std::vector<Violation> violations;
  std::size_t checked_points = 0;
  bool ok() const { return violations.empty(); }
  const ConditionMargin* find(const std::string& id) const;
};

// Re-derives every condition from the stored schedule using exact rationals
// for times and (when available) points, without touching builder state.
ScheduleReport verify_schedule(const Schedule& sch);

struct ApproachPair {
  std::size_t index = 0;  // 1-based point index n_j
  int block = 0;
  std::vector<double> point;
  Rational time;
  double distance = 0.0;
  double gamma_t = 0.0;
  bool exact = false;     // whether the inequality was decided in exact arithmetic
};

// For each block k >= max(k_min, k_x), the lattice point of that block nearest
// to x (lexicographic tie-break) together with its time. k_x is the first
// block with |x| + delta_{k+1} sqrt(d) / 2 < k + 1, at most ceil|x|.
std::vector<ApproachPair> dense_approach(const Schedule& sch, std::span<const double> x,
                                         int k_min, int count);

}  // namespace nontan
