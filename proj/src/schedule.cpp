#include "nontan/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nontan/errors.hpp"

namespace nontan {

namespace mp = boost::multiprecision;

namespace {

Rational rational_pow(const Rational& base, long long e) {
  Rational out(1);
  for (long long i = 0; i < e; ++i) out *= base;
  return out;
}

bool is_integer(double v) { return v == std::floor(v) && std::abs(v) < 64; }

std::optional<long long> integer_sqrt(int d) {
  const auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(d))));
  if (r * r == d) return r;
  return std::nullopt;
}

BigFloat delta_big(const ApproachCurve& g, int dim, int k) {
  return g.eval(BigFloat(1) / BigFloat(k + 1)) / mp::sqrt(BigFloat(dim));
}

std::optional<Rational> delta_exact_of(const ApproachCurve& g, int dim, int k) {
  const auto root = integer_sqrt(dim);
  if (!root) return std::nullopt;
  auto gv = g.exact(Rational(1, k + 1));
  if (!gv) return std::nullopt;
  return *gv / Rational(*root);
}

std::optional<Rational> delta_squared_exact_of(const ApproachCurve& g, int dim, int k) {
  auto g2 = g.exact_square(Rational(1, k + 1));
  if (!g2) return std::nullopt;
  return *g2 / Rational(dim);
}

long long squared_norm(const std::vector<long long>& z) {
  long long s = 0;
  for (auto v : z) s += v * v;
  return s;
}

// Whether delta * z lies in the open ball of radius rho.
bool in_ball(const std::vector<long long>& z, const std::optional<Rational>& delta_sq,
             const BigFloat& delta, int rho) {
  const long long n2 = squared_norm(z);
  if (delta_sq) return Rational(n2) * *delta_sq < Rational(rho) * Rational(rho);
  return BigFloat(n2) * delta * delta < BigFloat(rho) * BigFloat(rho);
}

std::vector<BigFloat> point_big(const BlockLayout& layout, std::size_t idx) {
  const auto& p = layout.points[idx];
  const BigFloat& delta = layout.deltas[p.block + 1];
  std::vector<BigFloat> out;
  out.reserve(p.z.size());
  for (auto v : p.z) out.push_back(delta * BigFloat(v));
  return out;
}

BigFloat distance_big(const std::vector<BigFloat>& a, const std::vector<BigFloat>& b) {
  BigFloat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return mp::sqrt(s);
}

std::string describe(const BigFloat& v) {
  std::ostringstream os;
  os << v.str(12);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ApproachCurve

ApproachCurve ApproachCurve::power(double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("power approach curve needs alpha > 0");
  return ApproachCurve(Kind::power, alpha);
}

ApproachCurve ApproachCurve::parse(const std::string& text) {
  if (text == "identity") return identity();
  if (text == "sqrt") return sqrt();
  if (text.rfind("power:", 0) == 0) return power(std::stod(text.substr(6)));
  throw ValidationError("unknown approach curve '" + text + "' (identity | sqrt | power:<alpha>)");
}

std::string ApproachCurve::name() const {
  switch (kind_) {
    case Kind::identity: return "identity";
    case Kind::sqrt: return "sqrt";
    case Kind::power: {
      std::ostringstream os;
      os << "power:" << alpha_;
      return os.str();
    }
  }
  return "identity";
}

double ApproachCurve::operator()(double t) const {
  switch (kind_) {
    case Kind::identity: return t;
    case Kind::sqrt: return std::sqrt(t);
    case Kind::power: return std::pow(t, alpha_);
  }
  return t;
}

BigFloat ApproachCurve::eval(const BigFloat& t) const {
  switch (kind_) {
    case Kind::identity: return t;
    case Kind::sqrt: return mp::sqrt(t);
    case Kind::power: return mp::pow(t, BigFloat(alpha_));
  }
  return t;
}

double ApproachCurve::inverse(double y) const {
  switch (kind_) {
    case Kind::identity: return y;
    case Kind::sqrt: return y * y;
    case Kind::power: return std::pow(y, 1.0 / alpha_);
  }
  return y;
}

std::optional<Rational> ApproachCurve::exact(const Rational& t) const {
  switch (kind_) {
    case Kind::identity: return t;
    case Kind::sqrt: return std::nullopt;
    case Kind::power:
      if (is_integer(alpha_)) return rational_pow(t, static_cast<long long>(alpha_));
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Rational> ApproachCurve::exact_square(const Rational& t) const {
  switch (kind_) {
    case Kind::identity: return t * t;
    case Kind::sqrt: return t;
    case Kind::power:
      if (is_integer(2.0 * alpha_)) return rational_pow(t, static_cast<long long>(2.0 * alpha_));
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Blocks and times

BlockLayout build_blocks(const ApproachCurve& gamma, int dim, int k_max) {
  if (dim < 1) throw ValidationError("dimension must be >= 1");
  if (k_max < 0) throw ValidationError("k_max must be >= 0");
  BlockLayout out;
  out.dim = dim;
  out.gamma = gamma;
  for (int k = 0; k <= k_max + 1; ++k) out.deltas.push_back(delta_big(gamma, dim, k));
  out.blocks.push_back(0);
  for (int k = 0; k <= k_max; ++k) {
    const int rho = k + 1;
    const BigFloat& delta = out.deltas[k + 1];
    const auto delta_sq = delta_squared_exact_of(gamma, dim, k + 1);
    const auto M = static_cast<long long>(mp::floor(BigFloat(rho) / delta).convert_to<double>());
    std::vector<long long> z(static_cast<std::size_t>(dim), -M);
    const std::size_t before = out.points.size();
    while (true) {
      if (in_ball(z, delta_sq, delta, rho)) out.points.push_back({k, z});
      int a = dim - 1;
      for (; a >= 0; --a) {
        if (++z[a] <= M) break;
        z[a] = -M;
      }
      if (a < 0) break;
    }
    if (out.points.size() == before) throw std::logic_error("empty lattice block");
    out.blocks.push_back(out.points.size());
  }
  return out;
}

std::vector<Rational> assign_times(const BlockLayout& layout) {
  std::vector<Rational> times;
  times.reserve(layout.points.size());
  for (int k = 0; k < layout.block_count(); ++k) {
    const auto n = static_cast<long long>(layout.blocks[k + 1] - layout.blocks[k]);
    const Rational top(1, k + 1);
    const Rational step = Rational(1, (k + 1) * (k + 2)) / Rational(n + 1);
    for (long long i = 1; i <= n; ++i) times.push_back(top - Rational(i) * step);
  }
  return times;
}

// ---------------------------------------------------------------------------
// Radii

Radii build_radii(const PhaseSymbol& s, const BlockLayout& layout,
                  const std::vector<Rational>& times, const RadiiOptions& opt) {
  if (opt.N < 2) throw ValidationError("N must be >= 2");
  if (!(opt.R1 >= 2.0 + s.R())) throw ValidationError("R1 must satisfy R1 >= 2 + R");
  if (!(opt.relax > 0.0 && opt.relax <= 1.0)) throw ValidationError("relax must lie in (0, 1]");
  if (!(opt.margin_fraction > 0.0)) throw ValidationError("margin must be positive");
  if (times.size() != layout.points.size()) throw ValidationError("times/points size mismatch");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] < times[i - 1])) throw ValidationError("times not strictly decreasing");
  }

  const int dim = layout.dim;
  const BigFloat margin = mp::log1p(BigFloat(opt.margin_fraction));
  const BigFloat min_beta(std::min(s.beta(), 1.0));
  const BigFloat log_kappa = mp::log(to_big(exact_rational(opt.relax)));
  const BigFloat log2 = mp::log(BigFloat(2));
  const BigFloat N(opt.N);

  std::vector<std::vector<BigFloat>> xs;
  xs.reserve(layout.points.size());
  for (std::size_t i = 0; i < layout.points.size(); ++i) xs.push_back(point_big(layout, i));

  Radii out;
  const BigFloat log_R1 = mp::log(BigFloat(opt.R1));
  out.logR.push_back(log_R1);
  const BigFloat a = N * log_R1, b = mp::log(BigFloat(opt.R1) + 1);
  out.logRp.push_back(a > b ? a : b);

  for (std::size_t idx = 1; idx < layout.points.size(); ++idx) {
    const auto j = static_cast<long long>(idx + 1);
    BigFloat lr = out.logRp.back() + margin;

    // R_j^{min(beta,1)} > kappa 2^j / (t_l - t_j); the binding l is j-1.
    const BigFloat gap = to_big(times[idx - 1] - times[idx]);
    const BigFloat growth = (log_kappa + BigFloat(j) * log2 - mp::log(gap)) / min_beta + margin;
    if (growth > lr) lr = growth;

    // inf_{[R_j,R'_j]} |phi'| > max_l 2|x_l - x_j| / (t_l - t_j).
    BigFloat demand = 0;
    for (std::size_t l = 0; l < idx; ++l) {
      const BigFloat v = 2 * distance_big(xs[l], xs[idx]) / to_big(times[l] - times[idx]);
      if (v > demand) demand = v;
    }
    if (demand > 0) {
      const auto r0 = s.log_radius_d1_exceeds(mp::log(demand), dim);
      if (!r0) {
        std::ostringstream msg;
        msg << "derivative condition unsolvable at j=" << j << ": |phi'| stays bounded but must exceed "
            << describe(demand) << " (liminf inf|phi'| = infinity is required)";
        throw ValidationError(msg.str());
      }
      const BigFloat need = *r0 + margin;
      if (need > lr) lr = need;
    }
    out.logR.push_back(lr);
    out.logRp.push_back(N * lr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schedule

std::vector<double> Schedule::x(std::size_t j) const {
  std::vector<double> out;
  for (const auto& v : x_big(j)) out.push_back(to_double(v));
  return out;
}

std::vector<BigFloat> Schedule::x_big(std::size_t j) const { return point_big(layout, j - 1); }

std::optional<std::vector<Rational>> Schedule::x_exact(std::size_t j) const {
  const auto& p = layout.points.at(j - 1);
  const auto delta = delta_exact(p.block + 1);
  if (!delta) return std::nullopt;
  std::vector<Rational> out;
  for (auto v : p.z) out.push_back(*delta * Rational(v));
  return out;
}

std::optional<Rational> Schedule::delta_exact(int k) const {
  return delta_exact_of(layout.gamma, layout.dim, k);
}

std::optional<Rational> Schedule::delta_squared_exact(int k) const {
  return delta_squared_exact_of(layout.gamma, layout.dim, k);
}

// Bits needed so that the margin added to log R'_j is not absorbed by rounding.
static unsigned bits_needed(const Radii& r, double margin_fraction) {
  BigFloat top = 1;
  for (const auto& v : r.logRp) top = mp::max(top, BigFloat(mp::abs(v)));
  const double need = to_double(mp::log2(top)) - std::log2(std::log1p(margin_fraction)) + 64.0;
  if (!(need < 1e6)) throw ValidationError("schedule radii need more than 1e6 bits of precision");
  return static_cast<unsigned>(std::ceil(need));
}

Schedule build_schedule(const PhaseSymbol& s, const ScheduleParams& params) {
  unsigned bits = params.precision_bits;
  for (;;) {
    PrecisionScope prec(bits);
    BlockLayout layout = build_blocks(params.gamma, params.dim, params.k_max);
    std::vector<Rational> times = assign_times(layout);
    Radii radii = build_radii(s, layout, times, params.radii);
    const unsigned need = bits_needed(radii, params.radii.margin_fraction);
    if (need <= bits) {
      return Schedule{std::move(layout), s,      std::move(times), std::move(radii.logR),
                      std::move(radii.logRp),    params.radii,     bits};
    }
    bits = (need + 63) / 64 * 64;
  }
}

int choose_N(double B) {
  if (!(B > 0.0 && B < 1.0)) throw ValidationError("B must lie in (0, 1)");
  // 1 - 2 N^{B-1} >= 1/2  <=>  N >= 4^{1/(1-B)}
  const double target = std::pow(4.0, 1.0 / (1.0 - B));
  auto ok = [B](double n) { return 1.0 - 2.0 * std::pow(n, B - 1.0) >= 0.5 - 1e-12; };
  double n = std::max(2.0, std::ceil(target - 1e-9));
  while (n > 2.0 && ok(n - 1.0)) n -= 1.0;
  while (!ok(n)) n += 1.0;
  if (n > static_cast<double>(std::numeric_limits<int>::max())) {
    throw ValidationError("auto-selected N overflows; choose B further from 1");
  }
  return static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// Verification

double ConditionMargin::margin() const {
  if (log_margin > 700) return std::numeric_limits<double>::infinity();
  return to_double(mp::exp(log_margin));
}

const ConditionMargin* ScheduleReport::find(const std::string& id) const {
  for (const auto& m : margins) {
    if (m.condition == id) return &m;
  }
  return nullptr;
}

namespace {

enum class Relation { strict, non_strict, equality };

class MarginTracker {
 public:
  MarginTracker(ScheduleReport& rep, std::string id, Relation rel, BigFloat tol = 0)
      : rep_(rep), id_(std::move(id)), rel_(rel), tol_(std::move(tol)) {}

  void record(const BigFloat& log_margin, std::size_t j, std::size_t l, const std::string& what) {
    bool ok = true;
    switch (rel_) {
      case Relation::strict: ok = log_margin > 0; break;
      case Relation::non_strict: ok = log_margin >= 0; break;
      case Relation::equality: ok = mp::abs(log_margin) <= tol_; break;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << what << " (log margin " << describe(log_margin) << ")";
      rep_.violations.push_back({id_, j, l, msg.str()});
    }
    const bool worse = rel_ == Relation::equality ? (!seen_ || mp::abs(log_margin) > mp::abs(min_))
                                                  : (!seen_ || log_margin < min_);
    if (worse) {
      min_ = log_margin;
      j_ = j;
      l_ = l;
      seen_ = true;
    }
    all_ok_ = all_ok_ && ok;
  }

  void finish() {
    if (!seen_) return;
    rep_.margins.push_back({id_, min_, j_, l_, all_ok_});
  }

 private:
  ScheduleReport& rep_;
  std::string id_;
  Relation rel_;
  BigFloat tol_;
  BigFloat min_;
  std::size_t j_ = 0, l_ = 0;
  bool seen_ = false;
  bool all_ok_ = true;
};

}  // namespace

ScheduleReport verify_schedule(const Schedule& sch) {
  PrecisionScope prec(sch.precision_bits);
  ScheduleReport rep;
  const auto& L = sch.layout;
  const int dim = L.dim;
  const PhaseSymbol& s = sch.symbol;
  const std::size_t n = sch.size();
  rep.checked_points = n;

  // Deltas and lattice blocks.
  for (int k = 0; k + 1 < static_cast<int>(L.deltas.size()); ++k) {
    if (!(L.deltas[k + 1] < L.deltas[k])) {
      rep.violations.push_back({"delta", static_cast<std::size_t>(k + 1), 0,
                                "delta_k not strictly decreasing"});
    }
  }
  const BigFloat delta_tol = mp::ldexp(BigFloat(1), -static_cast<int>(sch.precision_bits) + 16);
  for (int k = 0; k < static_cast<int>(L.deltas.size()); ++k) {
    const BigFloat want = L.gamma.eval(BigFloat(1) / BigFloat(k + 1)) / mp::sqrt(BigFloat(dim));
    if (mp::abs(want - L.deltas[k]) > delta_tol * want) {
      rep.violations.push_back({"delta", static_cast<std::size_t>(k), 0,
                                "delta_k differs from gamma(1/(k+1))/sqrt(d)"});
    }
  }
  if (L.blocks.empty() || L.blocks.front() != 0 || L.blocks.back() != n) {
    rep.violations.push_back({"blocks", 0, 0, "block boundaries inconsistent with point count"});
  } else {
    for (int k = 0; k < L.block_count(); ++k) {
      const int rho = k + 1;
      const auto dsq = sch.delta_squared_exact(k + 1);
      const BigFloat& delta = L.deltas[k + 1];
      const BigFloat rho_big(rho);
      auto inside = [&](const std::vector<long long>& z) {
        if (dsq) return Rational(squared_norm(z)) * *dsq < Rational(rho * rho);
        BigFloat acc = 0;
        for (auto v : z) acc += (delta * v) * (delta * v);
        return mp::sqrt(acc) < rho_big;
      };
      for (std::size_t idx = L.blocks[k]; idx < L.blocks[k + 1]; ++idx) {
        const auto& p = L.points[idx];
        if (p.block != k || static_cast<int>(p.z.size()) != dim || !inside(p.z)) {
          rep.violations.push_back({"blocks", idx + 1, 0, "point is not in B_{k+1}(0) ∩ delta Z^d"});
        }
        if (idx > L.blocks[k] && !(L.points[idx - 1].z < p.z)) {
          rep.violations.push_back({"blocks", idx + 1, 0, "block not in strict lexicographic order"});
        }
      }
      // Count lattice points of the ball one coordinate row at a time.
      const auto M = static_cast<long long>(mp::floor(rho_big / delta).convert_to<double>()) + 1;
      std::size_t count = 0;
      std::vector<long long> z(static_cast<std::size_t>(dim), -M);
      while (true) {
        if (inside(z)) ++count;
        int a = 0;
        for (; a < dim; ++a) {
          if (++z[a] <= M) break;
          z[a] = -M;
        }
        if (a == dim) break;
      }
      if (count != L.blocks[k + 1] - L.blocks[k]) {
        rep.violations.push_back({"blocks", static_cast<std::size_t>(k), 0,
                                  "block size differs from lattice count of the ball"});
      }
    }
  }

  // Times.
  if (sch.times.size() != n) {
    rep.violations.push_back({"times", 0, 0, "time count differs from point count"});
    return rep;
  }
  if (n > 0 && !(sch.times[0] < 1)) rep.violations.push_back({"times", 1, 0, "t_1 must be < 1"});
  bool decreasing = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(sch.times[i] < sch.times[i - 1])) {
      rep.violations.push_back({"times", i + 1, i, "times not strictly decreasing"});
      decreasing = false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int k = L.points[i].block;
    if (!(sch.times[i] > Rational(1, k + 2) && sch.times[i] < Rational(1, k + 1))) {
      rep.violations.push_back({"times", i + 1, 0, "t_j outside (1/(k+2), 1/(k+1))"});
    }
  }

  if (!sch.has_radii()) return rep;
  if (sch.logR.size() != n || sch.logRp.size() != n) {
    rep.violations.push_back({"radii", 0, 0, "radius count differs from point count"});
    return rep;
  }

  // (1)
  {
    MarginTracker c1a(rep, "1a", Relation::non_strict), c1b(rep, "1b", Relation::non_strict);
    c1a.record(sch.logR[0] - mp::log(BigFloat(2) + BigFloat(s.R())), 1, 0, "R_1 < 2 + R");
    c1b.record(sch.logRp[0] - mp::log(mp::exp(sch.logR[0]) + 1), 1, 0, "R'_1 < R_1 + 1");
    c1a.finish();
    c1b.finish();
  }
  // (2)
  {
    const BigFloat tol = mp::ldexp(BigFloat(1), -static_cast<int>(sch.precision_bits) + 24);
    MarginTracker c2(rep, "2", Relation::equality, tol);
    for (std::size_t j = 2; j <= n; ++j) {
      const BigFloat diff = sch.logRp[j - 1] - BigFloat(sch.radii.N) * sch.logR[j - 1];
      c2.record(diff / (mp::abs(sch.logRp[j - 1]) + 1), j, 0, "R'_j != R_j^N");
    }
    c2.finish();
  }
  // (3)
  {
    MarginTracker c3(rep, "3", Relation::strict);
    for (std::size_t j = 1; j <= n; ++j) {
      c3.record(sch.logRp[j - 1] - sch.logR[j - 1], j, 0, "R'_j <= R_j");
      if (j < n) c3.record(sch.logR[j] - sch.logRp[j - 1], j + 1, j, "R_{j+1} <= R'_j");
    }
    c3.finish();
  }
  // (4)
  {
    MarginTracker c4(rep, "4", Relation::strict);
    BigFloat top = sch.logRp[0];
    for (const auto& v : sch.logRp) top = v > top ? v : top;
    c4.record(s.log_inf_abs_d1(mp::log(BigFloat(s.R())), top, dim), 0, 0, "|phi'| <= 1 on r >= R");
    c4.finish();
  }
  // (5a), (5b)
  if (decreasing) {
    MarginTracker c5a(rep, "5a", Relation::strict), c5b(rep, "5b", Relation::strict);
    const BigFloat min_beta(std::min(s.beta(), 1.0));
    const Rational kappa = exact_rational(sch.radii.relax);
    std::vector<std::optional<std::vector<Rational>>> exact_pts(n);
    std::vector<std::vector<BigFloat>> big_pts(n);
    for (std::size_t j = 1; j <= n; ++j) {
      exact_pts[j - 1] = sch.x_exact(j);
      big_pts[j - 1] = sch.x_big(j);
    }
    for (std::size_t j = 2; j <= n; ++j) {
      const BigFloat lhs5a = min_beta * sch.logR[j - 1];
      const BigFloat lhs5b = s.log_inf_abs_d1(sch.logR[j - 1], sch.logRp[j - 1], dim);
      const Rational two_j = Rational(BigInt(1) << j);
      for (std::size_t l = 1; l < j; ++l) {
        const Rational gap = sch.times[l - 1] - sch.times[j - 1];
        const Rational rhs5a = kappa * two_j / gap;
        c5a.record(lhs5a - mp::log(to_big(rhs5a)), j, l, "R_j^{min(beta,1)} <= kappa 2^j/(t_l - t_j)");

        BigFloat dist;
        if (exact_pts[l - 1] && exact_pts[j - 1]) {
          Rational sq = 0;
          for (int a = 0; a < dim; ++a) {
            const Rational diff = (*exact_pts[l - 1])[a] - (*exact_pts[j - 1])[a];
            sq += diff * diff;
          }
          dist = mp::sqrt(to_big(sq));
        } else {
          dist = distance_big(big_pts[l - 1], big_pts[j - 1]);
        }
        if (dist == 0) continue;
        const BigFloat rhs5b = 2 * dist / to_big(gap);
        c5b.record(lhs5b - mp::log(rhs5b), j, l, "inf |phi'| <= 2|x_l - x_j|/(t_l - t_j)");
      }
    }
    c5a.finish();
    c5b.finish();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Approach sequence

std::vector<ApproachPair> dense_approach(const Schedule& sch, std::span<const double> x,
                                         int k_min, int count) {
  const int dim = sch.dim();
  if (static_cast<int>(x.size()) != dim) throw ValidationError("point dimension mismatch");
  if (count < 1) throw ValidationError("count must be >= 1");
  PrecisionScope prec(sch.precision_bits);

  std::vector<Rational> xr;
  Rational norm_sq = 0;
  for (double v : x) {
    xr.push_back(exact_rational(v));
    norm_sq += xr.back() * xr.back();
  }
  // smallest integer >= |x|
  long long ceil_norm = static_cast<long long>(std::ceil(std::sqrt(to_double(norm_sq))));
  while (ceil_norm > 0 && Rational(ceil_norm - 1) * Rational(ceil_norm - 1) >= norm_sq) --ceil_norm;
  while (Rational(ceil_norm) * Rational(ceil_norm) < norm_sq) ++ceil_norm;

  // First block whose ball holds x together with its nearest-point cell:
  // |x| + delta_{k+1} sqrt(d) / 2 < k + 1. Never later than ceil|x|.
  long long first = 0;
  const BigFloat norm_x = mp::sqrt(to_big(norm_sq));
  const BigFloat root_d = mp::sqrt(BigFloat(dim));
  while (first < ceil_norm && first + 1 < static_cast<long long>(sch.layout.deltas.size()) &&
         !(norm_x + sch.layout.deltas[first + 1] * root_d / 2 < BigFloat(first + 1))) {
    ++first;
  }
  const int k0 = static_cast<int>(std::max<long long>(k_min, std::min(first, ceil_norm)));
  if (k0 + count - 1 > sch.layout.block_count() - 1) {
    std::ostringstream msg;
    msg << "schedule has blocks up to k=" << sch.layout.block_count() - 1 << " but the approach needs k="
        << k0 + count - 1;
    throw ValidationError(msg.str());
  }

  std::vector<ApproachPair> out;
  for (int k = k0; k < k0 + count; ++k) {
    const auto delta_q = sch.delta_exact(k + 1);
    const BigFloat& delta = sch.layout.deltas[k + 1];
    std::vector<long long> z(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
      // nearest integer to x_a / delta, ties to the smaller one
      if (delta_q) {
        const Rational q = xr[a] / *delta_q;
        const BigInt fl = [&] {
          BigInt num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
          BigInt f = num / den;
          if (num < 0 && f * den != num) f -= 1;
          return f;
        }();
        const Rational frac = q - Rational(fl);
        z[a] = static_cast<long long>(frac > Rational(1, 2) ? fl + 1 : fl);
      } else {
        const BigFloat q = to_big(xr[a]) / delta;
        const BigFloat fl = mp::floor(q);
        z[a] = static_cast<long long>((q - fl > BigFloat(0.5) ? fl + 1 : fl).convert_to<double>());
      }
    }
    const auto first = sch.layout.points.begin() + static_cast<long>(sch.layout.blocks[k]);
    const auto last = sch.layout.points.begin() + static_cast<long>(sch.layout.blocks[k + 1]);
    const auto it = std::lower_bound(first, last, z, [](const LatticePoint& p, const std::vector<long long>& key) {
      return p.z < key;
    });
    if (it == last || it->z != z) throw std::logic_error("nearest lattice point is outside its block");
    const std::size_t j = static_cast<std::size_t>(it - sch.layout.points.begin()) + 1;

    ApproachPair pair;
    pair.index = j;
    pair.block = k;
    pair.point = sch.x(j);
    pair.time = sch.t(j);
    const auto g_sq = sch.layout.gamma.exact_square(pair.time);
    const auto xe = sch.x_exact(j);
    bool holds = false;
    if (g_sq && xe) {
      Rational d2 = 0;
      for (int a = 0; a < dim; ++a) d2 += ((*xe)[a] - xr[a]) * ((*xe)[a] - xr[a]);
      holds = d2 < *g_sq;
      pair.exact = true;
      pair.distance = std::sqrt(to_double(d2));
    } else {
      const auto xb = sch.x_big(j);
      BigFloat d2 = 0;
      for (int a = 0; a < dim; ++a) d2 += (xb[a] - to_big(xr[a])) * (xb[a] - to_big(xr[a]));
      const BigFloat dist = mp::sqrt(d2);
      holds = dist < sch.layout.gamma.eval(to_big(pair.time));
      pair.distance = to_double(dist);
    }
    pair.gamma_t = sch.layout.gamma(to_double(pair.time));
    if (!holds) throw std::logic_error("approach pair violates |x_n - x| < gamma(t_n)");
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace nontan
