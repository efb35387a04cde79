#include "nontan/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "nontan/certifier.hpp"
#include "nontan/errors.hpp"
#include "nontan/oscillatory.hpp"

namespace nontan {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) {
    throw ValidationError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
  return static_cast<int>(d);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

// Values of the config keys that were given as flags.
struct Overrides {
  std::map<std::string, std::string> values;
  std::string config_path;

  void add_to(CLI::App* app, const std::vector<std::string>& keys) {
    app->add_option("--config", config_path, "key=value config file");
    for (const auto& k : keys) {
      std::string flag = "--" + k;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (k == "k_max") flag = "--kmax";
      app->add_option(flag, values[k], "config key " + k);
    }
  }

  RunConfig apply(RunConfig base, CLI::App* app) const {
    if (!config_path.empty()) base = parse_config_text(read_file(config_path));
    for (const auto& [k, v] : values) {
      std::string flag = "--" + k;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (k == "k_max") flag = "--kmax";
      if (app->count(flag) > 0) config_set(base, k, v);
    }
    return base;
  }
};

CounterexampleSpec spec_for(const Schedule& sch, const Json& cfg) {
  double p = 2.0;
  if (cfg.contains("p")) p = cfg["p"].is_number() ? cfg["p"].get<double>() : kInfinity;
  std::optional<double> B;
  if (cfg.contains("B") && cfg["B"].is_number()) B = cfg["B"].get<double>();
  return single_spec(sch, p, B);
}

EvalPoint parse_point(const Schedule& sch, const std::string& text) {
  if (text.rfind("k=", 0) == 0) {
    const int k = parse_int("point", text.substr(2));
    if (k < 1 || static_cast<std::size_t>(k) > sch.size()) throw ValidationError("point index out of range");
    return lattice_point(sch, static_cast<std::size_t>(k));
  }
  std::vector<double> x;
  std::optional<double> t;
  for (const auto& part : split(text, ',')) {
    if (part.rfind("x=", 0) == 0) {
      for (const auto& c : split(part.substr(2), ':')) x.push_back(parse_double("point", c));
    } else if (part.rfind("t=", 0) == 0) {
      t = parse_double("point", part.substr(2));
    } else {
      throw ValidationError("point must be 'k=<index>' or 'x=<x1>[:<x2>...],t=<t>'");
    }
  }
  if (!t || static_cast<int>(x.size()) != sch.dim()) {
    throw ValidationError("point needs t and x with " + std::to_string(sch.dim()) + " coordinates");
  }
  return free_point(x, *t);
}

Json margins_json(const ScheduleReport& rep) {
  Json arr = Json::array();
  for (const auto& m : rep.margins) {
    arr.push_back({{"condition", m.condition},
                   {"log_margin", to_decimal(m.log_margin)},
                   {"margin", std::isfinite(m.margin()) ? Json(m.margin()) : Json("inf")},
                   {"j", m.j},
                   {"l", m.l},
                   {"satisfied", m.satisfied}});
  }
  return arr;
}

double min_margin(const ScheduleReport& rep) {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& m : rep.margins) mn = std::min(mn, m.margin());
  return mn;
}

Json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

struct LoadedSchedule {
  Schedule sch;
  Json config;
  std::string hash;
};

LoadedSchedule load(const std::string& path) {
  Json cfg;
  std::string hash;
  Schedule s = load_schedule(read_file(path), &cfg, &hash);
  return {std::move(s), std::move(cfg), std::move(hash)};
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "gamma", "d",     "d1", "d2",    "symbol", "a", "p",   "q",     "B",
      "split_k", "N", "relax", "R1", "k_max", "m",  "precision_bits", "panel_budget"};
  return keys;
}

void config_set(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto opt_double = [&](std::optional<double>& dst) {
    if (v == "auto") {
      dst.reset();
    } else {
      dst = parse_double(key, v);
    }
  };
  if (key == "gamma") {
    ApproachCurve::parse(v);
    c.gamma = v;
  } else if (key == "d") {
    c.d = parse_int(key, v);
  } else if (key == "d1") {
    c.d1 = parse_int(key, v);
  } else if (key == "d2") {
    c.d2 = parse_int(key, v);
  } else if (key == "symbol") {
    if (v != "power") throw ValidationError("only symbol = power is available from configuration");
    c.symbol = v;
  } else if (key == "a") {
    c.a = parse_double(key, v);
  } else if (key == "p") {
    c.p = (v == "inf" || v == "infinity") ? kInfinity : parse_double(key, v);
  } else if (key == "q") {
    opt_double(c.q);
  } else if (key == "B") {
    opt_double(c.B);
  } else if (key == "split_k") {
    opt_double(c.split_k);
  } else if (key == "N") {
    if (v == "auto") {
      c.N.reset();
    } else {
      c.N = parse_int(key, v);
    }
  } else if (key == "relax") {
    c.relax = parse_double(key, v);
  } else if (key == "R1") {
    c.R1 = parse_double(key, v);
  } else if (key == "k_max") {
    c.k_max = parse_int(key, v);
  } else if (key == "m") {
    c.m = parse_int(key, v);
  } else if (key == "precision_bits") {
    const int b = parse_int(key, v);
    if (b < 64) throw ValidationError("precision_bits must be >= 64");
    c.precision_bits = static_cast<unsigned>(b);
  } else if (key == "panel_budget") {
    c.panel_budget = parse_double(key, v);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

std::string config_get(const RunConfig& c, const std::string& key) {
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("auto"); };
  if (key == "gamma") return c.gamma;
  if (key == "d") return std::to_string(c.d);
  if (key == "d1") return std::to_string(c.d1);
  if (key == "d2") return std::to_string(c.d2);
  if (key == "symbol") return c.symbol;
  if (key == "a") return num(c.a);
  if (key == "p") return std::isinf(c.p) ? "inf" : num(c.p);
  if (key == "q") return opt(c.q);
  if (key == "B") return opt(c.B);
  if (key == "split_k") return opt(c.split_k);
  if (key == "N") return c.N ? std::to_string(*c.N) : "auto";
  if (key == "relax") return num(c.relax);
  if (key == "R1") return num(c.R1);
  if (key == "k_max") return std::to_string(c.k_max);
  if (key == "m") return std::to_string(c.m);
  if (key == "precision_bits") return std::to_string(c.precision_bits);
  if (key == "panel_budget") return num(c.panel_budget);
  throw ValidationError("unknown config key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    config_set(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream os;
  for (const auto& k : config_keys()) os << k << " = " << config_get(c, k) << "\n";
  return os.str();
}

Json config_to_json(const RunConfig& c) {
  Json j;
  for (const auto& k : config_keys()) {
    const std::string v = config_get(c, k);
    if (k == "gamma" || k == "symbol" || v == "auto" || v == "inf") {
      j[k] = v;
    } else if (k == "d" || k == "d1" || k == "d2" || k == "N" || k == "k_max" || k == "m" ||
               k == "precision_bits") {
      j[k] = static_cast<long long>(parse_double(k, v));
    } else {
      j[k] = parse_double(k, v);
    }
  }
  return j;
}

RunConfig resolve_config(RunConfig c) {
  if (c.d < 1) throw ValidationError("d must be >= 1");
  if (c.q) {
    if (!c.B || !c.split_k) {
      const auto [B, k] = choose_B_split(c.p, *c.q);
      if (!c.B) c.B = B;
      if (!c.split_k) c.split_k = k;
    }
    if (c.d1 > 0 || c.d2 > 0) {
      CounterexampleSpec spec{c.d, c.p, *c.B, c.R1, *c.q, *c.split_k, c.d1, c.d2};
      validate_mixed(spec);
    }
  } else {
    if (!c.B) c.B = choose_B(c.p);
    validate_single(CounterexampleSpec{c.d, c.p, *c.B, c.R1});
  }
  if (!c.N) c.N = choose_N(*c.B);
  if (*c.N < 2) throw ValidationError("N must be >= 2");
  if (!(c.relax > 0.0 && c.relax <= 1.0)) throw ValidationError("relax must lie in (0, 1]");
  if (c.k_max < 0) throw ValidationError("kmax must be >= 0");
  return c;
}

Schedule build_from_config(const RunConfig& c) {
  ScheduleParams prm;
  prm.gamma = ApproachCurve::parse(c.gamma);
  prm.dim = c.d;
  prm.k_max = c.k_max;
  prm.radii.N = *c.N;
  prm.radii.R1 = c.R1;
  prm.radii.relax = c.relax;
  prm.precision_bits = c.precision_bits;
  return build_schedule(power_symbol(c.a), prm);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterexample schedules, oscillatory sums and certificates"};
  app.require_subcommand(1);
  const auto& keys = config_keys();

  // build-schedule
  auto* build = app.add_subcommand("build-schedule", "construct points, times and radii");
  Overrides build_ov;
  build_ov.add_to(build, keys);
  std::string build_out;
  build->add_option("-o,--output", build_out, "output JSON (stdout when omitted)");

  // verify-schedule
  auto* verify = app.add_subcommand("verify-schedule", "re-check every schedule condition");
  std::string verify_in, verify_out;
  verify->add_option("schedule", verify_in)->required();
  verify->add_option("-o,--output", verify_out);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate the partial sum S_m f at a point");
  std::string eval_in, eval_out, eval_point = "k=1", eval_mode = "auto";
  std::size_t eval_m = 1;
  double eval_budget = 1e7;
  eval->add_option("schedule", eval_in)->required();
  eval->add_option("--point", eval_point, "k=<index> or x=<x1>[:<x2>],t=<t>");
  eval->add_option("--m", eval_m);
  eval->add_option("--mode", eval_mode, "direct | ibp | auto");
  eval->add_option("--panel-budget", eval_budget);
  eval->add_option("-o,--output", eval_out);

  // norm
  auto* norm = app.add_subcommand("norm", "Fourier-Lebesgue norm bounds");
  std::string norm_in, norm_out, norm_s = "auto", norm_p_text;
  std::string norm_B = "auto", norm_q, norm_k = "auto", norm_s1 = "auto", norm_s2 = "auto";
  int norm_d1 = 1, norm_d2 = 1;
  double norm_mu = 3.0;
  std::size_t norm_jmax = 0;
  norm->add_option("schedule", norm_in);
  norm->add_option("--p", norm_p_text);
  norm->add_option("--s", norm_s, "regularity or auto = d(p-1)/p");
  norm->add_option("--B", norm_B);
  norm->add_option("--jmax", norm_jmax);
  norm->add_option("--q", norm_q, "second exponent: selects the mixed norm");
  norm->add_option("--split-k", norm_k);
  norm->add_option("--s1", norm_s1);
  norm->add_option("--s2", norm_s2);
  norm->add_option("--d1", norm_d1);
  norm->add_option("--d2", norm_d2);
  norm->add_option("--mu", norm_mu);
  norm->add_option("-o,--output", norm_out);

  // certify
  auto* certify = app.add_subcommand("certify", "divergence certificate");
  std::string cert_in, cert_out;
  std::size_t cert_kmin = 1, cert_kmax = 3, cert_m = 8, cert_tail = 8;
  certify->add_option("schedule", cert_in)->required();
  certify->add_option("--kmin", cert_kmin);
  certify->add_option("--kmax", cert_kmax);
  certify->add_option("--m", cert_m);
  certify->add_option("--tail-terms", cert_tail);
  certify->add_option("-o,--output", cert_out);

  // contrast
  auto* contrast = app.add_subcommand("contrast", "convergence above the critical regularity");
  double con_p = 2.0, con_s = 0.6, con_x = 0.0, con_a = 2.0;
  int con_ladder = 6;
  std::string con_gamma = "identity", con_out, con_q;
  double con_s2 = 0.0;
  int con_d1 = 1, con_d2 = 1;
  contrast->add_option("--p", con_p);
  contrast->add_option("--s", con_s, "regularity (s1 for the mixed case)");
  contrast->add_option("--x", con_x);
  contrast->add_option("--a", con_a);
  contrast->add_option("--gamma", con_gamma);
  contrast->add_option("--t-ladder", con_ladder);
  contrast->add_option("--q", con_q, "second exponent: selects the mixed constants");
  contrast->add_option("--s2", con_s2);
  contrast->add_option("--d1", con_d1);
  contrast->add_option("--d2", con_d2);
  contrast->add_option("-o,--output", con_out);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "certify over a grid of (p, N, kappa)");
  std::string sw_p = "2", sw_N = "auto", sw_relax = "1", sw_out;
  int sw_kmax = 2;
  std::size_t sw_cert_kmax = 3, sw_m = 8;
  sweep->add_option("--p", sw_p, "comma-separated list");
  sweep->add_option("--N", sw_N, "comma-separated list or auto");
  sweep->add_option("--relax", sw_relax, "comma-separated list");
  sweep->add_option("--kmax", sw_kmax, "schedule blocks");
  sweep->add_option("--cert-kmax", sw_cert_kmax);
  sweep->add_option("--m", sw_m);
  sweep->add_option("-o,--output", sw_out, "CSV path");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (build->parsed()) {
      const RunConfig cfg = resolve_config(build_ov.apply(RunConfig{}, build));
      const Schedule sch = build_from_config(cfg);
      emit(build_out, dump_schedule(sch, config_to_json(cfg)), out);
      return kExitOk;
    }

    if (verify->parsed()) {
      LoadedSchedule ls = load(verify_in);
      const ScheduleReport rep = verify_schedule(ls.sch);
      Json j;
      j["config"] = ls.config;
      j["schedule_hash"] = ls.hash;
      j["ok"] = rep.ok();
      j["checked_points"] = rep.checked_points;
      j["margins"] = margins_json(rep);
      Json vs = Json::array();
      for (const auto& v : rep.violations) {
        vs.push_back({{"condition", v.condition}, {"j", v.j}, {"l", v.l}, {"detail", v.detail}});
      }
      j["violations"] = vs;
      emit(verify_out, json_text(j), out);
      for (const auto& v : rep.violations) {
        err << "violation: condition " << v.condition << " at j=" << v.j << " l=" << v.l << ": " << v.detail << "\n";
      }
      return rep.ok() ? kExitOk : kExitValidation;
    }

    if (eval->parsed()) {
      LoadedSchedule ls = load(eval_in);
      PrecisionScope prec(ls.sch.precision_bits);
      const CounterexampleSpec spec = spec_for(ls.sch, ls.config);
      OscillatoryOptions opt;
      opt.panel_budget = eval_budget;
      const EvalPoint at = parse_point(ls.sch, eval_point);
      const PartialSum ps = partial_sum(ls.sch, spec, eval_m, at, parse_sum_mode(eval_mode), opt);
      Json j;
      j["config"] = ls.config;
      j["schedule_hash"] = ls.hash;
      j["point"] = eval_point;
      j["m"] = eval_m;
      j["mode"] = eval_mode;
      j["value_re"] = ps.value.real();
      j["value_im"] = ps.value.imag();
      j["abs_bound"] = finite_or_string(ps.abs_bound());
      j["log_abs_bound"] = to_decimal(ps.log_abs_bound);
      j["est_error"] = finite_or_string(ps.est_error);
      j["bracket"] = ps.bracket;
      Json methods = Json::array();
      for (const auto& r : ps.per_j) methods.push_back(method_name(r.method));
      j["method_per_j"] = methods;
      emit(eval_out, json_text(j), out);
      return kExitOk;
    }

    if (norm->parsed()) {
      Json j;
      if (!norm_q.empty()) {
        const double p = norm_p_text.empty() ? 3.0 : parse_double("p", norm_p_text);
        const double q = parse_double("q", norm_q);
        std::optional<double> B, k, s1, s2;
        if (norm_B != "auto") B = parse_double("B", norm_B);
        if (norm_k != "auto") k = parse_double("split_k", norm_k);
        if (norm_s1 != "auto") s1 = parse_double("s1", norm_s1);
        if (norm_s2 != "auto") s2 = parse_double("s2", norm_s2);
        const CounterexampleSpec spec = mixed_spec(norm_d1, norm_d2, norm_mu, p, q, B, k);
        const MixedNormResult r = mixed_fl_norm(spec, s1, s2);
        j["kind"] = "mixed";
        j["p"] = p;
        j["q"] = q;
        j["B"] = spec.B;
        j["split_k"] = spec.split_k;
        j["s1"] = r.s1;
        j["s2"] = r.s2;
        j["mu"] = spec.mu;
        Json regions = Json::array();
        for (const auto& reg : r.regions) {
          regions.push_back({{"region", reg.name},
                             {"bound", finite_or_string(reg.bound)},
                             {"quadrature", finite_or_string(reg.quadrature)}});
        }
        j["regions"] = regions;
        j["combine_factor"] = r.combine_factor;
        j["total_q_bound"] = finite_or_string(r.total_q_bound);
        j["total_bound"] = finite_or_string(r.total_bound);
        j["divergent"] = !std::isfinite(r.total_bound);
        emit(norm_out, json_text(j), out);
        return kExitOk;
      }
      if (norm_in.empty()) throw ValidationError("norm needs a schedule (or --q for the mixed norm)");
      LoadedSchedule ls = load(norm_in);
      PrecisionScope prec(ls.sch.precision_bits);
      CounterexampleSpec spec;
      {
        Json cfg = ls.config;
        if (!norm_p_text.empty()) {
          cfg["p"] = parse_double("p", norm_p_text);
          if (!cfg.contains("B") || norm_B == "auto") cfg.erase("B");
        }
        if (norm_B != "auto") cfg["B"] = parse_double("B", norm_B);
        spec.dim = ls.sch.dim();
        spec.p = !cfg.contains("p") ? 2.0 : (cfg["p"].is_number() ? cfg["p"].get<double>() : kInfinity);
        spec.B = (cfg.contains("B") && cfg["B"].is_number()) ? cfg["B"].get<double>() : choose_B(spec.p);
        spec.mu = to_double(boost::multiprecision::exp(ls.sch.log_inner(1)));
      }
      const double s = norm_s == "auto" ? (std::isinf(spec.p) ? spec.dim : spec.dim * (spec.p - 1.0) / spec.p)
                                        : parse_double("s", norm_s);
      NormOptions nopt;
      if (norm_jmax > 0) nopt.j_max = norm_jmax;
      const NormResult r = fl_norm(ls.sch, spec, s, nopt);
      j["kind"] = "single";
      j["config"] = ls.config;
      j["schedule_hash"] = ls.hash;
      j["p"] = finite_or_string(spec.p);
      j["B"] = spec.B;
      j["s"] = s;
      j["divergent"] = r.divergent;
      j["total_bound"] = finite_or_string(r.total_bound);
      j["norm_bound"] = finite_or_string(r.norm_bound());
      j["partial_sum"] = finite_or_string(r.partial_sum);
      Json per = Json::array();
      for (const auto& a : r.per_annulus) {
        per.push_back({{"j", a.j},
                       {"quadrature", finite_or_string(a.quadrature)},
                       {"bound", to_decimal(a.bound)}});
      }
      j["per_annulus"] = per;
      emit(norm_out, json_text(j), out);
      return kExitOk;
    }

    if (certify->parsed()) {
      LoadedSchedule ls = load(cert_in);
      const CounterexampleSpec spec = spec_for(ls.sch, ls.config);
      CertificateOptions opt;
      opt.k_lo = cert_kmin;
      opt.k_hi = cert_kmax;
      opt.m = cert_m;
      opt.tail_terms = cert_tail;
      const CertificateReport rep = divergence_certificate(ls.sch, spec, opt);
      Json j;
      j["config"] = ls.config;
      j["schedule_hash"] = ls.hash;
      j["mode"] = rep.mode;
      j["m"] = rep.m;
      j["tail_terms"] = rep.tail_terms;
      j["slack"] = rep.slack;
      Json rows = Json::array();
      for (const auto& r : rep.per_k) {
        rows.push_back({{"k", r.k},
                        {"diag", r.diag},
                        {"old_terms_bound", r.old_terms},
                        {"decay_bound", finite_or_string(r.decay)},
                        {"tail_bound", finite_or_string(r.tail)},
                        {"L_k", finite_or_string(r.L)},
                        {"threshold", finite_or_string(r.threshold)},
                        {"log_Rp", r.log_outer},
                        {"dominant", r.dominant},
                        {"notes", r.notes}});
      }
      j["per_k"] = rows;
      j["constants"] = {{"c_measured", finite_or_string(rep.c_measured)},
                        {"C_measured", finite_or_string(rep.C_measured)},
                        {"C_prime_measured", finite_or_string(rep.C_prime_measured)}};
      Json ap = Json::array();
      for (const auto& a : rep.approach) {
        ap.push_back({{"index", a.index}, {"block", a.block}, {"point", a.point}, {"t", to_fraction(a.time)},
                      {"distance", a.distance}, {"gamma_t", a.gamma_t}});
      }
      j["approach_to_origin"] = ap;
      j["positive"] = rep.positive;
      j["increasing"] = rep.increasing;
      j["pass"] = rep.pass;
      j["diagnosis"] = rep.diagnosis;
      emit(cert_out, json_text(j), out);
      if (!rep.pass) err << "certificate failed: " << rep.diagnosis << "\n";
      return rep.pass ? kExitOk : kExitCertificate;
    }

    if (contrast->parsed()) {
      Json j;
      if (!con_q.empty()) {
        const double q = parse_double("q", con_q);
        const MixedContrast mc = mixed_contrast(con_p, q, con_s, con_s2, con_d1, con_d2);
        j = {{"kind", "mixed"},
             {"p", con_p},
             {"q", q},
             {"s1", con_s},
             {"s2", con_s2},
             {"c1", finite_or_string(mc.c1)},
             {"c2", finite_or_string(mc.c2)},
             {"product", finite_or_string(mc.product)},
             {"finite", mc.finite}};
        emit(con_out, json_text(j), out);
        return mc.finite ? kExitOk : kExitCertificate;
      }
      const ContrastReport rep =
          convergence_contrast(con_p, con_s, con_x, ApproachCurve::parse(con_gamma), con_ladder, con_a);
      j["kind"] = "single";
      j["p"] = con_p;
      j["s"] = con_s;
      j["x"] = con_x;
      j["gamma"] = con_gamma;
      j["holder_constant"] = finite_or_string(rep.holder_constant);
      j["data_norm"] = rep.data_norm;
      j["bound"] = finite_or_string(rep.bound);
      Json rows = Json::array();
      for (const auto& r : rep.rows) {
        rows.push_back({{"n", r.n}, {"t", r.t}, {"sup_error", r.sup_error}, {"sup_value", r.sup_value}});
      }
      j["rows"] = rows;
      j["monotone"] = rep.monotone;
      j["holder_holds"] = rep.holder_holds;
      j["final_error"] = rep.final_error;
      emit(con_out, json_text(j), out);
      return rep.monotone && rep.holder_holds ? kExitOk : kExitCertificate;
    }

    if (sweep->parsed()) {
      std::ostringstream csv;
      csv << "p,N,kappa,pass,c_measured,min_margin\n";
      for (const auto& ptxt : split(sw_p, ',')) {
        for (const auto& ntxt : split(sw_N, ',')) {
          for (const auto& ktxt : split(sw_relax, ',')) {
            RunConfig c;
            config_set(c, "p", ptxt);
            config_set(c, "N", ntxt);
            config_set(c, "relax", ktxt);
            c.k_max = sw_kmax;
            c = resolve_config(c);
            const Schedule sch = build_from_config(c);
            const ScheduleReport vr = verify_schedule(sch);
            const CounterexampleSpec spec = single_spec(sch, c.p, c.B);
            CertificateOptions opt;
            opt.k_hi = sw_cert_kmax;
            opt.m = sw_m;
            const CertificateReport rep = divergence_certificate(sch, spec, opt);
            csv << config_get(c, "p") << ',' << *c.N << ',' << config_get(c, "relax") << ','
                << (rep.pass && vr.ok() ? "true" : "false") << ',' << num(rep.c_measured) << ','
                << num(min_margin(vr)) << "\n";
          }
        }
      }
      emit(sw_out, csv.str(), out);
      return kExitOk;
    }
  } catch (const NumericalRefusal& e) {
    err << "numerical refusal: " << e.what() << "\n";
    return kExitRefusal;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace nontan
