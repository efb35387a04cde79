#include "nontan/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "nontan/errors.hpp"

namespace nontan {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

namespace {

Json gamma_to_json(const ApproachCurve& g) {
  Json j;
  switch (g.kind()) {
    case ApproachCurve::Kind::identity: j["kind"] = "identity"; break;
    case ApproachCurve::Kind::sqrt: j["kind"] = "sqrt"; break;
    case ApproachCurve::Kind::power:
      j["kind"] = "power";
      j["alpha"] = g.alpha();
      break;
  }
  return j;
}

ApproachCurve gamma_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return ApproachCurve::identity();
  if (kind == "sqrt") return ApproachCurve::sqrt();
  if (kind == "power") return ApproachCurve::power(j.at("alpha").get<double>());
  throw ValidationError("unknown approach curve '" + kind + "'");
}

Json big_array(const std::vector<BigFloat>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_decimal(x));
  return a;
}

std::vector<BigFloat> big_vector(const Json& a) {
  std::vector<BigFloat> out;
  for (const auto& x : a) out.push_back(from_decimal(x.get<std::string>()));
  return out;
}

}  // namespace

Json schedule_to_json(const Schedule& sch) {
  if (!sch.symbol.power_exponent()) {
    throw ValidationError("only power-law symbols can be serialized");
  }
  PrecisionScope prec(sch.precision_bits);
  Json j;
  j["format"] = "nontan-schedule/1";
  j["symbol"] = {{"kind", "power"}, {"a", *sch.symbol.power_exponent()}};
  j["gamma"] = gamma_to_json(sch.layout.gamma);
  j["d"] = sch.dim();
  j["N"] = sch.radii.N;
  j["R1"] = sch.radii.R1;
  j["relax"] = sch.radii.relax;
  j["margin_fraction"] = sch.radii.margin_fraction;
  j["precision_bits"] = sch.precision_bits;
  j["deltas"] = big_array(sch.layout.deltas);
  j["blocks"] = sch.layout.blocks;
  Json pts = Json::array();
  for (std::size_t i = 1; i <= sch.size(); ++i) {
    Json p;
    p["block"] = sch.block_of(i);
    p["z"] = sch.layout.points[i - 1].z;
    if (auto x = sch.x_exact(i)) {
      Json xs = Json::array();
      for (const auto& c : *x) xs.push_back(to_fraction(c));
      p["x"] = xs;
    } else {
      p["x"] = big_array(sch.x_big(i));
    }
    pts.push_back(p);
  }
  j["points"] = pts;
  Json ts = Json::array();
  for (const auto& t : sch.times) ts.push_back(to_fraction(t));
  j["times"] = ts;
  j["logR"] = big_array(sch.logR);
  j["logRp"] = big_array(sch.logRp);
  return j;
}

Schedule schedule_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "nontan-schedule/1") {
      throw ValidationError("unsupported schedule format");
    }
    const unsigned bits = j.at("precision_bits").get<unsigned>();
    PrecisionScope prec(bits);
    const Json& sym = j.at("symbol");
    if (sym.at("kind").get<std::string>() != "power") throw ValidationError("unknown symbol kind");
    PhaseSymbol symbol = power_symbol(sym.at("a").get<double>());

    BlockLayout layout;
    layout.dim = j.at("d").get<int>();
    layout.gamma = gamma_from_json(j.at("gamma"));
    layout.deltas = big_vector(j.at("deltas"));
    layout.blocks = j.at("blocks").get<std::vector<std::size_t>>();
    for (const auto& p : j.at("points")) {
      LatticePoint lp;
      lp.block = p.at("block").get<int>();
      lp.z = p.at("z").get<std::vector<long long>>();
      if (static_cast<int>(lp.z.size()) != layout.dim) throw ValidationError("point dimension mismatch");
      if (lp.block < 0 || lp.block + 1 >= static_cast<int>(layout.deltas.size())) {
        throw ValidationError("point block out of range");
      }
      layout.points.push_back(std::move(lp));
    }
    std::vector<Rational> times;
    for (const auto& t : j.at("times")) times.push_back(from_fraction(t.get<std::string>()));

    RadiiOptions ro;
    ro.N = j.at("N").get<int>();
    ro.R1 = j.at("R1").get<double>();
    ro.relax = j.at("relax").get<double>();
    ro.margin_fraction = j.at("margin_fraction").get<double>();
    auto logR = big_vector(j.at("logR"));
    auto logRp = big_vector(j.at("logRp"));
    if (logR.size() != logRp.size()) throw ValidationError("logR and logRp lengths differ");
    return Schedule{std::move(layout), std::move(symbol), std::move(times), std::move(logR),
                    std::move(logRp),  ro,                bits};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed schedule JSON: ") + e.what());
  }
}

std::string schedule_hash(const Json& j) {
  Json copy = j;
  copy.erase("content_hash");
  copy.erase("config");
  return sha256_hex(copy.dump());
}

std::string dump_schedule(const Schedule& sch, const Json& config) {
  Json j;
  j["config"] = config;
  const Json body = schedule_to_json(sch);
  for (auto& [k, v] : body.items()) j[k] = v;
  j["content_hash"] = schedule_hash(j);
  return j.dump(2) + "\n";
}

Schedule load_schedule(const std::string& text, Json* config, std::string* hash) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("schedule is not valid JSON: ") + e.what());
  }
  const std::string h = schedule_hash(j);
  if (j.contains("content_hash") && j["content_hash"].get<std::string>() != h) {
    throw ValidationError("schedule content hash mismatch (file was modified)");
  }
  if (config) *config = j.value("config", Json::object());
  if (hash) *hash = h;
  return schedule_from_json(j);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp);
    out << content;
    if (!out) throw ValidationError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ValidationError("cannot rename onto " + path);
}

}  // namespace nontan
