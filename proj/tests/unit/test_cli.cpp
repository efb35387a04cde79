#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "nontan/cli.hpp"
#include "nontan/errors.hpp"

using namespace nontan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "nontan_cli_unit";
  fs::create_directories(p);
  return p;
}

std::string build(const std::string& name, const std::vector<std::string>& extra = {}) {
  const std::string path = (scratch_dir() / name).string();
  std::vector<std::string> args{"build-schedule", "-o", path};
  args.insert(args.end(), extra.begin(), extra.end());
  const Outcome o = call(args);
  REQUIRE(o.code == kExitOk);
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config text round trip") {
    const std::string text =
        "# scenario\n"
        "gamma = power:0.5\n"
        "N = 4\n"
        "p = inf\n"
        "B = 0.75\n";
    const RunConfig c = parse_config_text(text);
    CHECK(c.gamma == "power:0.5");
    CHECK(*c.N == 4);
    CHECK(std::isinf(c.p));
    const std::string canon = config_to_text(c);
    CHECK(config_to_text(parse_config_text(canon)) == canon);
    for (const auto& k : config_keys()) CHECK(config_get(parse_config_text(canon), k) == config_get(c, k));
    CHECK(config_get(RunConfig{}, "N") == "auto");
    CHECK_THROWS_AS(parse_config_text("colour = red\n"), ValidationError);
    CHECK_THROWS_AS(parse_config_text("N = four\n"), ValidationError);
  }

  TEST_CASE("auto fields resolve") {
    const RunConfig c = resolve_config(RunConfig{});
    CHECK(*c.B == doctest::Approx(0.75));
    CHECK(*c.N == 256);
    RunConfig bad;
    bad.p = 2.0;
    bad.B = 0.3;
    CHECK_THROWS_AS(resolve_config(bad), ValidationError);
  }

  TEST_CASE("build then verify") {
    const std::string path = build("a.json", {"--N", "4"});
    const Outcome v = call({"verify-schedule", path});
    CHECK(v.code == kExitOk);
    const Json j = Json::parse(v.out);
    CHECK(j["ok"].get<bool>());
    CHECK(j["config"]["N"] == 4);
    CHECK(j["schedule_hash"].get<std::string>().size() == 64);
  }

  TEST_CASE("reruns are bit-identical") {
    const std::string a = build("r1.json", {"--N", "4"});
    const std::string b = build("r2.json", {"--N", "4"});
    CHECK(read_file(a) == read_file(b));
    const Outcome e1 = call({"eval", a, "--point", "k=2", "--m", "4", "--mode", "auto"});
    const Outcome e2 = call({"eval", b, "--point", "k=2", "--m", "4", "--mode", "auto"});
    REQUIRE(e1.code == kExitOk);
    CHECK(e1.out == e2.out);
    const Json j = Json::parse(e1.out);
    CHECK(j["method_per_j"][0] == "ibp");
    CHECK(j["method_per_j"][1] == "closed_form");
    CHECK(j.contains("value_re"));
    CHECK(j.contains("est_error"));
  }

  TEST_CASE("config file with flag overrides") {
    const fs::path cfg = scratch_dir() / "run.cfg";
    write_file_atomic(cfg.string(), "N = 8\nR1 = 4\n");
    const std::string path = build("c.json", {"--config", cfg.string(), "--N", "4"});
    Json c;
    load_schedule(read_file(path), &c, nullptr);
    CHECK(c["N"] == 4);
    CHECK(c["R1"].get<double>() == 4.0);
  }

  TEST_CASE("tampered schedules are rejected") {
    const std::string path = build("t.json", {"--N", "4"});
    std::string text = read_file(path);
    const auto pos = text.find("\"7/8\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 5, "\"6/8\"");
    const std::string bad = (scratch_dir() / "t_bad.json").string();
    write_file_atomic(bad, text);
    const Outcome v = call({"verify-schedule", bad});
    CHECK(v.code == kExitValidation);
    CHECK(v.err.find("hash") != std::string::npos);
  }

  TEST_CASE("certify exit codes") {
    const std::string weak = build("n2.json", {"--N", "2"});
    const Outcome f = call({"certify", weak, "--kmax", "3", "--m", "8"});
    CHECK(f.code == kExitCertificate);
    const Json j = Json::parse(f.out);
    CHECK_FALSE(j["pass"].get<bool>());
    CHECK(f.out.find("old_terms") != std::string::npos);

    const std::string strong = build("auto.json");
    const Outcome p = call({"certify", strong, "--kmax", "3", "--m", "8"});
    CHECK(p.code == kExitOk);
  }

  TEST_CASE("norm and contrast") {
    const std::string path = build("n.json", {"--N", "4"});
    const Outcome n = call({"norm", path, "--p", "2", "--s", "auto"});
    REQUIRE(n.code == kExitOk);
    const Json j = Json::parse(n.out);
    CHECK_FALSE(j["divergent"].get<bool>());
    CHECK(j["total_bound"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0) * 2.0 / std::sqrt(std::log(3.0))));
    const Outcome div = call({"norm", path, "--p", "2", "--s", "auto", "--B", "0.25"});
    CHECK(Json::parse(div.out)["divergent"].get<bool>());
    const Outcome mixed = call({"norm", "--p", "3", "--q", "3", "--d1", "1", "--d2", "1"});
    CHECK(mixed.code == kExitOk);
    const Outcome rejected = call({"norm", "--p", "2", "--q", "2", "--d1", "1", "--d2", "1"});
    CHECK(rejected.code == kExitValidation);
    CHECK(rejected.err.find("1/p + 1/q < 1") != std::string::npos);
    const Outcome c = call({"contrast", "--p", "2", "--s", "0.6", "--t-ladder", "4"});
    CHECK(c.code == kExitOk);
    CHECK(call({"contrast", "--p", "2", "--s", "0.5"}).code == kExitValidation);
  }

  TEST_CASE("eval refusal exit code") {
    const std::string path = build("e.json", {"--N", "4"});
    const Outcome o = call({"eval", path, "--point", "k=1", "--m", "3", "--mode", "direct"});
    CHECK(o.code == kExitRefusal);
  }

  TEST_CASE("sweep writes one row per combination") {
    const std::string csv = (scratch_dir() / "sweep.csv").string();
    const Outcome o = call({"sweep", "--p", "1.5,2,4", "--N", "auto", "--kmax", "2", "--cert-kmax", "2", "--m", "6",
                            "-o", csv});
    REQUIRE(o.code == kExitOk);
    std::istringstream in(read_file(csv));
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,N,kappa,pass,c_measured,min_margin");
    int rows = 0;
    while (std::getline(in, line)) {
      if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
  }

  TEST_CASE("bad invocations") {
    CHECK(call({}).code == kExitValidation);
    CHECK(call({"frobnicate"}).code == kExitValidation);
    CHECK(call({"build-schedule", "--N", "1"}).code == kExitValidation);
    CHECK(call({"verify-schedule", "/nonexistent/x.json"}).code == kExitValidation);
  }
}
