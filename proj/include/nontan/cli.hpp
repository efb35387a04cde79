#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nontan/counterexample.hpp"
#include "nontan/schedule.hpp"
#include "nontan/serialize.hpp"

namespace nontan {

// Run parameters shared by the subcommands. Empty optionals mean "auto".
struct RunConfig {
  std::string gamma = "identity";
  int d = 1;
  int d1 = 0;
  int d2 = 0;
  std::string symbol = "power";
  double a = 2.0;
  double p = 2.0;
  std::optional<double> q;
  std::optional<double> B;
  std::optional<double> split_k;
  std::optional<int> N;
  double relax = 1.0;
  double R1 = 3.0;
  int k_max = 2;
  int m = 8;
  unsigned precision_bits = kDefaultPrecisionBits;
  double panel_budget = 1e7;
};

// Keys in canonical order.
const std::vector<std::string>& config_keys();
// Sets one key from its text form; throws ValidationError on bad keys or values.
void config_set(RunConfig& c, const std::string& key, const std::string& value);
std::string config_get(const RunConfig& c, const std::string& key);

// "key = value" lines; '#' starts a comment.
RunConfig parse_config_text(const std::string& text);
std::string config_to_text(const RunConfig& c);
Json config_to_json(const RunConfig& c);

// Fills B (choose_B) and N (choose_N) when they are auto.
RunConfig resolve_config(RunConfig c);
Schedule build_from_config(const RunConfig& c);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitCertificate = 2, kExitRefusal = 3 };

// Entry point of the command-line tool; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nontan
