#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pwc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Depth above which `sample` refuses to run without override_guards.
inline constexpr int kSampleGuard = 20;

struct RunConfig {
  std::string subcommand;  // zeta, density, canonical, threshold, sample, capacity, verify, diagnose
  std::string preset;
  std::string spec_file;
  std::vector<int> depths;
  std::string j_grid = "-3:3:0.5";
  std::string s_grid;                  // diagnose laplace; default 2^-1 .. 2^-10
  std::string kind = "laplace";        // diagnose: laplace or tauberian
  int k_max = 1 << 20;                 // diagnose tauberian
  double j = 0;                        // sample
  std::size_t samples = 10;
  int draws = 20;
  std::uint64_t seed = 7;
  std::optional<double> delta;         // threshold: fixed delta instead of the default policy
  std::vector<std::string> sets;       // capacity: leaf sets such as "[0,3]"
  std::string output;                  // table path; stdout when empty
  std::string summary;                 // summary path; stderr when empty
  bool override_guards = false;
};

/// Reads a config document; keys mirror the RunConfig fields. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);

/// Executes one run. Tables go to `out` (or config.output), the JSON summary to `err`
/// (or config.summary). Returns an exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments and runs.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pwc
