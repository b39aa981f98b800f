#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pwc/clustering.hpp"

namespace pwc {

/// Random parameter draws for the oracle suites.
/// First order: h_0 uniform in [-1, 1], nonnegative uniform increments, indices 0..depth.
FirstOrderSpec random_first_order(std::mt19937_64& rng, int depth);
/// Second order: 2D prefix sums of nonnegative cells, rows 1..depth+1.
SecondOrderSpec random_second_order(std::mt19937_64& rng, int depth);
/// Capacity: conductances uniform in [0.2, 3] per level.
CapacitySpec random_capacity(std::mt19937_64& rng, int depth);

/// exp(|ln x - ln y|) - 1, zero when both are zero.
double log_relative_error(double ln_x, double ln_y);

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::vector<std::string> failures;  // one witness per failed check
  bool ok() const { return failures.empty(); }
};

struct VerifyOptions {
  int depth = 3;          // oracle suites run at n = 1..depth (at most 4)
  int draws = 20;         // random specs per variant and depth
  std::uint64_t seed = 7;
  double rel_tol = 1e-9;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool ok() const;
};

SuiteResult verify_z_and_w(const std::string& variant, const VerifyOptions& opt);
SuiteResult verify_density(const VerifyOptions& opt);
SuiteResult verify_entropy_first(int max_depth);
SuiteResult verify_entropy_second(int max_depth);
SuiteResult verify_patterns(int max_depth);
SuiteResult verify_capacity(const VerifyOptions& opt);
SuiteResult verify_monotone(const VerifyOptions& opt);
SuiteResult verify_reduction(const VerifyOptions& opt);

/// Every suite above.
VerifyReport run_verification(const VerifyOptions& opt);

}  // namespace pwc
