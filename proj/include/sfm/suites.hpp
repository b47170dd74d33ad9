#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "sfm/scenarios.hpp"

namespace sfm {

// One randomized trial of an integer identity.  lhs / rhs are the two
// sides actually computed; ok means they agree and no numeric guard fired.
struct TrialRecord {
  std::uint64_t trial = 0;
  long long lhs = 0;
  long long rhs = 0;
  bool ok = false;
  std::string note;  // scenario shape, or the error message
};

struct SuiteReport {
  std::string suite;
  std::uint64_t master_seed = 0;
  int trials = 0;
  int failures = 0;  // identity violated
  int errors = 0;    // trial aborted (certification, search, ...)
  std::vector<TrialRecord> records;
  bool pass() const { return failures == 0 && errors == 0; }
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  int max_dim = 8;  // forms: matrix size cap; symplectic: 2n cap
  int jobs = 1;
  TolerancePolicy policy;
};

using TrialFn = std::function<TrialRecord(Seed, const SuiteConfig&)>;

// Runs `trials` independent trials with per-trial seeds derived from
// (config.seed, index).  Results are identical for any jobs value.
SuiteReport run_suite(const std::string& name, const SuiteConfig& config,
                      const TrialFn& fn);

SuiteReport suite_index_restriction(const SuiteConfig& config);
SuiteReport suite_flow_crossval(const SuiteConfig& config);
SuiteReport suite_flow_properties(const SuiteConfig& config);
SuiteReport suite_flow_restriction(const SuiteConfig& config);
SuiteReport suite_closed_paths(const SuiteConfig& config);
SuiteReport suite_maslov_partition(const SuiteConfig& config);
SuiteReport suite_maslov_reduction(const SuiteConfig& config);
SuiteReport suite_chart_identities(const SuiteConfig& config);

const std::vector<std::string>& suite_names();
SuiteReport run_named_suite(const std::string& name, const SuiteConfig& config);

// Stable serialization: field order and content depend only on the report
// (and the flag values), never on wall-clock or thread scheduling unless
// timing output is requested explicitly.
nlohmann::ordered_json report_json(const SuiteReport& report, bool with_timing = false,
                                   double seconds = 0.0);

}  // namespace sfm
