#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsc/io.hpp"

/// Report generation behind the command line tool. Reports are ordered JSON
/// with no timestamps, so the same input always yields the same bytes.
namespace qsc::cli {

/// Exit code convention: 0 success, 1 property violated or counterexample
/// found, 2 input error.
struct Report {
  nlohmann::ordered_json body;
  int exit_code = 0;
};

/// Request that cannot be served for this input: unknown mechanism, wrong
/// instance kind, or a mechanism precondition. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<Quantile> h_override;
  /// SD/PSD agent order; empty means ascending ids.
  std::vector<int> order;
  int dictator = 0;
};

/// r-plurality, top2-half, uniform, dictator (voting); sd, psd, top-choice
/// (one-sided); half-da, efficient-stable, topchoice-bmatching (two-sided).
/// Runs every checker that applies to the instance kind.
Report run_mechanism(const io::Document& doc, const std::string& mechanism, const RunOptions& options = {});

/// Checks the document's own lottery: efficiency (all kinds), proportionality
/// and envy-freeness (one-sided), stability, distinct-representatives and
/// dr-efficiency (two-sided).
Report run_check(const io::Document& doc, const std::string& property);

/// Lottery queries: representatives of x (and y), the quantile comparison,
/// and stochastic dominance.
Report run_rep(const io::Document& doc);
Report run_compare(const io::Document& doc);
Report run_sd_compare(const io::Document& doc);

struct AuditOptions {
  /// sp, efficiency, monotonicity or sd-equivalence.
  std::string suite;
  std::string mechanism;
  int n = 2;
  /// Alternatives for voting rules; ignored for matchings.
  int m = 2;
  Quantile h;
  /// Audit a single named fixture profile instead of a whole domain.
  std::optional<std::string> fixture;
  int trials = 1000;
  /// Two-sided sp only: sample this many profiles instead of enumerating.
  int samples = 0;
  std::uint64_t seed = 1;
  /// Largest number of profiles an exhaustive audit may enumerate.
  std::uint64_t max_domain = 1'000'000;
  std::vector<int> order;
  int dictator = 0;
};

Report run_audit(const AuditOptions& options);

struct FixtureInfo {
  std::string name;
  std::string description;
};

std::vector<FixtureInfo> fixture_list();
/// Throws UsageError for an unknown name.
io::Document fixture(const std::string& name);

}  // namespace qsc::cli
