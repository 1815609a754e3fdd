#pragma once

// Command-line front end: `generate`, `cns` and `evaluate` subcommands.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnsdist/models.hpp"

namespace cnsdist::cli {

inline constexpr int kFormatVersion = 1;

enum ExitCode : int { kOk = 0, kUsage = 2, kInput = 3, kNumerical = 4 };

/// Model parameters as given on the command line or in a descriptor file.
/// Which fields are required depends on `kind`.
struct ModelDescriptor {
  std::optional<std::string> kind;
  std::optional<std::size_t> n, m, m0;
  std::optional<double> p, k, eta, alpha;
};

/// Throws UsageError for missing or invalid parameters.
ProbModel build_model(const ModelDescriptor& d);

struct RunConfig {
  std::string command;
  std::optional<ModelDescriptor> model;
  std::optional<std::string> input;  ///< edge-list path
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format;  ///< generate: edges; cns: csv|json; evaluate: json|text

  // cns
  std::size_t q = 2;
  std::string mode = "analytic";  ///< analytic | empirical | both
  bool all_only = false;
  bool sampled = false;
  std::size_t samples = 100000;

  // evaluate
  std::vector<std::string> indices{"cn", "ra", "aa", "lp", "katz"};
  double epsilon = 0.1;
  std::size_t repetitions = 100;
  std::size_t comparisons = 10000;
  std::size_t L = 0;
  bool theory_only = false;
  double lp_phi = 0.02;
  double katz_phi = 0.01;

  unsigned threads = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_json(const RunConfig& c);
/// Accepts a full RunConfig object or a bare model descriptor
/// {kind, n, m, p, k, eta, alpha, m0, seed}.
RunConfig run_config_from_json(const std::string& text);

/// Runs one invocation; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cnsdist::cli
