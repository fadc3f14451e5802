#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spherecover {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerificationFailed = 2;

struct RunConfig {
  std::string subcommand;  // params, bounds, cover, lemma, oracle
  std::optional<int> n;
  double r = 1.5;
  std::optional<std::string> mode;
  double b_exponent = 2.0;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> samples;
  std::optional<double> eps;
  std::optional<double> mu;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> input;
  std::optional<std::string> out;
  std::optional<std::string> out_dir;
  std::string format = "text";  // text or csv
  std::optional<int> n_from;
  std::optional<int> n_to;
  double c1 = 1.0;
  std::string algorithm = "two-level";
  std::string base = "grid";
  double fail_prob = 1e-3;
  std::optional<double> rho;
  std::optional<double> placement;
  bool verify_only = false;
};

// Parses argv (argv[0] is the program name). On --help or a usage error
// returns nullopt and sets exit_code.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                                    int& exit_code);

// Validates every field the subcommand consumes; throws std::invalid_argument.
void validate(const RunConfig& config);

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spherecover
