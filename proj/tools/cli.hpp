#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scottlab/radial_operator.hpp"

namespace scottlab::cli {

struct RunConfig {
  std::string command;
  std::vector<double> gammas;  // empty: per-command default
  std::optional<int> ell;
  std::optional<int> ell_max;
  std::optional<int> n_max;
  std::optional<double> r_max;
  std::optional<std::size_t> points;
  std::string symbol = "chandrasekhar";
  std::vector<TestPotential> potentials;
  std::vector<double> lambdas;
  std::vector<double> fills;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> config_file;
  int jobs = 1;
  bool quiet = false;

  void validate() const;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"spectrum", "density", "verify", "majorant",
                                              "scott"};
  return names;
}

// Reads key=value lines; '#' starts a comment. Keys are the long flag names.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

// Flags override values from --config. Throws ConfigError on bad input;
// CLI11 help requests are reported through HelpRequested.
RunConfig parse_config(int argc, const char* const* argv);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HelpRequested {
  std::string text;
  int exit_code = 0;
};

// Spectrum grid for one coupling: explicit --rmax/--points, else the defaults
// (h = 0.05/gamma, r_max = 200/gamma).
RadialGrid grid_for(const RunConfig& config, double gamma);

// Executes the command; returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace scottlab::cli
