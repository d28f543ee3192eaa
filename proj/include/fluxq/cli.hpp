#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fluxq/lagrangian.hpp"

namespace fluxq::cli {

enum ExitCode : int {
  kOk = 0,
  kParseFailure = 1,
  kValidationFailure = 2,
  kUnquantizable = 3,
  kInconsistentIcs = 4,
  kUsage = 64,
};

enum class Format { Default, Json, Csv, Table };

struct RunConfig {
  std::string subcommand;
  std::string netlist;
  Representation rep = Representation::NodeFlux;
  GeometricPolicy::Mode geometric = GeometricPolicy::Mode::Minimal;
  double cg = 8.9e-20;
  double lg = 1e-15;
  double tmax = 4e-9;
  std::size_t samples = 2000;
  std::string out;  ///< empty: standard output
  Format format = Format::Default;
};

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_reduce(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.subcommand; honours config.out.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and runs.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// GHz rounded to 3 significant figures, fixed notation.
std::string format_ghz(double ghz);

}  // namespace fluxq::cli
