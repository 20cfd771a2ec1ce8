#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace weylctl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerification = 4;

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Everything a subcommand needs. Unset knobs (NaN / 0 / empty) take the
/// defaults documented in `weylctl <subcommand> --help`.
struct RunConfig {
  std::string subcommand;

  // shared
  std::string potential;
  std::string out;     // "" or "-" writes to stdout
  std::string report;  // JSON report path for roundtrip / verify / inverse
  unsigned threads = 0;

  // direct / evolve
  std::string zgrid;
  double target_radius = 1e-10;
  double margin = 0.25;

  // inverse / roundtrip
  std::string weyl;
  std::string from_potential;
  double norm_bound = kUnset;
  double eta = kUnset;
  double a = 200.0;
  double dxi = 0.1;
  double l = kUnset;
  int n = 0;
  double tol_fourier = 2e-2;
  double tolerance = kUnset;

  // evolve
  std::string model = "zero";
  double amplitude = 1.0;
  int m1 = 1;
  int m2 = 1;
  std::string samples;
  double T = 0.1;
  int nt = 100;
  std::string phi0 = "direct";
  double cond_cap = 1e8;

  // verify
  std::string check;
  bool all = false;
  std::uint64_t seed = 1;
  std::string z = "3i";

  // bm-check
  std::string weyl_a;
  std::string weyl_b;
  double ray_c = 1.0;
  std::string r_grid = "0.4:0.6:2";
  std::string heights = "16:32:9";
  std::string continuation = "zero";
};

/// Parses argv (argv[0] is the program name). Throws CLI::ParseError subclasses
/// on bad usage; CLI::CallForHelp / CallForVersion are ordinary ParseErrors with
/// exit code 0.
RunConfig parse_args(int argc, const char* const* argv);

/// Runs one subcommand. Diagnostics go to `err`; data goes to `out` unless the
/// config names a file. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with the exit-code contract applied to parse failures.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace weylctl
