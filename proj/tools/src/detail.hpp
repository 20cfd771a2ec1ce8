#pragma once

#include "weylctl/cli.hpp"

#include <skewdirac/linalg.hpp>
#include <skewdirac/potential.hpp>

#include <json.hpp>

#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace weylctl::detail {

using skewdirac::cplx;

/// Raised when a verification residual exceeds its tolerance (exit code 4).
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Destination for data: the named file, or the fallback stream for "" and "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback);
  std::ostream& stream() { return file_ ? *file_ : fallback_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream& fallback_;
};

/// "a:b:n" -> n points from a to b inclusive (n = 1 gives a).
std::vector<double> parse_range(const std::string& spec, const std::string& what);
/// "re0:re1:nre,im0:im1:nim", ordered with Im z outer and Re z inner.
std::vector<cplx> parse_zgrid(const std::string& spec);
/// "3i", "1+3i", "-2-0.5i", "2" or "re,im".
cplx parse_complex(const std::string& text);

/// Loads a descriptor; n > 0 replaces the descriptor's "n".
skewdirac::PotentialGrid load_grid(const std::string& path, int n_override = 0);

std::string format_json(const nlohmann::json& doc);
std::vector<std::string> phi_columns(int m2, int m1);
void append_matrix(std::vector<double>& row, const skewdirac::CMatrix& a);

int cmd_direct(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_inverse(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_roundtrip(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bm_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One verification result. `comparison` is "<=" or ">=" between residual and tolerance.
struct CheckResult {
  std::string check;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string comparison = "<=";
  bool pass = false;
};

CheckResult make_check(std::string name, double residual, double tolerance, std::string comparison = "<=");
nlohmann::json checks_to_json(const std::vector<CheckResult>& checks);

/// The deterministic invariant suite behind `verify --all`.
std::vector<CheckResult> verify_suite(std::uint64_t seed);

}  // namespace weylctl::detail
