#include "detail.hpp"

#include <skewdirac/errors.hpp>
#include <skewdirac/parallel.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace weylctl {
namespace detail {

Sink::Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
  if (path.empty() || path == "-") return;
  file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*file_) throw skewdirac::ValidationError("cli", "cannot write " + path);
}

namespace {

double parse_double(std::string_view text, const std::string& what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw skewdirac::ValidationError("cli", "bad number '" + std::string(text) + "' in " + what);
  }
  return value;
}

}  // namespace

std::vector<double> parse_range(const std::string& spec, const std::string& what) {
  std::vector<std::string_view> parts;
  std::string_view rest = spec;
  for (std::size_t pos; (pos = rest.find(':')) != std::string_view::npos;) {
    parts.push_back(rest.substr(0, pos));
    rest = rest.substr(pos + 1);
  }
  parts.push_back(rest);
  if (parts.size() != 3) throw skewdirac::ValidationError("cli", what + " must look like a:b:n, got '" + spec + "'");
  const double a = parse_double(parts[0], what);
  const double b = parse_double(parts[1], what);
  const double count = parse_double(parts[2], what);
  if (count < 1.0 || count != std::floor(count) || count > 1e6) {
    throw skewdirac::ValidationError("cli", what + " needs a positive integer point count");
  }
  const int n = static_cast<int>(count);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
  return out;
}

std::vector<cplx> parse_zgrid(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos) {
    throw skewdirac::ValidationError("cli", "zgrid must look like re0:re1:nre,im0:im1:nim");
  }
  const auto re = parse_range(spec.substr(0, comma), "zgrid real part");
  const auto im = parse_range(spec.substr(comma + 1), "zgrid imaginary part");
  std::vector<cplx> out;
  out.reserve(re.size() * im.size());
  for (double y : im) {
    for (double x : re) out.emplace_back(x, y);
  }
  return out;
}

cplx parse_complex(const std::string& text) {
  if (const auto comma = text.find(','); comma != std::string::npos) {
    return {parse_double(std::string_view(text).substr(0, comma), "complex number"),
            parse_double(std::string_view(text).substr(comma + 1), "complex number")};
  }
  std::string_view s = text;
  if (s.empty()) throw skewdirac::ValidationError("cli", "empty complex number");
  if (s.back() != 'i') return {parse_double(s, "complex number"), 0.0};
  s.remove_suffix(1);
  // Split at the last sign that is not the leading one and not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_double(t, "complex number");
  };
  if (split == std::string_view::npos) return {0.0, imag_part(s)};
  return {parse_double(s.substr(0, split), "complex number"), imag_part(s.substr(split))};
}

skewdirac::PotentialGrid load_grid(const std::string& path, int n_override) {
  if (path.empty()) throw skewdirac::ValidationError("cli", "a potential descriptor is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw skewdirac::ValidationError("cli", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (n_override > 0) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw skewdirac::ValidationError("cli", std::string("bad potential descriptor: ") + e.what());
    }
    doc["n"] = n_override;
    text = doc.dump();
  }
  return skewdirac::potential_from_json(text, std::filesystem::path(path).parent_path());
}

std::string format_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::string> phi_columns(int m2, int m1) {
  std::vector<std::string> out;
  for (int i = 0; i < m2; ++i) {
    for (int j = 0; j < m1; ++j) {
      const std::string idx = std::to_string(i) + "_" + std::to_string(j);
      out.push_back("re_phi_" + idx);
      out.push_back("im_phi_" + idx);
    }
  }
  return out;
}

void append_matrix(std::vector<double>& row, const skewdirac::CMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      row.push_back(a(i, j).real());
      row.push_back(a(i, j).imag());
    }
  }
}

CheckResult make_check(std::string name, double residual, double tolerance, std::string comparison) {
  CheckResult c{std::move(name), residual, tolerance, std::move(comparison), false};
  if (std::isfinite(residual)) c.pass = c.comparison == ">=" ? residual >= tolerance : residual <= tolerance;
  return c;
}

nlohmann::json checks_to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json item;
    item["check"] = c.check;
    item["residual"] = std::isfinite(c.residual) ? nlohmann::json(c.residual) : nlohmann::json(nullptr);
    item["tolerance"] = c.tolerance;
    item["comparison"] = c.comparison;
    item["pass"] = c.pass;
    arr.push_back(std::move(item));
  }
  return arr;
}

}  // namespace detail

namespace {

void build_app(CLI::App& app, RunConfig& cfg) {
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)");
  };

  auto* direct = app.add_subcommand("direct", "Weyl function samples on a z-grid");
  direct->add_option("--potential", cfg.potential, "Potential descriptor (JSON)")->required();
  direct->add_option("--zgrid", cfg.zgrid, "re0:re1:nre,im0:im1:nim")->required();
  direct->add_option("--target-radius", cfg.target_radius, "Stop once ||rho_l|| ||rho_r|| <= this")->check(CLI::PositiveNumber);
  direct->add_option("--margin", cfg.margin, "Required Im z - M")->check(CLI::NonNegativeNumber);
  direct->add_option("--out", cfg.out, "Output CSV (default stdout)");
  threads(direct);

  auto* inverse = app.add_subcommand("inverse", "Recover the potential from Weyl line data");
  auto* weyl = inverse->add_option("--weyl", cfg.weyl, "CSV of phi on a line Im z = eta");
  inverse->add_option("--from-potential", cfg.from_potential, "Synthesize the line data from this descriptor")
      ->excludes(weyl);
  inverse->add_option("--norm-bound", cfg.norm_bound, "Norm bound M of the unknown potential (with --weyl)")->check(CLI::NonNegativeNumber);
  inverse->add_option("--eta", cfg.eta, "Line height (default M + 1)")->check(CLI::PositiveNumber);
  inverse->add_option("--a", cfg.a, "Frequency half-length")->check(CLI::PositiveNumber);
  inverse->add_option("--dxi", cfg.dxi, "Frequency step")->check(CLI::PositiveNumber);
  inverse->add_option("--l", cfg.l, "Recovery interval length")->check(CLI::PositiveNumber);
  inverse->add_option("--n", cfg.n, "Recovery grid cells")->check(CLI::PositiveNumber);
  inverse->add_option("--tol-fourier", cfg.tol_fourier, "Tolerance of the a/2 certificate")->check(CLI::PositiveNumber);
  inverse->add_option("--out", cfg.out, "Output CSV (default stdout)");
  inverse->add_option("--report", cfg.report, "Diagnostics JSON");
  threads(inverse);

  auto* roundtrip = app.add_subcommand("roundtrip", "direct + inverse against a planted potential");
  roundtrip->add_option("--potential", cfg.potential, "Planted potential descriptor")->required();
  roundtrip->add_option("--n", cfg.n, "Grid cells (overrides the descriptor)")->check(CLI::PositiveNumber);
  roundtrip->add_option("--a", cfg.a, "Frequency half-length")->check(CLI::PositiveNumber);
  roundtrip->add_option("--eta", cfg.eta, "Line height (default M + 1)")->check(CLI::PositiveNumber);
  roundtrip->add_option("--dxi", cfg.dxi, "Frequency step")->check(CLI::PositiveNumber);
  roundtrip->add_option("--tol-fourier", cfg.tol_fourier, "Tolerance of the a/2 certificate")->check(CLI::PositiveNumber);
  roundtrip->add_option("--tolerance", cfg.tolerance, "Fail (exit 4) when the max error exceeds this")->check(CLI::PositiveNumber);
  roundtrip->add_option("--report", cfg.report, "Report JSON (default stdout)");
  threads(roundtrip);

  auto* evolve = app.add_subcommand("evolve", "Weyl function under the focusing NLS flow");
  evolve->add_option("--model", cfg.model, "zero | plane-wave | sampled")
      ->check(CLI::IsMember({"zero", "plane-wave", "sampled"}));
  evolve->add_option("--amplitude", cfg.amplitude, "Plane-wave amplitude A")->check(CLI::NonNegativeNumber);
  evolve->add_option("--m1", cfg.m1, "Rows of v")->check(CLI::PositiveNumber);
  evolve->add_option("--m2", cfg.m2, "Columns of v")->check(CLI::PositiveNumber);
  evolve->add_option("--samples", cfg.samples, "CSV of v(0,t), v_x(0,t) for --model sampled");
  evolve->add_option("--T", cfg.T, "Final time")->check(CLI::NonNegativeNumber);
  evolve->add_option("--nt", cfg.nt, "Time steps")->check(CLI::PositiveNumber);
  evolve->add_option("--zgrid", cfg.zgrid, "re0:re1:nre,im0:im1:nim")->required();
  evolve->add_option("--phi0", cfg.phi0, "CSV of phi(0, z) on the z-grid, or 'direct'");
  evolve->add_option("--cond-cap", cfg.cond_cap, "Largest accepted denominator condition number")->check(CLI::PositiveNumber);
  evolve->add_option("--margin", cfg.margin, "Required Im z - M for --phi0 direct")->check(CLI::NonNegativeNumber);
  evolve->add_option("--out", cfg.out, "Output CSV (default stdout)");
  threads(evolve);

  auto* verify = app.add_subcommand("verify", "Invariant checks with a JSON report");
  auto* check = verify->add_option("--check", cfg.check, "p9 | p17 | radius")
                    ->check(CLI::IsMember({"p9", "p17", "radius"}));
  verify->add_flag("--all", cfg.all, "Run the full seeded invariant suite")->excludes(check);
  verify->add_option("--potential", cfg.potential, "Potential descriptor for --check");
  verify->add_option("--z", cfg.z, "Spectral point for --check, e.g. 3i or 1+2i");
  verify->add_option("--n", cfg.n, "Grid cells (overrides the descriptor)")->check(CLI::PositiveNumber);
  verify->add_option("--tolerance", cfg.tolerance, "Tolerance for --check p17 / radius")->check(CLI::PositiveNumber);
  verify->add_option("--seed", cfg.seed, "Seed of the randomized checks");
  verify->add_option("--report", cfg.report, "Report JSON (default stdout)");
  threads(verify);

  auto* bm = app.add_subcommand("bm-check", "Borg-Marchenko decay report for two potentials");
  bm->add_option("--weyl-a", cfg.weyl_a, "First potential descriptor")->required();
  bm->add_option("--weyl-b", cfg.weyl_b, "Second potential descriptor")->required();
  bm->add_option("--ray-c", cfg.ray_c, "Ray Re z = c Im z");
  bm->add_option("--r", cfg.r_grid, "r0:r1:nr");
  bm->add_option("--heights", cfg.heights, "h0:h1:nh (Im z values)");
  bm->add_option("--continuation", cfg.continuation, "zero | constant continuation beyond l")
      ->check(CLI::IsMember({"zero", "constant"}));
  bm->add_option("--out", cfg.out, "Output CSV (default stdout)");
  threads(bm);
}

std::string parsed_subcommand(const CLI::App& app) {
  const auto subs = app.get_subcommands();
  return subs.empty() ? std::string{} : subs.front()->get_name();
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Weyl problems of skew-self-adjoint Dirac systems", "weylctl"};
  build_app(app, cfg);
  app.parse(argc, argv);
  cfg.subcommand = parsed_subcommand(app);
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    skewdirac::default_workers().store(cfg.threads);
    if (cfg.subcommand == "direct") return detail::cmd_direct(cfg, out, err);
    if (cfg.subcommand == "inverse") return detail::cmd_inverse(cfg, out, err);
    if (cfg.subcommand == "roundtrip") return detail::cmd_roundtrip(cfg, out, err);
    if (cfg.subcommand == "evolve") return detail::cmd_evolve(cfg, out, err);
    if (cfg.subcommand == "verify") return detail::cmd_verify(cfg, out, err);
    if (cfg.subcommand == "bm-check") return detail::cmd_bm_check(cfg, out, err);
    err << "weylctl: unknown subcommand '" << cfg.subcommand << "'\n";
    return kExitValidation;
  } catch (const skewdirac::ValidationError& e) {
    err << "weylctl: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const skewdirac::NumericalError& e) {
    err << "weylctl: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const detail::VerificationFailure& e) {
    err << "weylctl: verification failed: " << e.what() << '\n';
    return kExitVerification;
  } catch (const std::exception& e) {
    err << "weylctl: error: " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Weyl problems of skew-self-adjoint Dirac systems", "weylctl"};
  build_app(app, cfg);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  cfg.subcommand = parsed_subcommand(app);
  return run(cfg, out, err);
}

}  // namespace weylctl
