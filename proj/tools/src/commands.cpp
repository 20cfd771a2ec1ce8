#include "detail.hpp"

#include <skewdirac/borg_marchenko.hpp>
#include <skewdirac/csv.hpp>
#include <skewdirac/errors.hpp>
#include <skewdirac/inverse.hpp>
#include <skewdirac/nls.hpp>
#include <skewdirac/parallel.hpp>
#include <skewdirac/weyl.hpp>

#include <cmath>
#include <sstream>

namespace weylctl::detail {

using namespace skewdirac;

namespace {

std::string z_label(std::size_t index, cplx z) {
  std::ostringstream ss;
  ss << "z[" << index << "] = " << csv::format(z.real()) << (z.imag() < 0 ? "" : "+") << csv::format(z.imag())
     << "i";
  return ss.str();
}

void require_positive(double value, const std::string& name) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError("cli", name + " must be positive");
}

void require_domain(const std::vector<cplx>& zs, double norm_bound, double margin, const std::string& module) {
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (zs[k].imag() - norm_bound < margin) {
      throw DomainError(module, z_label(k, zs[k]) + " has Im z - M = " + csv::format(zs[k].imag() - norm_bound) +
                                    " below the margin " + csv::format(margin));
    }
  }
}

std::vector<std::string> potential_columns(int m1, int m2) {
  std::vector<std::string> out;
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      const std::string idx = std::to_string(i) + "_" + std::to_string(j);
      out.push_back("re_v_" + idx);
      out.push_back("im_v_" + idx);
    }
  }
  return out;
}

nlohmann::json diagnostics_json(const RecoveredPotential& rec) {
  nlohmann::json d;
  d["beta_defect"] = rec.beta_defect;
  d["gamma_defect"] = rec.gamma_defect;
  d["cross_defect"] = rec.cross_defect;
  d["derivative_defect"] = rec.derivative_defect;
  d["fourier_certificate"] = rec.fourier_certificate;
  d["max_norm"] = rec.max_norm;
  if (std::isfinite(rec.s_min_eigenvalue)) d["s_min_eigenvalue"] = rec.s_min_eigenvalue;
  return d;
}

}  // namespace

int cmd_direct(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const PotentialGrid grid = load_grid(cfg.potential);
  const auto zs = parse_zgrid(cfg.zgrid);
  require_positive(cfg.target_radius, "target radius");
  require_positive(cfg.margin, "margin");
  require_domain(zs, grid.norm_bound(), cfg.margin, "weyl-direct");

  std::vector<WeylSample> samples(zs.size());
  parallel_for(zs.size(), [&](std::size_t k) {
    samples[k] = weyl_function(grid, zs[k], cfg.target_radius, cfg.margin);
  });

  std::vector<std::string> header{"re_z", "im_z"};
  for (auto& c : phi_columns(grid.m2(), grid.m1())) header.push_back(std::move(c));
  header.push_back("error_bound");
  header.push_back("truncated");
  std::vector<std::vector<double>> rows;
  for (const auto& s : samples) {
    std::vector<double> row{s.z.real(), s.z.imag()};
    append_matrix(row, s.phi);
    row.push_back(s.error_bound);
    row.push_back(s.truncated ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  Sink sink(cfg.out, out);
  csv::write(sink.stream(), header, rows);
  return kExitOk;
}

int cmd_inverse(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_positive(cfg.tol_fourier, "tol-fourier");
  WeylLineData data;
  double l = cfg.l;
  int n = cfg.n;
  if (!cfg.from_potential.empty()) {
    const PotentialGrid grid = load_grid(cfg.from_potential);
    const double eta = std::isnan(cfg.eta) ? grid.norm_bound() + 1.0 : cfg.eta;
    require_positive(cfg.a, "a");
    require_positive(cfg.dxi, "dxi");
    if (!(eta > grid.norm_bound())) {
      throw DomainError("inverse", "eta = " + csv::format(eta) + " is not above M = " + csv::format(grid.norm_bound()));
    }
    data = synthesize_line_data(grid, eta, cfg.a, cfg.dxi);
    if (std::isnan(l)) l = grid.length();
    if (n == 0) n = grid.cells();
  } else if (!cfg.weyl.empty()) {
    if (std::isnan(cfg.norm_bound)) throw ValidationError("cli", "--weyl needs --norm-bound");
    data = read_line_data(cfg.weyl, cfg.norm_bound);
    if (!std::isnan(cfg.eta) && std::abs(cfg.eta - data.eta) > 1e-9 * std::max(1.0, std::abs(data.eta))) {
      throw ValidationError("cli", "--eta " + csv::format(cfg.eta) + " does not match the data's Im z = " +
                                       csv::format(data.eta));
    }
    if (std::isnan(l) || n == 0) throw ValidationError("cli", "--weyl needs --l and --n");
  } else {
    throw ValidationError("cli", "inverse needs --weyl or --from-potential");
  }
  require_positive(l, "l");
  if (n < 2) throw ValidationError("cli", "n must be at least 2");

  PipelineOptions opts;
  opts.fourier.tol = cfg.tol_fourier;
  const RecoveredPotential rec = inverse_pipeline(data, l, n, opts);

  std::vector<std::string> header{"x"};
  for (auto& c : potential_columns(data.m1, data.m2)) header.push_back(std::move(c));
  header.push_back("low_confidence");
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= n; ++k) {
    std::vector<double> row{k * rec.h};
    append_matrix(row, rec.v[static_cast<std::size_t>(k)]);
    row.push_back(k == 0 || k == n ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  const nlohmann::json diag = diagnostics_json(rec);
  Sink sink(cfg.out, out);
  for (const auto& [key, value] : diag.items()) sink.stream() << "# " << key << " = " << csv::format(value.get<double>()) << '\n';
  csv::write(sink.stream(), header, rows);
  if (!cfg.report.empty()) {
    nlohmann::json doc;
    doc["eta"] = data.eta;
    doc["a"] = data.a;
    doc["l"] = l;
    doc["n"] = n;
    doc["diagnostics"] = diag;
    Sink report(cfg.report, err);
    report.stream() << format_json(doc);
  }
  return kExitOk;
}

int cmd_roundtrip(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const PotentialGrid grid = load_grid(cfg.potential, cfg.n);
  const double eta = std::isnan(cfg.eta) ? grid.norm_bound() + 1.0 : cfg.eta;
  require_positive(cfg.a, "a");
  require_positive(cfg.dxi, "dxi");
  require_positive(cfg.tol_fourier, "tol-fourier");
  if (!(eta > grid.norm_bound())) {
    throw DomainError("inverse", "eta = " + csv::format(eta) + " is not above M = " + csv::format(grid.norm_bound()));
  }
  const WeylLineData data = synthesize_line_data(grid, eta, cfg.a, cfg.dxi);
  PipelineOptions opts;
  opts.fourier.tol = cfg.tol_fourier;
  const RecoveredPotential rec = inverse_pipeline(data, grid.length(), grid.cells(), opts);

  nlohmann::json doc;
  doc["n"] = grid.cells();
  doc["l"] = grid.length();
  doc["a"] = cfg.a;
  doc["eta"] = eta;
  doc["dxi"] = cfg.dxi;
  doc["max_error"] = max_error(rec.v, grid.nodes());
  doc["max_error_interior"] = max_error(rec.v, grid.nodes(), 0.05, 0.95);
  doc["l2_error"] = relative_l2_error(rec.v, grid.nodes());
  doc["l2_error_interior"] = relative_l2_error(rec.v, grid.nodes(), 0.05, 0.95);
  doc["diagnostics"] = diagnostics_json(rec);
  const double worst = doc["max_error"].get<double>();
  bool pass = true;
  if (!std::isnan(cfg.tolerance)) {
    doc["tolerance"] = cfg.tolerance;
    pass = worst <= cfg.tolerance;
    doc["pass"] = pass;
  }
  Sink sink(cfg.report, out);
  sink.stream() << format_json(doc);
  if (!pass) throw VerificationFailure("max error " + csv::format(worst) + " above " + csv::format(cfg.tolerance));
  return kExitOk;
}

namespace {

SolutionModel make_model(const RunConfig& cfg) {
  if (cfg.m1 < 1 || cfg.m2 < 1) throw ValidationError("cli", "m1 and m2 must be positive");
  if (cfg.model == "zero") return SolutionModel::zero(cfg.m1, cfg.m2);
  if (cfg.model == "plane-wave") {
    if (!(cfg.amplitude >= 0.0) || !std::isfinite(cfg.amplitude)) {
      throw ValidationError("cli", "amplitude must be nonnegative");
    }
    return SolutionModel::plane_wave(cfg.m1, cfg.m2, cfg.amplitude);
  }
  if (cfg.model == "sampled") {
    if (cfg.samples.empty()) throw ValidationError("cli", "--model sampled needs --samples");
    return SolutionModel::sampled(cfg.samples, cfg.m1, cfg.m2);
  }
  throw ValidationError("cli", "unknown model '" + cfg.model + "'");
}

/// phi(0, z) from a CSV in the `direct` layout, one row per z of the grid, same order.
MatrixSeries read_phi0(const std::string& path, const std::vector<cplx>& zs, int m1, int m2) {
  const csv::Table table = csv::read(path);
  auto column = [&](const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == name) return c;
    }
    throw ValidationError("cli", path + " has no column " + name);
  };
  if (table.rows.size() != zs.size()) {
    throw ValidationError("cli", path + " has " + std::to_string(table.rows.size()) + " rows for " +
                                     std::to_string(zs.size()) + " z-grid points");
  }
  const std::size_t re_z = column("re_z");
  const std::size_t im_z = column("im_z");
  MatrixSeries out;
  for (std::size_t r = 0; r < zs.size(); ++r) {
    const auto& row = table.rows[r];
    if (std::abs(cplx(row[re_z], row[im_z]) - zs[r]) > 1e-9 * std::max(1.0, std::abs(zs[r]))) {
      throw ValidationError("cli", path + " row " + std::to_string(r) + " does not match " + z_label(r, zs[r]));
    }
    CMatrix phi(m2, m1);
    for (int i = 0; i < m2; ++i) {
      for (int j = 0; j < m1; ++j) {
        const std::string idx = std::to_string(i) + "_" + std::to_string(j);
        phi(i, j) = {row[column("re_phi_" + idx)], row[column("im_phi_" + idx)]};
      }
    }
    out.push_back(std::move(phi));
  }
  return out;
}

}  // namespace

int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const SolutionModel model = make_model(cfg);
  const auto zs = parse_zgrid(cfg.zgrid);
  if (!(cfg.T >= 0.0) || !std::isfinite(cfg.T)) throw ValidationError("cli", "T must be nonnegative");
  if (cfg.nt < 1) throw ValidationError("cli", "nt must be positive");
  require_positive(cfg.cond_cap, "cond-cap");

  MatrixSeries phi0;
  if (cfg.phi0 == "direct") {
    if (!model.x_resolved) {
      throw ValidationError("cli", "--phi0 direct needs an x-resolved model; pass a CSV for sampled models");
    }
    // Preset models are x-independent, so v(., 0) is the constant v(0, 0).
    const CMatrix v0 = model.v(0.0, 0.0);
    const double bound = op_norm(v0);
    require_positive(cfg.margin, "margin");
    require_domain(zs, bound, cfg.margin, "nls");
    phi0.resize(zs.size());
    parallel_for(zs.size(), [&](std::size_t k) {
      const double l = 20.0 / (zs[k].imag() - bound);
      const PotentialGrid grid = PotentialGrid::constant(l, 400, v0, bound);
      phi0[k] = weyl_function(grid, zs[k], 1e-13, cfg.margin).phi;
    });
  } else {
    phi0 = read_phi0(cfg.phi0, zs, cfg.m1, cfg.m2);
  }

  std::vector<std::vector<std::vector<double>>> blocks(zs.size());
  parallel_for(zs.size(), [&](std::size_t k) {
    const TimePropagator prop = evolve_R(model, zs[k], cfg.T, cfg.nt);
    for (int s = 0; s <= cfg.nt; ++s) {
      EvolvedWeyl ev;
      try {
        ev = evolve_weyl(phi0[k], prop.r[static_cast<std::size_t>(s)], cfg.cond_cap);
      } catch (const ConditioningError& e) {
        throw ConditioningError("nls", z_label(k, zs[k]) + ", t index " + std::to_string(s) + ": " + e.what());
      }
      std::vector<double> row{prop.t(s), zs[k].real(), zs[k].imag()};
      append_matrix(row, ev.phi);
      row.push_back(ev.cond);
      blocks[k].push_back(std::move(row));
    }
  });

  std::vector<std::string> header{"t", "re_z", "im_z"};
  for (auto& c : phi_columns(cfg.m2, cfg.m1)) header.push_back(std::move(c));
  header.push_back("cond");
  std::vector<std::vector<double>> rows;
  for (auto& b : blocks) {
    for (auto& r : b) rows.push_back(std::move(r));
  }
  Sink sink(cfg.out, out);
  if (const auto diag = model.nls_residual_diagnostic()) {
    sink.stream() << "# nls_residual = " << csv::format(*diag) << '\n';
  }
  csv::write(sink.stream(), header, rows);
  return kExitOk;
}

int cmd_bm_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const PotentialGrid ga = load_grid(cfg.weyl_a);
  const PotentialGrid gb = load_grid(cfg.weyl_b);
  if (ga.m1() != gb.m1() || ga.m2() != gb.m2()) throw ValidationError("cli", "potentials have different shapes");
  const auto r_grid = parse_range(cfg.r_grid, "r grid");
  const auto heights = parse_range(cfg.heights, "heights");
  if (heights.size() < 3) throw ValidationError("cli", "need at least 3 heights");
  if (!std::isfinite(cfg.ray_c)) throw ValidationError("cli", "ray-c must be finite");
  const double bound = std::max(ga.norm_bound(), gb.norm_bound());
  for (std::size_t k = 0; k < heights.size(); ++k) {
    if (!(heights[k] > bound)) {
      throw DomainError("inverse", "height[" + std::to_string(k) + "] = " + csv::format(heights[k]) +
                                       " is not above M = " + csv::format(bound));
    }
  }
  const Continuation tail = cfg.continuation == "constant" ? Continuation::constant : Continuation::zero;
  const BMReport rep = borg_marchenko_check([&](cplx z) { return weyl_member(ga, z, -1, tail); },
                                            [&](cplx z) { return weyl_member(gb, z, -1, tail); }, cfg.ray_c,
                                            r_grid, heights);
  Sink sink(cfg.out, out);
  sink.stream() << "# ray_c = " << csv::format(rep.ray_c) << '\n';
  for (std::size_t k = 0; k < rep.heights.size(); ++k) {
    sink.stream() << "# height = " << csv::format(rep.heights[k]) << ", difference = " << csv::format(rep.difference[k])
                  << '\n';
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : rep.rows) {
    rows.push_back({row.r, row.sup, row.growth_per_doubling, row.agreeing ? 1.0 : 0.0});
  }
  csv::write(sink.stream(), {"r", "sup", "growth_per_doubling", "agreeing"}, rows);
  return kExitOk;
}

}  // namespace weylctl::detail
