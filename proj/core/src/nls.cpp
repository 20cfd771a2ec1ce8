#include "skewdirac/nls.hpp"

#include "skewdirac/csv.hpp"
#include "skewdirac/errors.hpp"
#include "skewdirac/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <tuple>

namespace skewdirac {
namespace {

// Linear interpolation of samples on a strictly increasing t-grid, clamped at the ends.
CMatrix interpolate(const std::vector<double>& ts, const MatrixSeries& values, double t) {
  if (t <= ts.front()) return values.front();
  if (t >= ts.back()) return values.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
  const double s = (t - ts[k]) / (ts[k + 1] - ts[k]);
  return (1.0 - s) * values[k] + s * values[k + 1];
}

}  // namespace

SolutionModel SolutionModel::zero(int m1, int m2) {
  const CMatrix z = CMatrix::Zero(m1, m2);
  auto fn = [z](double, double) { return z; };
  return custom("zero", m1, m2, fn, fn, fn);
}

SolutionModel SolutionModel::plane_wave(int m1, int m2, double amplitude) {
  const CMatrix u = rectangular_identity(m1, m2);
  const double w = amplitude * amplitude;
  auto v = [=](double, double t) { return (amplitude * std::exp(cplx(0.0, -w * t)) * u).eval(); };
  const CMatrix z = CMatrix::Zero(m1, m2);
  auto zero = [z](double, double) { return z; };
  SolutionModel m = custom("plane-wave", m1, m2, v, zero, zero);
  m.amplitude = amplitude;
  return m;
}

SolutionModel SolutionModel::custom(std::string kind, int m1, int m2, FieldFn v, FieldFn vx, FieldFn vxx) {
  if (m1 < 1 || m2 < 1) throw ValidationError("nls", "m1 and m2 must be positive");
  SolutionModel m;
  m.kind = std::move(kind);
  m.m1 = m1;
  m.m2 = m2;
  m.v = std::move(v);
  m.vx = std::move(vx);
  m.vxx = std::move(vxx);
  return m;
}

SolutionModel SolutionModel::sampled(const std::filesystem::path& path, int m1, int m2) {
  const csv::Table t = csv::read(path);
  if (t.header.empty()) throw ValidationError("nls", "sampled model CSV needs a header");
  int tcol = -1;
  // (field, i, j) -> (re col, im col); field 0 = v, 1 = vx, 2 = vxx
  std::map<std::tuple<int, int, int>, std::pair<int, int>> cols;
  const std::regex entry(R"((re|im)_(v|vx|vxx)_(\d+)_(\d+))");
  for (int c = 0; c < static_cast<int>(t.header.size()); ++c) {
    const std::string& name = t.header[static_cast<std::size_t>(c)];
    std::smatch mt;
    if (name == "t") {
      tcol = c;
    } else if (std::regex_match(name, mt, entry)) {
      const int field = mt[2] == "v" ? 0 : (mt[2] == "vx" ? 1 : 2);
      const int i = std::stoi(mt[3]);
      const int j = std::stoi(mt[4]);
      if (i >= m1 || j >= m2) throw ValidationError("nls", "column " + name + " exceeds m1 x m2");
      auto it = cols.try_emplace({field, i, j}, -1, -1).first;
      (mt[1] == "re" ? it->second.first : it->second.second) = c;
    }
  }
  if (tcol < 0) throw ValidationError("nls", "sampled model CSV needs a 't' column");
  bool has_vxx = false;
  for (int field = 0; field < 3; ++field) {
    int present = 0;
    for (int i = 0; i < m1; ++i) {
      for (int j = 0; j < m2; ++j) {
        auto it = cols.find({field, i, j});
        if (it != cols.end()) {
          if (it->second.first < 0 || it->second.second < 0) {
            throw ValidationError("nls", "sampled model entry missing re or im column");
          }
          ++present;
        }
      }
    }
    if (field < 2 && present != m1 * m2) throw ValidationError("nls", "sampled model needs all v and vx entries");
    if (field == 2) {
      if (present != 0 && present != m1 * m2) throw ValidationError("nls", "vxx entries incomplete");
      has_vxx = present == m1 * m2;
    }
  }
  if (t.rows.size() < 2) throw ValidationError("nls", "sampled model needs >= 2 rows");
  std::vector<double> ts;
  MatrixSeries series[3];
  for (const auto& row : t.rows) {
    const double tv = row[static_cast<std::size_t>(tcol)];
    if (!ts.empty() && !(tv > ts.back())) throw ValidationError("nls", "sample times must increase");
    ts.push_back(tv);
    for (int field = 0; field < (has_vxx ? 3 : 2); ++field) {
      CMatrix m(m1, m2);
      for (int i = 0; i < m1; ++i) {
        for (int j = 0; j < m2; ++j) {
          const auto& rc = cols.at({field, i, j});
          m(i, j) = {row[static_cast<std::size_t>(rc.first)], row[static_cast<std::size_t>(rc.second)]};
        }
      }
      series[field].push_back(std::move(m));
    }
  }
  auto make = [ts](MatrixSeries s) -> FieldFn {
    return [ts, s = std::move(s)](double, double tv) { return interpolate(ts, s, tv); };
  };
  SolutionModel m = custom("sampled", m1, m2, make(series[0]), make(series[1]),
                           has_vxx ? make(series[2]) : FieldFn{});
  m.x_resolved = false;
  m.t_min = ts.front();
  m.t_max = ts.back();
  m.sample_times = ts;
  return m;
}

std::optional<double> SolutionModel::nls_residual_diagnostic() const {
  if (x_resolved || !vxx || sample_times.size() < 3) return std::nullopt;
  double out = 0.0;
  for (std::size_t k = 1; k + 1 < sample_times.size(); ++k) {
    const double t = sample_times[k];
    const CMatrix vt = (v(0.0, sample_times[k + 1]) - v(0.0, sample_times[k - 1])) /
                       (sample_times[k + 1] - sample_times[k - 1]);
    const CMatrix vv = v(0.0, t);
    out = std::max(out, op_norm(2.0 * vt + kI * (vxx(0.0, t) + 2.0 * vv * vv.adjoint() * vv)));
  }
  return out;
}

CMatrix ZeroCurvaturePair::g(cplx z, const CMatrix& v) const { return sig.coefficient(z, v); }

CMatrix ZeroCurvaturePair::f(cplx z, const CMatrix& v, const CMatrix& vx) const {
  const CMatrix j = sig.j();
  const CMatrix big_v = sig.assemble_v(v);
  const CMatrix big_vx = sig.assemble_v(vx);
  return kI * (z * z * j - kI * z * (j * big_v) - 0.5 * (big_vx + j * big_v * big_v));
}

double zero_curvature_residual(const SolutionModel& model, double x, double t, cplx z, double h) {
  if (!(h > 0.0)) throw ValidationError("nls", "difference step must be positive");
  const ZeroCurvaturePair pair{{model.m1, model.m2}};
  const CMatrix g = pair.g(z, model.v(x, t));
  const CMatrix f = pair.f(z, model.v(x, t), model.vx(x, t));
  const CMatrix gt = (pair.g(z, model.v(x, t + h)) - pair.g(z, model.v(x, t - h))) / (2.0 * h);
  CMatrix fx;
  if (model.x_resolved) {
    fx = (pair.f(z, model.v(x + h, t), model.vx(x + h, t)) - pair.f(z, model.v(x - h, t), model.vx(x - h, t))) /
         (2.0 * h);
  } else {
    if (!model.vxx) throw ValidationError("nls", "model without x-dependence needs v_xx samples");
    // d/dx of F with V_x, V_xx supplied.
    const Signature& s = pair.sig;
    const CMatrix j = s.j();
    const CMatrix vv = s.assemble_v(model.v(x, t));
    const CMatrix vx = s.assemble_v(model.vx(x, t));
    const CMatrix vxx = s.assemble_v(model.vxx(x, t));
    fx = kI * (-kI * z * (j * vx) - 0.5 * (vxx + j * (vx * vv + vv * vx)));
  }
  return op_norm(gt - fx + g * f - f * g);
}

TimePropagator evolve_R(const SolutionModel& model, cplx z, double T, int nt, double t0) {
  if (!(T >= 0.0) || nt < 1) throw ValidationError("nls", "need T >= 0 and nt >= 1");
  if (t0 < model.t_min - 1e-12 || t0 + T > model.t_max + 1e-12) {
    throw ValidationError("nls", "time window exceeds the model's sample range");
  }
  const ZeroCurvaturePair pair{{model.m1, model.m2}};
  auto f_at = [&](double t) { return pair.f(z, model.v(0.0, t), model.vx(0.0, t)); };
  TimePropagator out;
  out.z = z;
  out.t0 = t0;
  out.dt = T / nt;
  const int m = model.m1 + model.m2;
  out.r.reserve(static_cast<std::size_t>(nt) + 1);
  out.r.push_back(CMatrix::Identity(m, m));
  const double dt = out.dt;
  for (int k = 0; k < nt; ++k) {
    const double t = t0 + k * dt;
    const CMatrix& r = out.r.back();
    const CMatrix fm = f_at(t + 0.5 * dt);
    const CMatrix k1 = f_at(t) * r;
    const CMatrix k2 = fm * (r + 0.5 * dt * k1);
    const CMatrix k3 = fm * (r + 0.5 * dt * k2);
    const CMatrix k4 = f_at(t + dt) * (r + dt * k3);
    CMatrix next = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(next)) {
      throw OverflowError("nls", "R overflows at t index " + std::to_string(k + 1), k + 1);
    }
    out.r.push_back(std::move(next));
  }
  return out;
}

EvolvedWeyl evolve_weyl(const CMatrix& phi0, const CMatrix& r, double cond_cap) {
  const Eigen::Index m2 = phi0.rows();
  const Eigen::Index m1 = phi0.cols();
  if (r.rows() != m1 + m2 || r.cols() != m1 + m2) throw ValidationError("nls", "R does not match phi0");
  const CMatrix den = r.topLeftCorner(m1, m1) + r.topRightCorner(m1, m2) * phi0;
  const CMatrix num = r.bottomLeftCorner(m2, m1) + r.bottomRightCorner(m2, m2) * phi0;
  EvolvedWeyl out;
  out.cond = condition_number(den);
  if (!(out.cond <= cond_cap)) {
    throw ConditioningError("nls", "denominator R11 + R12 phi0 has condition number " +
                                       std::to_string(out.cond) + " above the cap " + std::to_string(cond_cap));
  }
  out.phi = den.adjoint().partialPivLu().solve(num.adjoint()).adjoint();
  return out;
}

double contractivity_excess(const Signature& sig, const CMatrix& r) {
  return max_eigenvalue(gram_from(sig, r) - sig.j());
}

}  // namespace skewdirac
