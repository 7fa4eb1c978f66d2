#include "riemann/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "riemann/errors.hpp"

namespace riemann {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
  return out;
}

void validate_axis(const char* name, double lo, double hi, std::size_t n, double step) {
  if (n == 0) throw input_error(std::string("axis ") + name + " needs at least one point");
  if (n == 1) return;
  if (n < 3)
    throw input_error(std::string("active axis ") + name + " needs at least 3 points");
  if (!(hi > lo))
    throw input_error(std::string("active axis ") + name + " needs an increasing range");
  const double spacing = (hi - lo) / static_cast<double>(n - 1);
  const double scale = std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (!(spacing > 10.0 * step * scale))
    throw input_error(std::string("axis ") + name +
                      " spacing must exceed 10x the differencing step");
}

std::string format_g(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

Grid Grid::default_grid() {
  Grid g;
  g.t0 = 0;
  g.t1 = 1;
  g.nt = 3;
  g.x0 = -1;
  g.x1 = 1;
  g.nx = 9;
  g.y0 = -1;
  g.y1 = 1;
  g.ny = 9;
  return g;
}

Grid Grid::spatial(double x0, double x1, std::size_t nx, double y0, double y1, std::size_t ny) {
  Grid g;
  g.t0 = 0;
  g.t1 = 0;
  g.nt = 1;
  g.x0 = x0;
  g.x1 = x1;
  g.nx = nx;
  g.y0 = y0;
  g.y1 = y1;
  g.ny = ny;
  return g;
}

std::vector<double> Grid::ts() const { return linspace(t0, t1, nt); }
std::vector<double> Grid::xs() const { return linspace(x0, x1, nx); }
std::vector<double> Grid::ys() const { return linspace(y0, y1, ny); }

void Grid::validate(double diff_step) const {
  if (!(diff_step > 0)) throw input_error("differencing step must be positive");
  validate_axis("t", t0, t1, nt, diff_step);
  validate_axis("x", x0, x1, nx, diff_step);
  validate_axis("y", y0, y1, ny, diff_step);
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json eqs = nlohmann::json::array();
  for (const EquationResidual& e : equations)
    eqs.push_back({{"name", e.name},
                   {"max_abs", e.max_abs},
                   {"mean_abs", e.mean_abs},
                   {"argmax", {e.argmax[0], e.argmax[1], e.argmax[2]}}});
  return {{"equations", eqs}, {"tolerance", tolerance}, {"pass", pass}, {"masked", masked}};
}

// ---------------------------------------------------------------------------
// Differencing
// ---------------------------------------------------------------------------

namespace {

std::optional<std::vector<double>> safe_eval(const FieldEvaluator& f, double t, double x,
                                             double y) {
  if (f.mask && f.mask(t, x, y)) return std::nullopt;
  std::vector<double> v;
  try {
    v = f.eval(t, x, y);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (v.size() != f.q) return std::nullopt;
  for (double c : v)
    if (!std::isfinite(c)) return std::nullopt;
  return v;
}

void unwrap_toward(const FieldEvaluator& f, const std::vector<double>& center,
                   std::vector<double>& v) {
  if (f.period.empty()) return;
  for (std::size_t k = 0; k < v.size() && k < f.period.size(); ++k) {
    const double P = f.period[k];
    if (P > 0.0) v[k] -= P * std::round((v[k] - center[k]) / P);
  }
}

}  // namespace

std::optional<std::vector<std::array<double, 3>>> numeric_jacobian(const FieldEvaluator& f,
                                                                   double t, double x, double y,
                                                                   DiffScheme scheme,
                                                                   double step) {
  if (f.q == 0 || !f.eval) throw input_error("numeric_jacobian: empty evaluator");
  if (!(step > 0)) throw input_error("numeric_jacobian: step must be positive");
  const auto base = safe_eval(f, t, x, y);
  if (!base) return std::nullopt;

  std::vector<std::array<double, 3>> J(f.q, {0.0, 0.0, 0.0});
  const double coords[3] = {t, x, y};
  for (int axis = 0; axis < 3; ++axis) {
    const double h = step * std::max(1.0, std::abs(coords[axis]));
    auto at = [&](double delta) {
      double p[3] = {t, x, y};
      p[axis] += delta;
      auto v = safe_eval(f, p[0], p[1], p[2]);
      if (v) unwrap_toward(f, *base, *v);
      return v;
    };
    if (scheme == DiffScheme::central4) {
      const auto fp1 = at(h), fm1 = at(-h), fp2 = at(2 * h), fm2 = at(-2 * h);
      if (!fp1 || !fm1 || !fp2 || !fm2) return std::nullopt;
      for (std::size_t k = 0; k < f.q; ++k)
        J[k][axis] =
            (-(*fp2)[k] + 8.0 * (*fp1)[k] - 8.0 * (*fm1)[k] + (*fm2)[k]) / (12.0 * h);
    } else {
      const auto fp1 = at(h), fm1 = at(-h);
      if (!fp1 || !fm1) return std::nullopt;
      for (std::size_t k = 0; k < f.q; ++k) J[k][axis] = ((*fp1)[k] - (*fm1)[k]) / (2.0 * h);
    }
    for (std::size_t k = 0; k < f.q; ++k)
      if (!std::isfinite(J[k][axis])) return std::nullopt;
  }
  return J;
}

// ---------------------------------------------------------------------------
// PDE residual sweep
// ---------------------------------------------------------------------------

namespace {

struct SweepStats {
  std::vector<double> max_abs;
  std::vector<double> sum_abs;
  std::vector<std::array<double, 3>> argmax;
  std::size_t masked = 0;
  std::size_t counted = 0;
};

SweepStats residual_sweep(const SystemSpec& sys, const FieldEvaluator& sol, const Grid& grid,
                          double step) {
  if (sol.q != sys.q)
    throw input_error("solution has " + std::to_string(sol.q) + " components, system expects " +
                      std::to_string(sys.q));
  if (sys.p < 1 || sys.p > 3) throw input_error("grid verification supports p in {1, 2, 3}");
  grid.validate(step);

  SweepStats st;
  st.max_abs.assign(sys.m, 0.0);
  st.sum_abs.assign(sys.m, 0.0);
  st.argmax.assign(sys.m, {0.0, 0.0, 0.0});

  // Independent-variable convention: p = 3 -> (t, x, y); p = 2 -> (x, y).
  auto axis_of = [&](std::size_t i) { return (sys.p == 3) ? i : i + 1; };

  for (double t : grid.ts())
    for (double x : grid.xs())
      for (double y : grid.ys()) {
        if (grid.mask && grid.mask(t, x, y)) {
          ++st.masked;
          continue;
        }
        const auto J = numeric_jacobian(sol, t, x, y, DiffScheme::central4, step);
        if (!J) {
          ++st.masked;
          continue;
        }
        const auto state = safe_eval(sol, t, x, y);
        if (!state) {
          ++st.masked;
          continue;
        }
        std::vector<cplx> u(state->size());
        for (std::size_t k = 0; k < state->size(); ++k) u[k] = cplx((*state)[k], 0.0);
        Expression::Env env;
        if (sys.env_provider) env = sys.env_provider(t, x, y);
        const auto [As, b] = eval_system(sys, u, env);
        for (std::size_t mu = 0; mu < sys.m; ++mu) {
          cplx res = -b[mu];
          for (std::size_t i = 0; i < sys.p; ++i)
            for (std::size_t al = 0; al < sys.q; ++al)
              res += As[i](mu, al) * (*J)[al][axis_of(i)];
          const double a = std::abs(res);
          st.sum_abs[mu] += a;
          if (a > st.max_abs[mu]) {
            st.max_abs[mu] = a;
            st.argmax[mu] = {t, x, y};
          }
        }
        ++st.counted;
      }
  return st;
}

EquationResidual make_eq(const SweepStats& st, const SystemSpec& sys, std::size_t mu) {
  EquationResidual e;
  e.name = (mu < sys.eq_names.size()) ? sys.eq_names[mu] : ("eq" + std::to_string(mu + 1));
  e.max_abs = st.max_abs[mu];
  e.mean_abs = (st.counted == 0) ? 0.0 : st.sum_abs[mu] / static_cast<double>(st.counted);
  e.argmax = st.argmax[mu];
  return e;
}

double scale_of(const SystemSpec& sys, std::size_t mu) {
  return (mu < sys.eq_tol_scale.size() && sys.eq_tol_scale[mu] > 0) ? sys.eq_tol_scale[mu] : 1.0;
}

}  // namespace

ResidualReport pde_residuals(const SystemSpec& sys, const FieldEvaluator& solution,
                             const Grid& grid, double tol, double step) {
  if (!(tol > 0)) throw input_error("tolerance must be positive");
  const SweepStats st = residual_sweep(sys, solution, grid, step);
  ResidualReport rep;
  rep.tolerance = tol;
  rep.masked = st.masked;
  rep.label = sys.name;
  rep.pass = true;
  for (std::size_t mu = 0; mu < sys.m; ++mu) {
    rep.equations.push_back(make_eq(st, sys, mu));
    if (st.max_abs[mu] > tol * scale_of(sys, mu)) rep.pass = false;
  }
  return rep;
}

std::vector<ResidualReport> pde_residuals_grouped(const SystemSpec& sys,
                                                  const FieldEvaluator& solution, const Grid& grid,
                                                  double tol, double step) {
  if (!(tol > 0)) throw input_error("tolerance must be positive");
  const SweepStats st = residual_sweep(sys, solution, grid, step);
  std::map<double, std::vector<std::size_t>> groups;  // tolerance class -> equations
  for (std::size_t mu = 0; mu < sys.m; ++mu) groups[tol * scale_of(sys, mu)].push_back(mu);
  std::vector<ResidualReport> out;
  for (const auto& [class_tol, members] : groups) {
    ResidualReport rep;
    rep.tolerance = class_tol;
    rep.masked = st.masked;
    rep.label = sys.name + "-tol" + format_g(class_tol);
    rep.pass = true;
    for (std::size_t mu : members) {
      rep.equations.push_back(make_eq(st, sys, mu));
      if (st.max_abs[mu] > class_tol) rep.pass = false;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Second-order scalar residuals (compatibility, Liouville)
// ---------------------------------------------------------------------------

namespace {

struct ScalarSecond {
  double f = 0, fx = 0, fy = 0, fxx = 0, fyy = 0, fxy = 0;
};

// 4th-order central first/second/mixed derivatives of a one-component field
// from a 5x5 stencil; periodic fields are unwrapped toward the stencil center.
std::optional<ScalarSecond> second_derivatives(const FieldEvaluator& f, double t, double x,
                                               double y, double step, bool need_mixed) {
  const double hx = step * std::max(1.0, std::abs(x));
  const double hy = step * std::max(1.0, std::abs(y));
  double vals[5][5];
  const auto center = safe_eval(f, t, x, y);
  if (!center) return std::nullopt;
  const double c0 = (*center)[0];
  const double P = f.period.empty() ? 0.0 : f.period[0];
  for (int di = -2; di <= 2; ++di)
    for (int dj = -2; dj <= 2; ++dj) {
      if (!need_mixed && di != 0 && dj != 0) {
        vals[di + 2][dj + 2] = 0.0;  // unused off-axis entries
        continue;
      }
      const auto v = safe_eval(f, t, x + di * hx, y + dj * hy);
      if (!v) return std::nullopt;
      double w = (*v)[0];
      if (P > 0.0) w -= P * std::round((w - c0) / P);
      vals[di + 2][dj + 2] = w;
    }

  ScalarSecond out;
  out.f = c0;
  out.fx = (vals[0][2] - 8 * vals[1][2] + 8 * vals[3][2] - vals[4][2]) / (12 * hx);
  out.fy = (vals[2][0] - 8 * vals[2][1] + 8 * vals[2][3] - vals[2][4]) / (12 * hy);
  out.fxx =
      (-vals[0][2] + 16 * vals[1][2] - 30 * vals[2][2] + 16 * vals[3][2] - vals[4][2]) /
      (12 * hx * hx);
  out.fyy =
      (-vals[2][0] + 16 * vals[2][1] - 30 * vals[2][2] + 16 * vals[2][3] - vals[2][4]) /
      (12 * hy * hy);
  if (need_mixed) {
    // Tensor product of the 4th-order first-derivative weights.
    const int off[4] = {-2, -1, 1, 2};
    const double w[4] = {1.0, -8.0, 8.0, -1.0};
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) acc += w[a] * w[b] * vals[off[a] + 2][off[b] + 2];
    out.fxy = acc / (144.0 * hx * hy);
  }
  if (!std::isfinite(out.fx) || !std::isfinite(out.fy) || !std::isfinite(out.fxx) ||
      !std::isfinite(out.fyy) || !std::isfinite(out.fxy))
    return std::nullopt;
  return out;
}

ResidualReport scalar_report(const std::string& eq_name, const FieldEvaluator& field,
                             const Grid& grid, double tol, double step, bool need_mixed,
                             const std::function<double(const ScalarSecond&)>& residual_of) {
  if (field.q != 1) throw input_error(eq_name + " check expects a one-component field");
  if (!(tol > 0)) throw input_error("tolerance must be positive");
  grid.validate(step);
  ResidualReport rep;
  rep.tolerance = tol;
  rep.label = eq_name;
  EquationResidual eq;
  eq.name = eq_name;
  std::size_t counted = 0;
  for (double t : grid.ts())
    for (double x : grid.xs())
      for (double y : grid.ys()) {
        if (grid.mask && grid.mask(t, x, y)) {
          ++rep.masked;
          continue;
        }
        const auto d = second_derivatives(field, t, x, y, step, need_mixed);
        if (!d) {
          ++rep.masked;
          continue;
        }
        const double a = std::abs(residual_of(*d));
        eq.mean_abs += a;
        if (a > eq.max_abs) {
          eq.max_abs = a;
          eq.argmax = {t, x, y};
        }
        ++counted;
      }
  eq.mean_abs = (counted == 0) ? 0.0 : eq.mean_abs / static_cast<double>(counted);
  rep.pass = eq.max_abs <= tol;
  rep.equations.push_back(std::move(eq));
  return rep;
}

}  // namespace

ResidualReport compatibility_residual(const FieldEvaluator& theta, const Grid& grid, double tol,
                                      double step) {
  return scalar_report("compatibility", theta, grid, tol, step, /*need_mixed=*/true,
                       [](const ScalarSecond& d) {
                         const double c2t = std::cos(2.0 * d.f);
                         const double s2t = std::sin(2.0 * d.f);
                         return 2.0 * (d.fx * d.fx - d.fxy - d.fy * d.fy) * c2t +
                                (d.fxx + 4.0 * d.fx * d.fy - d.fyy) * s2t;
                       });
}

ResidualReport liouville_residual(const FieldEvaluator& u, double a, const Grid& grid, double tol,
                                  double step) {
  return scalar_report("liouville", u, grid, tol, step, /*need_mixed=*/false,
                       [a](const ScalarSecond& d) {
                         return d.fxx + d.fyy - a * a * std::exp(d.f);
                       });
}

// ---------------------------------------------------------------------------
// Profile ODE residual
// ---------------------------------------------------------------------------

double ode_residual_417(const PlasticityParams& params, const std::vector<cplx>& r_samples,
                        double t, PlasticityFamily fam) {
  if (r_samples.empty()) throw input_error("need at least one sample point");
  const double Om = params.Omega.value(t).real();
  double worst = 0.0;
  for (const cplx& r : r_samples) {
    const HChain c = h_chain(fam, params, t, r);
    const cplx g = c.h1;
    const cplx res = g * c.h3 - 1.5 * c.h2 * c.h2 + (Om / 2.0) * g * g * g;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Gradient-catastrophe scan
// ---------------------------------------------------------------------------

DetPhiScan det_phi_scan(const FieldEvaluator& f,
                        const std::vector<std::array<double, 2>>& dlambda_du, const Grid& grid,
                        double step) {
  if (!dlambda_du.empty() && dlambda_du.size() != f.q)
    throw input_error("dlambda/du must have one row per solution component");
  grid.validate(step);
  DetPhiScan out;
  for (double t : grid.ts())
    for (double x : grid.xs())
      for (double y : grid.ys()) {
        if (grid.mask && grid.mask(t, x, y)) continue;
        if (f.mask && f.mask(t, x, y)) continue;
        double det = 1.0;
        if (!dlambda_du.empty()) {
          const auto J = numeric_jacobian(f, t, x, y, DiffScheme::central4, step);
          if (!J) continue;
          // Phi = I - (df/dr)(dr/du) is a rank-one update, so
          // det Phi = 1 - (dr/du . df/dr).
          double dot = 0.0;
          for (std::size_t al = 0; al < f.q; ++al) {
            const double r_u = dlambda_du[al][0] * x + dlambda_du[al][1] * y;
            dot += r_u * (*J)[al][1];
          }
          det = 1.0 - dot;
        }
        const bool fl = std::abs(det) < 1e-6;
        out.points.push_back({t, x, y});
        out.det.push_back(det);
        out.flag.push_back(fl);
        if (fl) ++out.flagged;
      }
  return out;
}

}  // namespace riemann
