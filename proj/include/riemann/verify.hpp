#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riemann/fields.hpp"
#include "riemann/solutions.hpp"
#include "riemann/systems.hpp"

namespace riemann {

// Uniform evaluation grid. An axis is active when its count is > 1; active axes
// need >= 3 points and spacing > 10x the differencing step.
struct Grid {
  double t0 = 0, t1 = 0;
  std::size_t nt = 1;
  double x0 = -1, x1 = 1;
  std::size_t nx = 9;
  double y0 = -1, y1 = 1;
  std::size_t ny = 9;
  std::function<bool(double t, double x, double y)> mask;  // true = excluded

  // 3 time samples on [0,1], 9x9 on [-1,1]^2.
  static Grid default_grid();
  // nx x ny spatial-only grid on [x0,x1] x [y0,y1] (single time sample t = 0).
  static Grid spatial(double x0, double x1, std::size_t nx, double y0, double y1, std::size_t ny);

  std::vector<double> ts() const;
  std::vector<double> xs() const;
  std::vector<double> ys() const;
  void validate(double diff_step) const;  // throws input_error on bad shape
};

struct EquationResidual {
  std::string name;
  double max_abs = 0;
  double mean_abs = 0;
  std::array<double, 3> argmax{0, 0, 0};
};

struct ResidualReport {
  std::vector<EquationResidual> equations;
  double tolerance = 0;
  bool pass = false;  // every max_abs <= tolerance
  std::size_t masked = 0;
  std::string label;  // not serialized; used by the CLI for file naming/logs

  nlohmann::json to_json() const;
};

enum class DiffScheme { central2, central4 };

// Partial derivatives of every component with respect to (t, x, y); 4th-order
// central by default, step 1e-4 relative to coordinate scale (per-axis step =
// step * max(1, |coordinate|)). Periodic components are unwrapped toward the
// stencil center. Returns nullopt when evaluation fails or the stencil
// touches masked territory (a masked-point marker, not NaN).
std::optional<std::vector<std::array<double, 3>>> numeric_jacobian(
    const FieldEvaluator& f, double t, double x, double y,
    DiffScheme scheme = DiffScheme::central4, double step = 1e-4);

// Residual A^{mu i}(u) u_i - b^mu(u) over the grid. Equations with
// eq_tol_scale s pass at s * tol.
ResidualReport pde_residuals(const SystemSpec& sys, const FieldEvaluator& solution,
                             const Grid& grid, double tol, double step = 1e-4);

// Same sweep, but one schema-exact report per tolerance class (equations whose
// eq_tol_scale coincide are grouped; each report's pass checks its own
// tolerance). Order: ascending tolerance.
std::vector<ResidualReport> pde_residuals_grouped(const SystemSpec& sys,
                                                  const FieldEvaluator& solution, const Grid& grid,
                                                  double tol, double step = 1e-4);

// Mixed-derivative compatibility of the angle field:
// 2(theta_x^2 - theta_xy - theta_y^2) cos 2theta
//   + (theta_xx + 4 theta_x theta_y - theta_yy) sin 2theta = 0.
ResidualReport compatibility_residual(const FieldEvaluator& theta, const Grid& grid, double tol,
                                      double step = 1e-4);

// u_xx + u_yy - a^2 e^u = 0.
ResidualReport liouville_residual(const FieldEvaluator& u, double a, const Grid& grid, double tol,
                                  double step = 1e-4);

// Max |g g'' - (3/2) g'^2 + (Omega/2) g^3| over the samples, g = h'(r), using
// the analytic derivative chain of the general family.
double ode_residual_417(const PlasticityParams& params, const std::vector<cplx>& r_samples,
                        double t = 0.0, PlasticityFamily fam = PlasticityFamily::general);

// Gradient-catastrophe scan: det Phi with Phi = I_q - (df/dr)(dr/du), where
// df/dr is the x-partial of the profile (the x axis plays the invariant) and
// dr/du^alpha = sum_i dlambda[alpha][i] x^i. dlambda empty means a constant
// wave vector (Phi = I, det = 1). Flags |det| < 1e-6.
struct DetPhiScan {
  std::vector<std::array<double, 3>> points;  // unmasked grid points
  std::vector<double> det;
  std::vector<bool> flag;
  std::size_t flagged = 0;
};
DetPhiScan det_phi_scan(const FieldEvaluator& f,
                        const std::vector<std::array<double, 2>>& dlambda_du, const Grid& grid,
                        double step = 1e-4);

}  // namespace riemann
