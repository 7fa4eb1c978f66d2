#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riemann/solutions.hpp"

namespace riemann {

// Planar velocity sampler at the frozen design time.
using VelocityField = std::function<std::array<double, 2>(double x, double y)>;

enum class TraceDirection { forward, backward, both };

struct StreamlineSeed {
  double x = 0, y = 0;
  TraceDirection direction = TraceDirection::both;
  double ds = 1e-3;     // integration step in the autonomous parameter
  double s_max = 10.0;  // trace budget per direction
};

struct Polyline {
  std::string id;
  std::vector<double> s;                     // parameter values
  std::vector<std::array<double, 2>> pts;    // vertices
  std::vector<std::array<double, 2>> vel;    // relative velocity at vertices
};

// Integrates dx/ds = U0 - u(x,y), dy/ds = V0 - v(x,y) by fixed-step RK4 from
// the seed; terminates at s_max, on leaving `box` (xmin, xmax, ymin, ymax), or
// at stagnation (speed < 1e-9). Seeding at a stagnation point or hitting a
// non-finite field value raises an error.
Polyline trace_streamline(const VelocityField& uv, double U0, double V0,
                          const StreamlineSeed& seed,
                          const std::array<double, 4>& box = {-1e30, 1e30, -1e30, 1e30});

struct DieDesign {
  PlasticityFamily family = PlasticityFamily::case_i;
  PlasticityParams params;
  double t_frozen = 0.0;
  double U0 = 0, V0 = 0;  // feed velocity
  double U1 = 0, V1 = 0;  // extraction velocity
  std::vector<Polyline> walls;
  std::vector<Polyline> interior;
  std::vector<Polyline> c1;  // inlet boundary curves (feed-relative streamlines)
  std::vector<Polyline> c2;  // outlet boundary curves (exit-relative streamlines)
  std::array<double, 4> box{-1, 1, -1, 1};
  nlohmann::json config;  // the reproducible design config (seeds, ds, s_max)

  std::vector<const Polyline*> all_curves() const;
};

enum class DieFormat { svg, csv };

// SVG 1.1 (one path per polyline, walls stroked distinctly, viewBox fitted
// with a 5% margin) or CSV with columns curve_id, s, x, y, u, v.
std::string emit_die_design(const DieDesign& design, DieFormat format);

// Largest central-chord tangency defect over interior vertices of a polyline:
// |chord x velocity| / (|chord| |velocity|), skipping near-stagnation vertices.
double tangency_defect(const Polyline& line, const VelocityField& uv, double U0, double V0);

// The two published die geometries:
//   fig1: linear family, Re c1 = 1, feed (5.95, 0), exit (24.05, 0)
//   fig2: inverse-linear family, Im c2 = -0.5, Re c3 = -0.5, feed (0.2, 0.2),
//         exit (0.2, -0.2)
// Walls and interior flow lines are material streamlines; boundary curves use
// the feed / exit velocities. Wall seeds and steps are recorded in `config` --
// the published figures are parameter-exact but their imagery (seed choices,
// extents) is not recoverable, so geometry is property-checked instead.
DieDesign reproduce_figure(const std::string& which);

// Velocity sampler for a design's frozen fields.
VelocityField design_velocity(const DieDesign& design);

}  // namespace riemann
