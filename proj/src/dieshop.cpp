#include "riemann/dieshop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riemann/errors.hpp"

namespace riemann {

namespace {

bool finite2(const std::array<double, 2>& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]);
}

std::string fmt_pt(double x, double y) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << x << ", " << y << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Streamline tracing
// ---------------------------------------------------------------------------

Polyline trace_streamline(const VelocityField& uv, double U0, double V0,
                          const StreamlineSeed& seed, const std::array<double, 4>& box) {
  if (!(seed.ds > 0)) throw input_error("streamline step ds must be positive");
  if (!(seed.s_max > 0)) throw input_error("streamline budget s_max must be positive");

  auto rel = [&](double x, double y) -> std::array<double, 2> {
    const std::array<double, 2> f = uv(x, y);
    if (!finite2(f)) throw eval_error("non-finite velocity field at " + fmt_pt(x, y));
    return {U0 - f[0], V0 - f[1]};
  };
  auto speed = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };
  const double eps = 1e-12 * (1.0 + std::max({std::abs(box[0]), std::abs(box[1]),
                                              std::abs(box[2]), std::abs(box[3])}));
  auto in_box = [&](double x, double y) {
    return x >= box[0] - eps && x <= box[1] + eps && y >= box[2] - eps && y <= box[3] + eps;
  };

  const std::array<double, 2> v0 = rel(seed.x, seed.y);
  if (speed(v0) < 1e-9)
    throw stagnation_error("streamline seeded at a stagnation point " +
                           fmt_pt(seed.x, seed.y));
  if (!in_box(seed.x, seed.y))
    throw input_error("streamline seed " + fmt_pt(seed.x, seed.y) +
                      " lies outside the tracing box");

  struct Leg {
    std::vector<double> s;
    std::vector<std::array<double, 2>> pts;
    std::vector<std::array<double, 2>> vel;
  };

  auto trace_dir = [&](double sign) {
    Leg leg;
    double x = seed.x, y = seed.y;
    leg.s.push_back(0.0);
    leg.pts.push_back({x, y});
    leg.vel.push_back(rel(x, y));
    const std::size_t max_steps =
        static_cast<std::size_t>(std::floor(seed.s_max / seed.ds + 1e-9));
    const double h = sign * seed.ds;
    for (std::size_t k = 1; k <= max_steps; ++k) {
      const std::array<double, 2> k1 = rel(x, y);
      const std::array<double, 2> k2 = rel(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1]);
      const std::array<double, 2> k3 = rel(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1]);
      const std::array<double, 2> k4 = rel(x + h * k3[0], y + h * k3[1]);
      x += (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      y += (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      if (!std::isfinite(x) || !std::isfinite(y))
        throw eval_error("streamline integration produced a non-finite point");
      const std::array<double, 2> v = rel(x, y);
      leg.s.push_back(sign * static_cast<double>(k) * seed.ds);
      leg.pts.push_back({x, y});
      leg.vel.push_back(v);
      if (!in_box(x, y)) break;     // record the exit vertex, then stop
      if (speed(v) < 1e-9) break;   // ran into stagnation
    }
    return leg;
  };

  Polyline out;
  const bool fwd =
      seed.direction == TraceDirection::forward || seed.direction == TraceDirection::both;
  const bool bwd =
      seed.direction == TraceDirection::backward || seed.direction == TraceDirection::both;
  Leg backward, forward;
  if (bwd) backward = trace_dir(-1.0);
  if (fwd) forward = trace_dir(1.0);
  if (bwd) {
    for (std::size_t k = backward.s.size(); k-- > 0;) {
      out.s.push_back(backward.s[k]);
      out.pts.push_back(backward.pts[k]);
      out.vel.push_back(backward.vel[k]);
    }
  }
  if (fwd) {
    const std::size_t start = bwd ? 1 : 0;  // the seed is already present
    for (std::size_t k = start; k < forward.s.size(); ++k) {
      out.s.push_back(forward.s[k]);
      out.pts.push_back(forward.pts[k]);
      out.vel.push_back(forward.vel[k]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Design assembly
// ---------------------------------------------------------------------------

std::vector<const Polyline*> DieDesign::all_curves() const {
  std::vector<const Polyline*> out;
  for (const auto& w : walls) out.push_back(&w);
  for (const auto& f : interior) out.push_back(&f);
  for (const auto& c : c1) out.push_back(&c);
  for (const auto& c : c2) out.push_back(&c);
  return out;
}

VelocityField design_velocity(const DieDesign& design) {
  const PlasticityParams p = design.params;
  const PlasticityFamily fam = design.family;
  const double t = design.t_frozen;
  return [p, fam, t](double x, double y) -> std::array<double, 2> {
    switch (fam) {
      case PlasticityFamily::case_i: {
        const cplx c1 = p.c1.value(t), c2 = p.c2.value(t);
        return {4.0 * (c1.real() * x + c1.imag() * y + c2.real()),
                4.0 * (c1.imag() * x - c1.real() * y + c2.imag())};
      }
      case PlasticityFamily::case_ii: {
        const cplx c1 = p.c1.value(t), c2 = p.c2.value(t), c3 = p.c3.value(t);
        if (std::abs(c1) == 0.0) return {c3.real(), c3.imag()};
        const cplx w = cplx(x, y) + c2;
        const double D = std::norm(w);
        if (D < 1e-18)
          throw singularity_error("velocity pole (r + c2 = 0) at " + fmt_pt(x, y));
        const cplx c1c2 = c1 * std::conj(c2);
        return {c3.real() + 2.0 * (c1c2.real() + c1.real() * x + c1.imag() * y) / D,
                c3.imag() + 2.0 * (-c1c2.imag() - c1.imag() * x + c1.real() * y) / D};
      }
      case PlasticityFamily::general: {
        const HChain c = h_chain(fam, p, t, cplx(x, y));
        return {2.0 * c.h.real(), -2.0 * c.h.imag()};
      }
    }
    return {0.0, 0.0};
  };
}

double tangency_defect(const Polyline& line, const VelocityField& uv, double U0, double V0) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < line.pts.size(); ++k) {
    const double cx = line.pts[k + 1][0] - line.pts[k - 1][0];
    const double cy = line.pts[k + 1][1] - line.pts[k - 1][1];
    const std::array<double, 2> f = uv(line.pts[k][0], line.pts[k][1]);
    const double vx = U0 - f[0], vy = V0 - f[1];
    const double cl = std::hypot(cx, cy);
    const double vl = std::hypot(vx, vy);
    if (vl < 1e-9 || cl == 0.0) continue;
    worst = std::max(worst, std::abs(cx * vy - cy * vx) / (cl * vl));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

std::string path_data(const Polyline& line, double yflip) {
  std::ostringstream d;
  d.precision(9);
  for (std::size_t k = 0; k < line.pts.size(); ++k) {
    d << (k == 0 ? "M " : " L ") << line.pts[k][0] << " " << yflip * line.pts[k][1];
  }
  return d.str();
}

}  // namespace

std::string emit_die_design(const DieDesign& design, DieFormat format) {
  const std::vector<const Polyline*> curves = design.all_curves();
  if (curves.empty()) throw input_error("die design has no curves");
  for (const Polyline* c : curves)
    if (c->pts.empty()) throw input_error("die design contains an empty polyline");

  if (format == DieFormat::csv) {
    std::ostringstream os;
    os.precision(17);
    os << "curve_id,s,x,y,u,v\n";
    for (const Polyline* c : curves)
      for (std::size_t k = 0; k < c->pts.size(); ++k)
        os << c->id << "," << c->s[k] << "," << c->pts[k][0] << "," << c->pts[k][1] << ","
           << c->vel[k][0] << "," << c->vel[k][1] << "\n";
    return os.str();
  }

  // SVG: y axis flipped so +y points up in the rendering.
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const Polyline* c : curves)
    for (const auto& pt : c->pts) {
      minx = std::min(minx, pt[0]);
      maxx = std::max(maxx, pt[0]);
      miny = std::min(miny, -pt[1]);
      maxy = std::max(maxy, -pt[1]);
    }
  double w = maxx - minx, h = maxy - miny;
  if (w <= 0) w = 1.0;
  if (h <= 0) h = 1.0;
  const double mx = 0.05 * w, my = 0.05 * h;
  const double vb_x = minx - mx, vb_y = miny - my, vb_w = w + 2 * mx, vb_h = h + 2 * my;
  const double sw = 0.004 * std::max(vb_w, vb_h);

  std::ostringstream os;
  os.precision(9);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
     << static_cast<int>(std::lround(800.0 * vb_h / vb_w)) << "\" viewBox=\"" << vb_x << " "
     << vb_y << " " << vb_w << " " << vb_h << "\">\n";

  auto emit_group = [&](const std::vector<Polyline>& group, const char* stroke,
                        double width_scale) {
    for (const Polyline& c : group) {
      os << "  <path id=\"" << c.id << "\" fill=\"none\" stroke=\"" << stroke
         << "\" stroke-width=\"" << sw * width_scale << "\" d=\"" << path_data(c, -1.0)
         << "\"/>\n";
    }
  };
  emit_group(design.walls, "#111111", 2.0);
  emit_group(design.interior, "#2266cc", 1.0);
  emit_group(design.c1, "#22aa55", 1.5);
  emit_group(design.c2, "#cc4422", 1.5);
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Published geometries
// ---------------------------------------------------------------------------

DieDesign reproduce_figure(const std::string& which) {
  DieDesign d;
  nlohmann::json seeds = nlohmann::json::array();

  auto add_traced = [&](std::vector<Polyline>& group, const std::string& id, double sx,
                        double sy, double U, double V, double ds, double s_max,
                        const std::array<double, 4>& box, const VelocityField& vel) {
    StreamlineSeed seed;
    seed.x = sx;
    seed.y = sy;
    seed.direction = TraceDirection::both;
    seed.ds = ds;
    seed.s_max = s_max;
    Polyline line = trace_streamline(vel, U, V, seed, box);
    line.id = id;
    group.push_back(std::move(line));
    seeds.push_back({sx, sy});
  };

  if (which == "fig1") {
    d.family = PlasticityFamily::case_i;
    d.params.c1 = Coefficient::constant(cplx(1.0, 0.0));
    d.t_frozen = 0.0;
    d.U0 = 5.95;
    d.V0 = 0.0;
    d.U1 = 24.05;
    d.V1 = 0.0;
    // The inlet/outlet stations are where the material speed matches the tool:
    // u = 4x, so x_in = U0/4 and x_out = U1/4; wall half-height 0.6.
    const double x_in = d.U0 / 4.0;
    const double x_out = d.U1 / 4.0;
    const double half_h = 0.6;
    d.box = {x_in, x_out, -half_h, half_h};
    const double diag = std::hypot(x_out - x_in, 2.0 * half_h);
    const double ds = 1e-3 * diag;
    const double s_max = 10.0 * diag;
    const VelocityField vel = design_velocity(d);

    add_traced(d.walls, "wall-top", x_in, half_h, 0.0, 0.0, ds, s_max, d.box, vel);
    add_traced(d.walls, "wall-bottom", x_in, -half_h, 0.0, 0.0, ds, s_max, d.box, vel);
    const double flow_y[5] = {-0.4, -0.2, 0.0, 0.2, 0.4};
    for (int k = 0; k < 5; ++k)
      add_traced(d.interior, "flow-" + std::to_string(k + 1), x_in + 0.05, flow_y[k], 0.0,
                 0.0, ds, s_max, d.box, vel);
    // Inlet curve: vertical line x = x_in between the walls.
    add_traced(d.c1, "inlet-upper", x_in, 0.01, d.U0, d.V0, ds, s_max, d.box, vel);
    add_traced(d.c1, "inlet-lower", x_in, -0.01, d.U0, d.V0, ds, s_max, d.box, vel);
    // Outlet curve: vertical line x = x_out, clipped at the walls
    // (xy = x_in * half_h along the wall).
    const double y_exit = x_in * half_h / x_out;
    const std::array<double, 4> exit_box = {x_in, x_out, -y_exit, y_exit};
    add_traced(d.c2, "outlet-upper", x_out, 0.01, d.U1, d.V1, ds, s_max, exit_box, vel);
    add_traced(d.c2, "outlet-lower", x_out, -0.01, d.U1, d.V1, ds, s_max, exit_box, vel);

    d.config = {{"figure", "fig1"},
                {"family", family_to_string(d.family)},
                {"params", d.params.to_json()},
                {"feed", {d.U0, d.V0}},
                {"exit", {d.U1, d.V1}},
                {"box", {d.box[0], d.box[1], d.box[2], d.box[3]}},
                {"seeds", seeds},
                {"ds", ds},
                {"s_max", s_max}};
    return d;
  }

  if (which == "fig2") {
    d.family = PlasticityFamily::case_ii;
    d.params.c2 = Coefficient::constant(cplx(0.0, -0.5));
    d.params.c3 = Coefficient::constant(cplx(-0.5, 0.0));
    d.t_frozen = 0.0;
    d.U0 = 0.2;
    d.V0 = 0.2;
    d.U1 = 0.2;
    d.V1 = -0.2;
    d.box = {-1.0, 1.0, -1.0, 1.0};
    const double diag = std::hypot(2.0, 2.0);
    const double ds = 1e-3 * diag;
    const double s_max = 10.0 * diag;
    const VelocityField vel = design_velocity(d);

    add_traced(d.walls, "wall-top", 0.0, 0.75, 0.0, 0.0, ds, s_max, d.box, vel);
    add_traced(d.walls, "wall-bottom", 0.0, -0.75, 0.0, 0.0, ds, s_max, d.box, vel);
    const double flow_y[3] = {-0.375, 0.0, 0.375};
    for (int k = 0; k < 3; ++k)
      add_traced(d.interior, "flow-" + std::to_string(k + 1), 0.0, flow_y[k], 0.0, 0.0, ds,
                 s_max, d.box, vel);
    add_traced(d.c1, "inlet-1", -0.5, 0.0, d.U0, d.V0, ds, s_max, d.box, vel);
    add_traced(d.c2, "outlet-1", 0.5, 0.0, d.U1, d.V1, ds, s_max, d.box, vel);

    d.config = {{"figure", "fig2"},
                {"family", family_to_string(d.family)},
                {"params", d.params.to_json()},
                {"feed", {d.U0, d.V0}},
                {"exit", {d.U1, d.V1}},
                {"box", {d.box[0], d.box[1], d.box[2], d.box[3]}},
                {"seeds", seeds},
                {"ds", ds},
                {"s_max", s_max}};
    return d;
  }

  throw input_error("unknown figure '" + which + "'; expected fig1 or fig2");
}

}  // namespace riemann
