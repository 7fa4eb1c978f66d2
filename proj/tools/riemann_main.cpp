// Command-line surface: dispersion roots, grid verification, profile-ODE and
// trace-condition checks, die-geometry emission, and the factorization
// diagnostic. Exit codes: 0 pass, 1 verification fail, 2 usage/input error,
// 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riemann/dieshop.hpp"
#include "riemann/dispersion.hpp"
#include "riemann/errors.hpp"
#include "riemann/solutions.hpp"
#include "riemann/systems.hpp"
#include "riemann/verify.hpp"

namespace {

using namespace riemann;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Inline JSON (starts with '{' or '[') or a path to a JSON file.
nlohmann::json json_or_path(const std::string& arg) {
  std::string text = arg;
  const std::size_t k = text.find_first_not_of(" \t\r\n");
  if (k == std::string::npos || (text[k] != '{' && text[k] != '['))
    text = read_text_file(arg);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw syntax_error(std::string("malformed JSON: ") + e.what(),
                       e.byte > 0 ? e.byte - 1 : 0);
  }
}

SystemSpec load_system(const std::string& arg, const BuiltinOptions& opts = {}) {
  const std::string prefix = "builtin:";
  if (arg.rfind(prefix, 0) == 0) return builtin_system(arg.substr(prefix.size()), opts);
  return parse_system_config_text(read_text_file(arg));
}

// "default" or "t:lo,hi,n;x:lo,hi,n;y:lo,hi,n" (axes optional, unlisted axes
// keep the default-grid values).
Grid parse_grid_spec(const std::string& spec) {
  Grid g = Grid::default_grid();
  if (spec.empty() || spec == "default") return g;
  std::istringstream parts(spec);
  std::string part;
  while (std::getline(parts, part, ';')) {
    if (part.empty()) continue;
    const std::size_t colon = part.find(':');
    if (colon != 1 || (part[0] != 't' && part[0] != 'x' && part[0] != 'y'))
      throw input_error("bad grid axis in '" + part + "' (want t:lo,hi,n)");
    std::istringstream fields(part.substr(2));
    std::string lo_s, hi_s, n_s;
    if (!std::getline(fields, lo_s, ',') || !std::getline(fields, hi_s, ',') ||
        !std::getline(fields, n_s, ','))
      throw input_error("bad grid range in '" + part + "' (want t:lo,hi,n)");
    double lo, hi;
    long n;
    try {
      std::size_t pos = 0;
      lo = std::stod(lo_s, &pos);
      if (pos != lo_s.size()) throw std::invalid_argument(lo_s);
      hi = std::stod(hi_s, &pos);
      if (pos != hi_s.size()) throw std::invalid_argument(hi_s);
      n = std::stol(n_s, &pos);
      if (pos != n_s.size()) throw std::invalid_argument(n_s);
    } catch (const std::exception&) {
      throw input_error("bad grid numbers in '" + part + "'");
    }
    if (n < 1) throw input_error("grid axis count must be at least 1 in '" + part + "'");
    switch (part[0]) {
      case 't': g.t0 = lo; g.t1 = hi; g.nt = static_cast<std::size_t>(n); break;
      case 'x': g.x0 = lo; g.x1 = hi; g.nx = static_cast<std::size_t>(n); break;
      case 'y': g.y0 = lo; g.y1 = hi; g.ny = static_cast<std::size_t>(n); break;
    }
  }
  return g;
}

double resolve_tol(double flag_tol, double fallback) {
  if (flag_tol > 0) return flag_tol;
  if (const char* env = std::getenv("RIEMANN_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0))
      throw input_error("RIEMANN_TOL must be a positive number");
    return v;
  }
  return fallback;
}

// Negative-control injection: adds 0.05 x^2 to the named component.
FieldEvaluator corrupt_component(const FieldEvaluator& base, const std::string& name) {
  std::size_t idx = base.names.size();
  for (std::size_t k = 0; k < base.names.size(); ++k)
    if (base.names[k] == name) idx = k;
  if (idx == base.names.size()) {
    std::string have;
    for (const auto& n : base.names) have += (have.empty() ? "" : ", ") + n;
    throw input_error("unknown component '" + name + "' for --corrupt (have: " + have + ")");
  }
  FieldEvaluator out = base;
  auto inner = base.eval;
  out.eval = [inner, idx](double t, double x, double y) {
    std::vector<double> v = inner(t, x, y);
    v[idx] += 0.05 * x * x;
    return v;
  };
  return out;
}

void write_json(const nlohmann::json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw input_error("cannot write '" + out_path + "'");
    f << text << "\n";
  }
  std::cout << text << "\n";
}

void write_text(const std::string& text, const std::string& out_path) {
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw input_error("cannot write '" + out_path + "'");
    f << text;
    std::cerr << "wrote " << out_path << " (" << text.size() << " bytes)\n";
  } else {
    std::cout << text;
  }
}

void summarize(const ResidualReport& rep) {
  for (const auto& eq : rep.equations)
    std::cerr << "  " << eq.name << ": max " << eq.max_abs << ", mean " << eq.mean_abs
              << " at (" << eq.argmax[0] << ", " << eq.argmax[1] << ", " << eq.argmax[2]
              << ")\n";
  std::cerr << (rep.pass ? "PASS" : "FAIL") << " at tolerance " << rep.tolerance << " ("
            << rep.masked << " masked)\n";
}

int emit_reports(const std::vector<ResidualReport>& reports, const std::string& out_path) {
  bool pass = true;
  for (const auto& rep : reports) {
    summarize(rep);
    pass = pass && rep.pass;
  }
  nlohmann::json doc;
  if (reports.size() == 1) {
    doc = reports.front().to_json();
  } else {
    doc = nlohmann::json::array();
    for (const auto& rep : reports) doc.push_back(rep.to_json());
  }
  write_json(doc, out_path);
  return pass ? 0 : 1;
}

std::string fmt_root(cplx z) {
  std::ostringstream os;
  os.precision(15);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_dispersion(const std::string& system_arg, const std::string& state_arg,
                   const std::string& out_path) {
  const SystemSpec sys = load_system(system_arg);
  std::vector<cplx> state(sys.q, cplx(0.0, 0.0));
  if (!state_arg.empty()) {
    const nlohmann::json j = json_or_path(state_arg);
    if (!j.is_array() || j.size() != sys.q)
      throw input_error("--state must be an array of " + std::to_string(sys.q) + " numbers");
    for (std::size_t k = 0; k < sys.q; ++k) {
      if (j[k].is_number())
        state[k] = cplx(j[k].get<double>(), 0.0);
      else if (j[k].is_array() && j[k].size() == 2)
        state[k] = cplx(j[k][0].get<double>(), j[k][1].get<double>());
      else
        throw input_error("--state entries must be numbers or [re, im] pairs");
    }
  }
  Expression::Env env;
  if (sys.env_provider) env = sys.env_provider(0.0, 0.0, 0.0);
  const std::vector<cplx> roots = dispersion_roots_2d(sys, state, env);

  const auto [As, b] = eval_system(sys, state, env);
  nlohmann::json jroots = nlohmann::json::array();
  nlohmann::json jkernels = nlohmann::json::array();
  if (roots.empty()) std::cout << "no dispersive wave vectors (gauge lambda = (1, zeta))\n";
  for (const cplx& z : roots) {
    std::cout << "zeta = " << fmt_root(z) << "\n";
    jroots.push_back({z.real(), z.imag()});
    ComplexMatrix S = As[0] + z * As[1];
    const auto kernel = kernel_basis(S, 1e-8);
    nlohmann::json jk = nlohmann::json::array();
    for (const auto& gamma : kernel) {
      std::cout << "  gamma = [";
      nlohmann::json jg = nlohmann::json::array();
      for (std::size_t k = 0; k < gamma.size(); ++k) {
        std::cout << (k ? ", " : "") << fmt_root(gamma[k]);
        jg.push_back({gamma[k].real(), gamma[k].imag()});
      }
      std::cout << "]\n";
      jk.push_back(jg);
    }
    jkernels.push_back(jk);
  }
  if (!out_path.empty())
    write_json({{"system", sys.name}, {"roots", jroots}, {"kernels", jkernels}}, out_path);
  return 0;
}

struct PlasticityCli {
  std::string family = "general";
  std::string params_arg;
  std::string system_arg = "builtin:plasticity-full";
  std::string grid_spec = "default";
  std::string corrupt;
  std::string out_path;
  double tol = 0;
  double mask_radius = 0.35;
};

std::pair<PlasticityParams, PlasticityFamily> load_plasticity(const PlasticityCli& cli) {
  nlohmann::json doc = nlohmann::json::object();
  if (!cli.params_arg.empty()) doc = json_or_path(cli.params_arg);
  PlasticityParams params = PlasticityParams::from_json(doc);
  std::string fam_name = cli.family;
  if (doc.is_object() && doc.contains("family")) fam_name = doc["family"].get<std::string>();
  return {params, family_from_string(fam_name)};
}

int run_verify_plasticity(const PlasticityCli& cli) {
  const auto [params, fam] = load_plasticity(cli);
  BuiltinOptions opts;
  opts.V = params.V_text;
  opts.rho = params.rho;
  const SystemSpec sys = load_system(cli.system_arg, opts);

  FieldEvaluator field;
  if (sys.name == "plasticity-full")
    field = plasticity_full_evaluator(params, fam);
  else if (sys.name == "plasticity-reduced")
    field = plasticity_reduced_evaluator(params, fam);
  else if (sys.name == "plasticity-subsystem")
    field = plasticity_subsystem_evaluator(params, fam);
  else
    throw input_error("verify plasticity expects one of the plasticity builtins, got '" +
                      sys.name + "'");
  if (!cli.corrupt.empty()) field = corrupt_component(field, cli.corrupt);

  Grid grid = parse_grid_spec(cli.grid_spec);
  if (fam == PlasticityFamily::case_ii)
    grid.mask = case_ii_singularity_mask(params, cli.mask_radius);

  const double tol = resolve_tol(cli.tol, 1e-6);
  return emit_reports(pde_residuals_grouped(sys, field, grid, tol), cli.out_path);
}

int run_verify_waveparticle(const std::string& psi_text, double a, int n,
                            const std::string& grid_spec, double tol_flag,
                            const std::string& corrupt, const std::string& out_path) {
  const HolomorphicFn psi(psi_text);
  BuiltinOptions opts;
  opts.a = a;
  const SystemSpec sys = builtin_system("wave-particle", opts);
  FieldEvaluator field = wave_particle_evaluator(psi, a, n);
  if (!corrupt.empty()) field = corrupt_component(field, corrupt);
  const Grid grid = parse_grid_spec(grid_spec);
  const double tol = resolve_tol(tol_flag, 1e-6);
  return emit_reports({pde_residuals(sys, field, grid, tol)}, out_path);
}

int run_verify_system(const std::string& system_arg, const std::string& solution_arg,
                      const std::string& grid_spec, double tol_flag,
                      const std::string& corrupt, const std::string& out_path) {
  const SystemSpec sys = load_system(system_arg);
  if (solution_arg.empty())
    throw input_error("verify system needs --solution-const (a constant state)");
  const nlohmann::json j = json_or_path(solution_arg);
  if (!j.is_array() || j.size() != sys.q)
    throw input_error("--solution-const must be an array of " + std::to_string(sys.q) +
                      " numbers");
  std::vector<double> state(sys.q);
  for (std::size_t k = 0; k < sys.q; ++k) {
    if (!j[k].is_number()) throw input_error("--solution-const entries must be numbers");
    state[k] = j[k].get<double>();
  }
  FieldEvaluator field;
  field.q = sys.q;
  field.names = sys.vars;
  field.eval = [state](double, double, double) { return state; };
  if (!corrupt.empty()) field = corrupt_component(field, corrupt);
  const Grid grid = parse_grid_spec(grid_spec);
  const double tol = resolve_tol(tol_flag, 1e-6);
  return emit_reports({pde_residuals(sys, field, grid, tol)}, out_path);
}

int run_ode417(const PlasticityCli& cli, int samples, double radius, double t) {
  const auto [params, fam] = load_plasticity(cli);
  if (samples < 1) throw input_error("--samples must be at least 1");
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<cplx> rs;
  while (rs.size() < static_cast<std::size_t>(samples)) {
    const cplx r(radius * unit(gen), radius * unit(gen));
    if (std::abs(r) <= radius) rs.push_back(r);
  }
  const double tol = resolve_tol(cli.tol, 1e-8);
  const double res = ode_residual_417(params, rs, t, fam);
  const bool pass = res <= tol;
  std::cerr << "profile ODE residual max " << res << " over " << samples << " samples: "
            << (pass ? "PASS" : "FAIL") << " at tolerance " << tol << "\n";
  write_json({{"check", "ode417"},
              {"family", family_to_string(fam)},
              {"max_abs", res},
              {"samples", samples},
              {"tolerance", tol},
              {"pass", pass}},
             cli.out_path);
  return pass ? 0 : 1;
}

int run_tracecheck(const PlasticityCli& cli, int points) {
  const auto [params, fam] = load_plasticity(cli);
  if (points < 1) throw input_error("--points must be at least 1");
  const SystemSpec sys = builtin_system("plasticity-subsystem");
  FieldEvaluator field = plasticity_subsystem_evaluator(params, fam);
  if (!cli.corrupt.empty()) field = corrupt_component(field, cli.corrupt);
  auto mask = (fam == PlasticityFamily::case_ii)
                  ? case_ii_singularity_mask(params, cli.mask_radius)
                  : std::function<bool(double, double, double)>();

  ComplexMatrix Lambda(2, 2);
  Lambda(0, 0) = cplx(1, 0);
  Lambda(0, 1) = cplx(0, 1);
  Lambda(1, 0) = cplx(1, 0);
  Lambda(1, 1) = cplx(0, -1);

  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> ut(0.0, 1.0), uxy(-1.0, 1.0);
  double worst = 0.0;
  nlohmann::json jpts = nlohmann::json::array();
  int placed = 0, guard = 0;
  while (placed < points && guard < 100000) {
    ++guard;
    const double t = ut(gen), x = uxy(gen), y = uxy(gen);
    if (mask && mask(t, x, y)) continue;
    const std::vector<cplx> res = trace_condition_residual(sys, field, Lambda, t, x, y);
    double here = 0.0;
    for (const cplx& r : res) here = std::max(here, std::abs(r));
    worst = std::max(worst, here);
    jpts.push_back({{"point", {t, x, y}}, {"max_abs", here}});
    ++placed;
  }
  const double tol = resolve_tol(cli.tol, 1e-6);
  const bool pass = worst <= tol;
  std::cerr << "trace-condition residual max " << worst << " over " << placed
            << " random points: " << (pass ? "PASS" : "FAIL") << " at tolerance " << tol
            << "\n";
  write_json({{"check", "tracecheck"},
              {"family", family_to_string(fam)},
              {"max_abs", worst},
              {"points", jpts},
              {"tolerance", tol},
              {"pass", pass}},
             cli.out_path);
  return pass ? 0 : 1;
}

int run_die(const std::string& figure, const std::string& format, std::string out_path) {
  const DieDesign design = reproduce_figure(figure);
  if (format == "json") {
    write_json(design.config, out_path);
    return 0;
  }
  const DieFormat fmt = (format == "csv") ? DieFormat::csv : DieFormat::svg;
  if (out_path.empty()) out_path = "die-" + figure + (fmt == DieFormat::csv ? ".csv" : ".svg");
  write_text(emit_die_design(design, fmt), out_path);

  const VelocityField vel = design_velocity(design);
  double worst = 0.0;
  for (const Polyline& line : design.interior)
    worst = std::max(worst, tangency_defect(line, vel, 0.0, 0.0));
  for (const Polyline& line : design.walls)
    worst = std::max(worst, tangency_defect(line, vel, 0.0, 0.0));
  std::cerr << "max streamline tangency defect: " << worst << "\n";
  return 0;
}

int run_inhom_check(double u, double phi, double a, int eps, const std::string& out_path) {
  const WaveParticleFactorDiag d = wave_particle_factorization_diag(u, phi, a, eps);
  std::cout << "rotation matrix L:\n";
  for (std::size_t r = 0; r < d.L.rows(); ++r) {
    std::cout << "  [";
    for (std::size_t c = 0; c < d.L.cols(); ++c)
      std::cout << (c ? ", " : "") << fmt_root(d.L(r, c));
    std::cout << "]\n";
  }
  std::cout << "L special-orthogonal: " << (d.L_special_orthogonal ? "yes" : "no") << "\n";
  std::cout << "scalar factor, reading (1 - eps*i): " << fmt_root(d.omega_reading_a)
            << "  -> condition residual " << d.residual_reading_a << "\n";
  std::cout << "scalar factor, reading (1 - eps^i): " << fmt_root(d.omega_reading_b)
            << "  -> condition residual " << d.residual_reading_b << "\n";
  std::cout << "mode dispersion det (L alone): " << fmt_root(d.mode_dispersion_det) << "\n";
  if (!out_path.empty()) {
    nlohmann::json jl = nlohmann::json::array();
    for (std::size_t r = 0; r < d.L.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < d.L.cols(); ++c)
        row.push_back({d.L(r, c).real(), d.L(r, c).imag()});
      jl.push_back(row);
    }
    write_json({{"check", "inhom-check"},
                {"eps", eps},
                {"state", {u, phi}},
                {"a", a},
                {"L", jl},
                {"L_special_orthogonal", d.L_special_orthogonal},
                {"omega_reading_a", {d.omega_reading_a.real(), d.omega_reading_a.imag()}},
                {"omega_reading_b", {d.omega_reading_b.real(), d.omega_reading_b.imag()}},
                {"residual_reading_a", d.residual_reading_a},
                {"residual_reading_b", d.residual_reading_b},
                {"mode_dispersion_det",
                 {d.mode_dispersion_det.real(), d.mode_dispersion_det.imag()}}},
               out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional simple-wave / simple-mode solution toolkit"};
  app.require_subcommand(1);

  // dispersion
  auto* disp = app.add_subcommand("dispersion", "Dispersion roots and polarization kernels");
  std::string disp_system = "builtin:plasticity-subsystem";
  std::string disp_state, disp_out;
  disp->add_option("--system", disp_system, "builtin:NAME or path to a system JSON");
  disp->add_option("--state", disp_state, "state vector JSON (default zeros)");
  disp->add_option("--out", disp_out, "write a JSON report here");

  // verify
  auto* verify = app.add_subcommand("verify", "Grid residual verification");
  verify->require_subcommand(1);

  PlasticityCli vp_cli;
  auto* vp = verify->add_subcommand("plasticity", "Verify a plasticity closed form");
  vp->add_option("--family", vp_cli.family, "general | case-i | case-ii");
  vp->add_option("--params", vp_cli.params_arg, "PlasticityParams JSON or path");
  vp->add_option("--system", vp_cli.system_arg,
                 "builtin:plasticity-full | plasticity-reduced | plasticity-subsystem");
  vp->add_option("--grid", vp_cli.grid_spec, "default or t:lo,hi,n;x:lo,hi,n;y:lo,hi,n");
  vp->add_option("--tol", vp_cli.tol, "base residual tolerance");
  vp->add_option("--corrupt", vp_cli.corrupt, "inject 0.05 x^2 into the named component");
  vp->add_option("--mask-radius", vp_cli.mask_radius, "case-ii pole mask radius");
  vp->add_option("--out", vp_cli.out_path, "write the report JSON here");

  auto* vw = verify->add_subcommand("waveparticle", "Verify a wave-particle closed form");
  std::string vw_psi, vw_grid = "default", vw_corrupt, vw_out;
  double vw_a = 1.0, vw_tol = 0;
  int vw_n = 1;
  vw->add_option("--psi", vw_psi, "holomorphic profile expression in r")->required();
  vw->add_option("--a", vw_a, "coupling constant (default 1)");
  vw->add_option("--n", vw_n, "odd branch index (default 1)");
  vw->add_option("--grid", vw_grid, "default or t:lo,hi,n;x:lo,hi,n;y:lo,hi,n");
  vw->add_option("--tol", vw_tol, "residual tolerance");
  vw->add_option("--corrupt", vw_corrupt, "inject 0.05 x^2 into the named component");
  vw->add_option("--out", vw_out, "write the report JSON here");

  auto* vs = verify->add_subcommand("system", "Verify a constant state of a system");
  std::string vs_system, vs_solution, vs_grid = "default", vs_corrupt, vs_out;
  double vs_tol = 0;
  vs->add_option("--system", vs_system, "builtin:NAME or path")->required();
  vs->add_option("--solution-const", vs_solution, "constant state JSON array");
  vs->add_option("--grid", vs_grid, "default or t:lo,hi,n;x:lo,hi,n;y:lo,hi,n");
  vs->add_option("--tol", vs_tol, "residual tolerance");
  vs->add_option("--corrupt", vs_corrupt, "inject 0.05 x^2 into the named component");
  vs->add_option("--out", vs_out, "write the report JSON here");

  // ode417
  PlasticityCli ode_cli;
  int ode_samples = 20;
  double ode_radius = 0.5, ode_t = 0.0;
  auto* ode = app.add_subcommand("ode417", "Profile-ODE residual of the h chain");
  ode->add_option("--family", ode_cli.family, "general | case-i | case-ii");
  ode->add_option("--params", ode_cli.params_arg, "PlasticityParams JSON or path");
  ode->add_option("--samples", ode_samples, "number of random sample points (default 20)");
  ode->add_option("--radius", ode_radius, "sampling disc radius (default 0.5)");
  ode->add_option("--t", ode_t, "evaluation time (default 0)");
  ode->add_option("--tol", ode_cli.tol, "residual tolerance (default 1e-8)");
  ode->add_option("--out", ode_cli.out_path, "write the report JSON here");

  // tracecheck
  PlasticityCli tc_cli;
  int tc_points = 20;
  auto* tc = app.add_subcommand("tracecheck", "Trace conditions at random points");
  tc->add_option("--family", tc_cli.family, "general | case-i | case-ii");
  tc->add_option("--params", tc_cli.params_arg, "PlasticityParams JSON or path");
  tc->add_option("--points", tc_points, "number of random points (default 20)");
  tc->add_option("--tol", tc_cli.tol, "residual tolerance (default 1e-6)");
  tc->add_option("--corrupt", tc_cli.corrupt, "inject 0.05 x^2 into the named component");
  tc->add_option("--mask-radius", tc_cli.mask_radius, "case-ii pole mask radius");
  tc->add_option("--out", tc_cli.out_path, "write the report JSON here");

  // die
  std::string die_figure = "fig1", die_format = "svg", die_out;
  auto* die = app.add_subcommand("die", "Emit a die geometry (SVG/CSV/config JSON)");
  die->add_option("--figure", die_figure, "fig1 | fig2");
  die->add_option("--format", die_format, "svg | csv | json")
      ->check(CLI::IsMember({"svg", "csv", "json"}));
  die->add_option("--out", die_out, "output path (default die-<figure>.<ext>)");

  // inhom-check
  double ic_u = 0.7, ic_phi = 2.1, ic_a = 1.0;
  int ic_eps = 1;
  std::string ic_out;
  auto* ic = app.add_subcommand("inhom-check",
                                "Factorization diagnostic of the wave-particle system");
  ic->add_option("--u", ic_u, "state u (default 0.7)");
  ic->add_option("--phi", ic_phi, "state phi (default 2.1)");
  ic->add_option("--a", ic_a, "coupling constant (default 1)");
  ic->add_option("--eps", ic_eps, "sign epsilon, +1 or -1")->check(CLI::IsMember({1, -1}));
  ic->add_option("--out", ic_out, "write a JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (disp->parsed()) return run_dispersion(disp_system, disp_state, disp_out);
    if (vp->parsed()) return run_verify_plasticity(vp_cli);
    if (vw->parsed())
      return run_verify_waveparticle(vw_psi, vw_a, vw_n, vw_grid, vw_tol, vw_corrupt, vw_out);
    if (vs->parsed())
      return run_verify_system(vs_system, vs_solution, vs_grid, vs_tol, vs_corrupt, vs_out);
    if (ode->parsed()) return run_ode417(ode_cli, ode_samples, ode_radius, ode_t);
    if (tc->parsed()) return run_tracecheck(tc_cli, tc_points);
    if (die->parsed()) return run_die(die_figure, die_format, die_out);
    if (ic->parsed()) return run_inhom_check(ic_u, ic_phi, ic_a, ic_eps, ic_out);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const syntax_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const convergence_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const singularity_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const degenerate_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const stagnation_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const eval_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
