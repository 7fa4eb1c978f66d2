#include "riemann/systems.hpp"

#include <cctype>
#include <set>
#include <utility>

#include "riemann/errors.hpp"

namespace riemann {

namespace {

std::set<std::string> name_set(const std::vector<std::string>& v) {
  return std::set<std::string>(v.begin(), v.end());
}

void validate_identifier(const std::string& s) {
  if (s.empty()) throw input_error("variable name must be non-empty");
  if (s == "i" || s == "pi")
    throw input_error("variable name '" + s + "' shadows a built-in constant");
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    throw input_error("variable name '" + s + "' is not an identifier");
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      throw input_error("variable name '" + s + "' is not an identifier");
}

Expression parse_entry(const std::string& text, const std::set<std::string>& allowed,
                       const std::string& where) {
  try {
    return parse_expression(text, allowed);
  } catch (const syntax_error& e) {
    throw syntax_error(where + ": " + e.what(), e.offset);
  }
}

// Build a SystemSpec from string matrices; `extra_symbols` are identifiers the
// env_provider will bind at evaluation time (builtins only).
SystemSpec make_system(std::string name, std::size_t p, std::size_t q, std::size_t m,
                       std::vector<std::string> vars,
                       const std::vector<std::vector<std::vector<std::string>>>& A,
                       const std::vector<std::string>& b,
                       const std::set<std::string>& extra_symbols = {}) {
  SystemSpec sys;
  sys.name = std::move(name);
  sys.p = p;
  sys.q = q;
  sys.m = m;
  sys.vars = std::move(vars);
  std::set<std::string> allowed = name_set(sys.vars);
  allowed.insert(extra_symbols.begin(), extra_symbols.end());
  sys.A.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    sys.A[k].reserve(m * q);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < q; ++c)
        sys.A[k].push_back(parse_entry(A[k][r][c], allowed,
                                       "A[" + std::to_string(k) + "][" + std::to_string(r) + "][" +
                                           std::to_string(c) + "]"));
  }
  sys.b.reserve(m);
  for (std::size_t r = 0; r < m; ++r)
    sys.b.push_back(parse_entry(b[r], allowed, "b[" + std::to_string(r) + "]"));
  sys.eq_names.resize(m);
  for (std::size_t r = 0; r < m; ++r) sys.eq_names[r] = "eq" + std::to_string(r + 1);
  sys.eq_tol_scale.assign(m, 1.0);
  return sys;
}

SystemSpec builtin_plasticity_full(const BuiltinOptions& opts) {
  const std::string c2t = "cos(2*theta)", s2t = "sin(2*theta)";
  std::vector<std::vector<std::vector<std::string>>> A = {
      // time slice
      {{"0", "0", "-rho", "0"},
       {"0", "0", "0", "-rho"},
       {"0", "0", "0", "0"},
       {"0", "0", "0", "0"},
       {"0", "0", "0", "0"}},
      // x slice
      {{"1", "-" + c2t, "-rho*u", "0"},
       {"0", "-" + s2t, "0", "-rho*u"},
       {"0", "0", c2t, s2t},
       {"0", "0", "1", "0"},
       {"0", "0", "0", "-1"}},
      // y slice
      {{"0", "-" + s2t, "-rho*v", "0"},
       {"1", c2t, "0", "-rho*v"},
       {"0", "0", s2t, "-" + c2t},
       {"0", "0", "0", "1"},
       {"0", "0", "1", "0"}}};
  std::vector<std::string> b = {"-rho*Vx", "-rho*Vy", "0", "0", "0"};
  SystemSpec sys = make_system("plasticity-full", 3, 4, 5, {"sigma", "theta", "u", "v"}, A, b,
                               {"rho", "Vx", "Vy"});
  sys.eq_names = {"momentum-x", "momentum-y", "shear-alignment", "incompressibility",
                  "irrotationality"};
  // The pressure equations sit on top of a quadrature, so their grid residual
  // carries an order-of-magnitude allowance relative to the base tolerance.
  sys.eq_tol_scale = {10.0, 10.0, 1.0, 1.0, 1.0};

  const double rho = opts.rho;
  if (!(rho > 0.0)) throw input_error("plasticity-full: density must be positive");
  Expression V = parse_entry(opts.V, {"t", "x", "y"}, "V");
  Expression Vx, Vy;
  try {
    Vx = differentiate(V, "x");
    Vy = differentiate(V, "y");
  } catch (const eval_error& e) {
    throw input_error(std::string("plasticity-full: potential V must be differentiable: ") +
                      e.what());
  }
  sys.env_provider = [rho, Vx, Vy](double t, double x, double y) {
    Expression::Env pos{{"t", t}, {"x", x}, {"y", y}};
    Expression::Env out;
    out["rho"] = rho;
    out["Vx"] = Vx.eval(pos);
    out["Vy"] = Vy.eval(pos);
    return out;
  };
  return sys;
}

SystemSpec builtin_plasticity_reduced() {
  const std::string c2t = "cos(2*theta)", s2t = "sin(2*theta)";
  std::vector<std::vector<std::vector<std::string>>> A = {
      // x slice
      {{"0", c2t, s2t}, {"0", "1", "0"}, {"0", "0", "-1"}},
      // y slice
      {{"0", s2t, "-" + c2t}, {"0", "0", "1"}, {"0", "1", "0"}}};
  std::vector<std::string> b = {"0", "0", "0"};
  SystemSpec sys = make_system("plasticity-reduced", 2, 3, 3, {"theta", "u", "v"}, A, b);
  sys.eq_names = {"shear-alignment", "incompressibility", "irrotationality"};
  return sys;
}

SystemSpec builtin_plasticity_subsystem() {
  std::vector<std::vector<std::vector<std::string>>> A = {
      // x slice
      {{"0", "-1", "0", "0"}, {"0", "0", "1", "0"}, {"0", "0", "0", "-1"}},
      // y slice
      {{"1", "0", "0", "0"}, {"0", "0", "0", "1"}, {"0", "0", "1", "0"}}};
  std::vector<std::string> b = {"0", "0", "0"};
  SystemSpec sys =
      make_system("plasticity-subsystem", 2, 4, 3, {"phi", "psi", "u", "v"}, A, b);
  sys.eq_names = {"mixed-derivative", "incompressibility", "irrotationality"};
  return sys;
}

SystemSpec builtin_wave_particle(const BuiltinOptions& opts) {
  std::vector<std::vector<std::vector<std::string>>> A = {
      {{"1", "0"}, {"0", "-1"}},  // x slice
      {{"0", "1"}, {"1", "0"}}};  // y slice
  std::vector<std::string> b = {"sqrt(2)*a*exp(u/2)*sin(phi/2)",
                                "-sqrt(2)*a*exp(u/2)*cos(phi/2)"};
  SystemSpec sys = make_system("wave-particle", 2, 2, 2, {"u", "phi"}, A, b, {"a"});
  sys.eq_names = {"shock-balance-x", "shock-balance-y"};
  const double a = opts.a;
  sys.env_provider = [a](double, double, double) {
    return Expression::Env{{"a", a}};
  };
  return sys;
}

}  // namespace

SystemSpec parse_system_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw input_error("system config must be a JSON object");
  static const std::set<std::string> known = {"p", "q", "m", "vars", "A", "b", "name"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw input_error("system config: unknown key '" + it.key() + "'");
  for (const char* key : {"p", "q", "m", "vars", "A", "b"})
    if (!doc.contains(key)) throw input_error(std::string("system config: missing key '") + key + "'");

  auto usize = [&](const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
      throw input_error(std::string("system config: '") + key + "' must be a positive integer");
    return v.get<std::size_t>();
  };
  const std::size_t p = usize("p"), q = usize("q"), m = usize("m");

  const auto& jvars = doc.at("vars");
  if (!jvars.is_array() || jvars.size() != q)
    throw input_error("system config: 'vars' must list exactly q names");
  std::vector<std::string> vars;
  for (const auto& v : jvars) {
    if (!v.is_string()) throw input_error("system config: variable names must be strings");
    vars.push_back(v.get<std::string>());
    validate_identifier(vars.back());
  }
  if (name_set(vars).size() != vars.size())
    throw input_error("system config: duplicate variable name");

  const auto& jA = doc.at("A");
  if (!jA.is_array() || jA.size() != p)
    throw input_error("system config: 'A' must hold exactly p matrices");
  std::vector<std::vector<std::vector<std::string>>> A(p);
  for (std::size_t k = 0; k < p; ++k) {
    const auto& jm = jA.at(k);
    if (!jm.is_array() || jm.size() != m)
      throw input_error("system config: A[" + std::to_string(k) + "] has " +
                        std::to_string(jm.is_array() ? jm.size() : 0) + " rows, expected " +
                        std::to_string(m));
    A[k].resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      const auto& jr = jm.at(r);
      if (!jr.is_array() || jr.size() != q)
        throw input_error("system config: A[" + std::to_string(k) + "] row " + std::to_string(r) +
                          " has " + std::to_string(jr.is_array() ? jr.size() : 0) +
                          " entries, expected " + std::to_string(q));
      for (const auto& e : jr) {
        if (!e.is_string())
          throw input_error("system config: matrix entries must be expression strings");
        A[k][r].push_back(e.get<std::string>());
      }
    }
  }

  const auto& jb = doc.at("b");
  if (!jb.is_array() || jb.size() != m)
    throw input_error("system config: 'b' must list exactly m entries");
  std::vector<std::string> b;
  for (const auto& e : jb) {
    if (!e.is_string()) throw input_error("system config: 'b' entries must be expression strings");
    b.push_back(e.get<std::string>());
  }

  std::string name = doc.value("name", std::string("unnamed"));
  return make_system(std::move(name), p, q, m, std::move(vars), A, b);
}

SystemSpec parse_system_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw syntax_error(std::string("system config: ") + e.what(),
                       e.byte > 0 ? e.byte - 1 : 0);
  }
  return parse_system_config(doc);
}

std::pair<std::vector<ComplexMatrix>, std::vector<cplx>> eval_system(
    const SystemSpec& sys, const std::vector<cplx>& u, const Expression::Env& extra) {
  if (u.size() != sys.q)
    throw input_error("eval_system: state has " + std::to_string(u.size()) +
                      " components, expected " + std::to_string(sys.q));
  Expression::Env env = extra;
  for (std::size_t k = 0; k < sys.q; ++k) env[sys.vars[k]] = u[k];

  std::vector<ComplexMatrix> As;
  As.reserve(sys.p);
  for (std::size_t k = 0; k < sys.p; ++k) {
    ComplexMatrix M(sys.m, sys.q);
    for (std::size_t r = 0; r < sys.m; ++r)
      for (std::size_t c = 0; c < sys.q; ++c) M(r, c) = sys.A[k][r * sys.q + c].eval(env);
    As.push_back(std::move(M));
  }
  std::vector<cplx> b(sys.m);
  for (std::size_t r = 0; r < sys.m; ++r) b[r] = sys.b[r].eval(env);
  return {std::move(As), std::move(b)};
}

SystemSpec builtin_system(const std::string& name, const BuiltinOptions& opts) {
  if (name == "plasticity-full") return builtin_plasticity_full(opts);
  if (name == "plasticity-reduced") return builtin_plasticity_reduced();
  if (name == "plasticity-subsystem") return builtin_plasticity_subsystem();
  if (name == "wave-particle") return builtin_wave_particle(opts);
  throw input_error("unknown builtin system '" + name +
                    "'; available: plasticity-full, plasticity-reduced, "
                    "plasticity-subsystem, wave-particle");
}

}  // namespace riemann
