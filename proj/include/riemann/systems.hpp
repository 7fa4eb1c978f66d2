#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riemann/algebra.hpp"
#include "riemann/expression.hpp"

namespace riemann {

// First-order quasilinear system  A^i(u) du/dx^i = b(u)  with p independent
// variables, q unknowns and m equations. Independent-variable convention:
// p = 2 -> (x, y); p = 3 -> (t, x, y).
struct SystemSpec {
  std::size_t p = 0, q = 0, m = 0;
  std::vector<std::string> vars;              // q unknown names
  std::vector<std::vector<Expression>> A;     // p matrices, each m*q row-major
  std::vector<Expression> b;                  // m source entries
  std::string name;

  std::vector<std::string> eq_names;          // m labels (defaults eq1..eqm)
  // Per-equation residual-tolerance scale for grid verification (defaults 1).
  // The stress equations of the full plasticity system carry 10 (nested
  // quadrature under differencing), per the verification contract.
  std::vector<double> eq_tol_scale;

  // Extra evaluation bindings that depend on position, e.g. the potential
  // derivatives Vx, Vy of the full plasticity system or the coupling constant
  // of the wave-particle system. May be null.
  std::function<Expression::Env(double t, double x, double y)> env_provider;
};

// Parse the JSON document form:
// { "p": int, "q": int, "m": int, "vars": [string],
//   "A": [ p matrices, each m x q, entries are expression strings ],
//   "b": [ m expression strings ], "name": string }.
// Shape mismatches are rejected naming the offending matrix index.
SystemSpec parse_system_config(const nlohmann::json& doc);
SystemSpec parse_system_config_text(const std::string& text);

// Numeric A^i(u), b(u). `extra` supplies bindings beyond the unknowns
// (position, parameters); entries still unbound raise eval_error naming them.
std::pair<std::vector<ComplexMatrix>, std::vector<cplx>> eval_system(
    const SystemSpec& sys, const std::vector<cplx>& u, const Expression::Env& extra = {});

struct BuiltinOptions {
  std::string V = "0";  // plasticity-full: work-function potential V(t,x,y)
  double rho = 1.0;     // plasticity-full: density
  double a = 1.0;       // wave-particle: coupling constant
};

// Builtin registry: plasticity-full, plasticity-reduced, plasticity-subsystem,
// wave-particle. Unknown names raise input_error listing the available ones.
SystemSpec builtin_system(const std::string& name, const BuiltinOptions& opts = {});

}  // namespace riemann
