#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace riemann {

// Input outside a documented envelope or precondition (bad matrix shape, |z| past
// the accuracy envelope, unknown builtin name, ...).
class input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (log of a nonpositive
// quantity, branch-point hit, ...).
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iteration failed to converge; carries the last iterate so callers can retry
// with a better guess.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, std::complex<double> last_iterate)
      : std::runtime_error(msg), last(last_iterate) {}
  std::complex<double> last;
};

// Malformed expression / config text; offset is the 0-based byte position.
class syntax_error : public std::runtime_error {
 public:
  syntax_error(const std::string& msg, std::size_t at)
      : std::runtime_error(msg + " (offset " + std::to_string(at) + ")"), offset(at) {}
  std::size_t offset;
};

// Runtime evaluation failure (division by zero, unbound variable, non-finite result).
class eval_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation requested at / across a singular locus of a closed form.
class singularity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally degenerate problem (all minors vanish identically, rank-deficient input).
class degenerate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Streamline seeded at (or integrated into) a stagnation point.
class stagnation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace riemann
