#pragma once

#include <stdexcept>
#include <string>

namespace pascs {

// Error taxonomy shared by the library and the CLI exit codes
// (0 success, 2 usage, 3 degenerate state, 4 verification failure,
//  5 convergence failure).

// An order/index exceeded a configured bound (n_max, max_order, cutoff guard).
class bounds_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Invalid argument (odd quadrature order, bad sweep axis, ...).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Photon subtraction annihilated the state (a^m |psi> = 0); downstream
// quantities are undefined there.
class degenerate_state_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A witness is mathematically undefined for this state (zero mean photon
// number, vanishing determinant denominator, ...).
class undefined_witness_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative scheme (matrix exponential, adaptive quadrature) failed to
// reach its target within the configured budget.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed form disagrees with the independent oracle beyond tolerance for
// every candidate convention; carries diagnostics in the message.
class erratum_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pascs
