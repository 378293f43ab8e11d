#pragma once

#include <stdexcept>

namespace eic {

// Rejected user-facing input: parameter values, config files, pmf tables.
struct param_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally valid input outside the validity range of a formula or
// scheme (degenerate channels, out-of-condition operating points).
struct scope_error : std::domain_error {
  using std::domain_error::domain_error;
};

// A documented precondition was broken; a bug in the calling code.
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace eic
