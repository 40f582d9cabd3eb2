#pragma once

#include <stdexcept>
#include <string>

namespace wedgecp {

// Bad parameters or preconditions supplied by the caller.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A query or construction reached outside the realized space-time window.
struct OutOfWindow : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Parameters produce a vertical or otherwise degenerate line.
struct DegenerateGeometry : std::domain_error {
  using std::domain_error::domain_error;
};

// A check that should hold by construction did not.
struct InternalConsistency : std::logic_error {
  using std::logic_error::logic_error;
};

struct SearchExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too many replicas touched the window boundary for the estimate to be used.
struct WindowTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wedgecp
