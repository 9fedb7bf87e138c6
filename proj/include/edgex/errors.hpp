#pragma once

#include <stdexcept>
#include <string>

namespace edgex {

inline constexpr const char* kVersion = "0.1.0";

// Invalid model/operation parameters (gamma <= 1, CRP regime violations, ...).
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally valid inputs that describe an empty or unusable object
// (zero total mass, truncation retaining no weight, ...).
struct degenerate_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Requested size does not fit the machine representation.
struct capacity_error : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Odd half-edge total in the configuration model.
struct parity_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed experiment config; message carries the field path.
struct schema_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace edgex
