#pragma once

#include <stdexcept>
#include <string>

namespace sprt {

// Table cell whose unconditional probability is zero; a log-ratio there is 0/0.
struct undefined_cell : std::domain_error {
  explicit undefined_cell(const std::string& what) : std::domain_error(what) {}
};

// Propagation produced a mass-conservation residual above tolerance.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested run would exceed the configured memory budget.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// File read/write or schema failure.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sprt
