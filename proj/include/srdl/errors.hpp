#pragma once

#include <stdexcept>
#include <string>

namespace srdl {

// Bad inputs: files, headers, out-of-range parameters. CLI maps this to exit 2.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: eigensolver non-convergence, degenerate data,
// disconnected graphs. CLI maps this to exit 3.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace srdl
