#pragma once

#include <stdexcept>
#include <string>

namespace qpb {

// Raised when a computation cannot produce a meaningful number
// (degenerate derivative, divergent iteration, overflow).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpb
