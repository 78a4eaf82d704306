#pragma once

#include <stdexcept>
#include <string>

namespace elg {

// An iterative routine ran out of its iteration/term budget before meeting its
// stopping rule.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix that must be inverted (observed information at a terminal fit point)
// is numerically singular.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace elg
