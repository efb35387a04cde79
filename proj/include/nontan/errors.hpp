#pragma once

#include <stdexcept>
#include <string>

namespace nontan {

// Input or precondition violation. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical method declined to run: panel budget exceeded, stationary
// point inside an annulus, radius outside double range. CLI exit code 3.
class NumericalRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nontan
