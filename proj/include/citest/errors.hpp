#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace citest {

/// Caller passed data or configuration that violates a precondition.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Binary response is all zeros or all ones; the probit likelihood has no
/// interior maximizer.
class degenerate_response : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative fit stopped at max_iter without meeting the tolerance.
/// Carries the last iterate for diagnostics.
class nonconvergence : public std::runtime_error {
 public:
  nonconvergence(const std::string& what, std::vector<double> iterate)
      : std::runtime_error(what), last_iterate(std::move(iterate)) {}

  std::vector<double> last_iterate;
};

}  // namespace citest
