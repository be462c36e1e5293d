#pragma once

#include <stdexcept>

namespace wpca {

/// Raised when a root bracket cannot be established; the configuration is malformed.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an observed amplitude lies at or below the noise bulk, where no
/// invertible amplitude branch exists.
class BelowTransitionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace wpca
