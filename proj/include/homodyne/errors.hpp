#pragma once

#include <stdexcept>
#include <string>

namespace homodyne {

/// Raised when an input lies outside the domain of a formula (t <= 0, T >= T_c, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a formula is evaluated for a geometry it was not derived for.
class UnsupportedGeometry : public std::invalid_argument {
 public:
  explicit UnsupportedGeometry(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace homodyne
