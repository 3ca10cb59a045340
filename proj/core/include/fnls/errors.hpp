#pragma once

#include <stdexcept>
#include <string>

namespace fnls {

/// Vector or operator sizes that do not agree with the grid.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar parameter outside its admissible range (even N, s <= 0, alpha outside (1, 2], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require_size(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) + " does not match " +
                         std::to_string(expected));
  }
}

}  // namespace detail
}  // namespace fnls
