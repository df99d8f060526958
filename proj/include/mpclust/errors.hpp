#pragma once

#include <stdexcept>
#include <string>

namespace mpclust {

/// Bad input data: malformed files, constant columns, dimension mismatches.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation produced a non-finite value or otherwise broke down.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpclust
