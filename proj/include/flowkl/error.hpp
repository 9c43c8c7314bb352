#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flowkl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shapes, grids or truncations of two operands do not agree.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A scalar argument is outside its admissible range (J too large, m < 1, ...).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// A kernel has an eigenvalue below the negative tolerance.
class NotPsdError : public Error {
  public:
    using Error::Error;
};

/// Gram-Schmidt met a pivot below the rank threshold.
class RankDeficiencyError : public Error {
  public:
    using Error::Error;
};

/// Malformed binary file. `offset` is the byte offset of the first violation.
class FormatError : public Error {
  public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

  private:
    std::uint64_t offset_;
};

} // namespace flowkl
