#pragma once

#include <stdexcept>
#include <string>

namespace scpa {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent data: bad class IDs, shape mismatches,
/// malformed manifests, failed validation.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

/// Filesystem and codec failures: unreadable files, PNG errors.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace scpa
