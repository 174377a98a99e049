#pragma once

#include <stdexcept>
#include <string>

namespace crs {

/// Malformed or truncated file content (key files, concealed-data files,
/// PGM images).
class format_error : public std::runtime_error {
  public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid inputs that do not belong together, e.g. concealed
/// data whose level count differs from the key bundle's.
class mismatch_error : public std::runtime_error {
  public:
    explicit mismatch_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crs
