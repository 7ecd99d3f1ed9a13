#pragma once

#include <stdexcept>
#include <string>

namespace sentinel {

/// Bad user input: malformed config, invalid observation rows, out-of-range
/// options. CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem trouble: unreadable or unwritable paths. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sentinel
