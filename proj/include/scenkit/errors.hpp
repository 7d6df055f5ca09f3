#ifndef SCENKIT_ERRORS_HPP_
#define SCENKIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace scenkit
{

// Bad inputs: malformed files, parameter sets violating their invariants,
// out-of-range arguments. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error
{
public:
  explicit ValidationError(const std::string & what) : std::runtime_error(what) {}
};

// Filesystem failures: missing paths, unreadable/unwritable files.
// Maps to CLI exit code 3.
class IoError : public std::runtime_error
{
public:
  explicit IoError(const std::string & what) : std::runtime_error(what) {}
};

}  // namespace scenkit

#endif  // SCENKIT_ERRORS_HPP_
