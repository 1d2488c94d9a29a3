#ifndef LINKSIM_ERRORS_HPP_
#define LINKSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace linksim {

// Bad configuration or rejected input. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Spectral selection too small to identify the requested number of paths.
class IdentifiabilityError : public std::runtime_error {
 public:
  explicit IdentifiabilityError(const std::string& what) : std::runtime_error(what) {}
};

// All-zero channel: combining gain vanishes, detection undefined.
class DegenerateChannelError : public std::runtime_error {
 public:
  explicit DegenerateChannelError(const std::string& what) : std::runtime_error(what) {}
};

// Coincident delays collapse the steering basis rank.
class DegenerateDelaysError : public std::runtime_error {
 public:
  explicit DegenerateDelaysError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace linksim

#endif  // LINKSIM_ERRORS_HPP_
