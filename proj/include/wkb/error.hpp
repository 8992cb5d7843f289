#pragma once

#include <stdexcept>
#include <string>

namespace wkb {

// Invalid or inconsistent configuration; names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A numerical guard tripped: non-finite samples, a CFL violation or a failed
// self-convergence check.
class NumericalGuardError : public std::runtime_error {
 public:
  NumericalGuardError(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace wkb
