// Exception types. Every error carries a short machine-readable kind
// that the CLI prints on stderr next to the message.
#pragma once

#include <stdexcept>
#include <string>

namespace nskv {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error("precondition", w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config", w) {}
};
struct IntegrityError : Error {
  explicit IntegrityError(const std::string& w) : Error("integrity", w) {}
};
struct UnsupportedVersionError : Error {
  explicit UnsupportedVersionError(const std::string& w) : Error("unsupported-version", w) {}
};
struct NoConvergenceError : Error {
  explicit NoConvergenceError(const std::string& w) : Error("no-convergence", w) {}
};
struct BudgetError : Error {
  explicit BudgetError(const std::string& w) : Error("budget", w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error("io", w) {}
};

}  // namespace nskv
