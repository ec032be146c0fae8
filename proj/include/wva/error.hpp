#ifndef WVA_ERROR_HPP
#define WVA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wva {

/// Invalid physical or numerical input to a library operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The selector states are (numerically) orthogonal, so A_w = <f|A|i>/<f|i> blows up.
class DivergentWeakValue : public DomainError {
public:
  using DomainError::DomainError;
};

/// The sampling window cannot hold the pulse support.
class WindowTooSmall : public DomainError {
public:
  using DomainError::DomainError;
};

/// No (alpha, beta) in the search box meets the relative-error budget.
class InfeasibleBudget : public DomainError {
public:
  using DomainError::DomainError;
};

/// A least-squares fit without spread in the abscissa.
class DegenerateSweep : public DomainError {
public:
  using DomainError::DomainError;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace wva

#endif  // WVA_ERROR_HPP
