#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppgcoop {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line = 0)
    : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
      line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class LinkBusyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class RouteError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ppgcoop
