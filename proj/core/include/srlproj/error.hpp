#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srlproj {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external input. `line` is 1-based; 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Bad parameters or preconditions supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace srlproj
