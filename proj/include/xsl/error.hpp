#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xsl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed interchange, lexicon, snapshot, or config text.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Invalid configuration: bad parameter values, unknown names, impossible
/// generator requests.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Failure while running on otherwise valid configuration (I/O, data
/// shortfall, inconsistent inputs).
class RuntimeError : public Error {
public:
  using Error::Error;
};

/// A file could not be opened, read, or written.
class IoError : public RuntimeError {
public:
  using RuntimeError::RuntimeError;
};

} // namespace xsl
