#pragma once

#include <stdexcept>
#include <string>

namespace fgscan {

/// Failure category; the CLI maps each one to an exit code.
enum class ErrorKind {
  io,     // missing or unreadable files
  usage,  // invalid arguments or options
  data,   // malformed or invalid input records
  model,  // numerical or model failure (overflow, no primary events, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fgscan
