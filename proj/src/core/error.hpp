#ifndef RULEDIST_CORE_ERROR_HPP
#define RULEDIST_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ruledist {

enum class ErrorKind {
  InvalidArgument,  // bad parameter passed to an operation
  Config,           // invalid configuration value (tau, gamma, ...)
  Schema,           // data does not conform to a feature schema
  Parse,            // malformed file content
  Io,               // file cannot be read or written
  EmptyDataset,     // operation requires at least one instance
  State,            // operation called in an invalid state (e.g. stepping a finished episode)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind);

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace ruledist

#endif
