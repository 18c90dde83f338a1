#pragma once

#include <stdexcept>
#include <string>

namespace ctm2 {

enum class ErrorCode {
  Parse,       // malformed input document
  Validation,  // semantic invariant violated
  NotFound,    // unknown domain, criterion, catalog, or assessment id
  Binding,     // assessment bound to a different model id/version
  InvalidArgument,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::Validation: return "validation_error";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Binding: return "binding_mismatch";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io_error";
  }
  return "error";
}

}  // namespace ctm2
