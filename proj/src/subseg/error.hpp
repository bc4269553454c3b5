#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subseg {

enum class ErrorCode {
  io = 1,
  decode,
  alignment,
  config,
  range,
  format,
  vocabulary,
  dimension,
  numeric,
  invalid_argument,
};

// Stable lower-case name used in CLI diagnostics ("code=<name> msg=...").
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), _code(code) {}

  ErrorCode code() const noexcept { return _code; }

private:
  ErrorCode _code;
};

}  // namespace subseg
