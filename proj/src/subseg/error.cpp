#include "subseg/error.hpp"

namespace subseg {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::decode: return "decode";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::config: return "config";
    case ErrorCode::range: return "range";
    case ErrorCode::format: return "format";
    case ErrorCode::vocabulary: return "vocabulary";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace subseg
