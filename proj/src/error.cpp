#include "error.hpp"

namespace bqpca {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Shape: return "ShapeError";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Format: return "FormatError";
  }
  return "UnknownError";
}

}  // namespace bqpca
