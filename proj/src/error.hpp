#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace bqpca {

enum class ErrorCode {
  Shape = 1,
  InvalidParameter,
  DegenerateDirection,
  InvalidWeight,
  InvalidDataset,
  Io,
  Format,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure in the library surfaces as an Error carrying one code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Set for DegenerateDirection raised from fit(): 1-based direction index
  // at which the deflated sample space ran out.
  std::optional<std::size_t> direction_index;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace bqpca
