#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strata {

enum class ErrorKind {
  kFileNotFound,
  kColumnMissing,
  kValue,
  kEmptySelection,
  kEmptyInput,
  kOneClassOnly,
  kTooFewSamples,
  kDomain,
  kNonFiniteValue,
  kDegenerateBaseRate,
  kUnknownAttribute,
  kMetricUndefined,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  /// Configuration problems (bad flags, unknown metric ids) as opposed to
  /// problems with the data being evaluated.
  bool is_config_error() const noexcept {
    return kind_ == ErrorKind::kConfig || kind_ == ErrorKind::kUnknownAttribute;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace strata
