#include "strata/error.hpp"

namespace strata {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kFileNotFound: return "FileNotFound";
    case ErrorKind::kColumnMissing: return "ColumnMissing";
    case ErrorKind::kValue: return "ValueError";
    case ErrorKind::kEmptySelection: return "EmptySelection";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kOneClassOnly: return "OneClassOnly";
    case ErrorKind::kTooFewSamples: return "TooFewSamples";
    case ErrorKind::kDomain: return "DomainError";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kDegenerateBaseRate: return "DegenerateBaseRate";
    case ErrorKind::kUnknownAttribute: return "UnknownAttribute";
    case ErrorKind::kMetricUndefined: return "MetricUndefined";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace strata
