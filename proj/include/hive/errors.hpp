#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hive {

enum class ErrorCode {
  NegativeWeight,
  AllZero,
  NonFinite,
  InvalidScale,
  ZeroSupport,
  PeriodicSupport,
  TableTooShort,
  BadOrder,
  NegativeVarianceComputed,
  NonDegenerateTau,
  InversionResidual,
  InvalidRate,
  DayBeforeStationarity,
  NotPoissonModel,
  MissingThreshold,
  NoSwarmEvents,
  InvalidArgument,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::ZeroSupport: return "ZeroSupport";
    case ErrorCode::PeriodicSupport: return "PeriodicSupport";
    case ErrorCode::TableTooShort: return "TableTooShort";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::NegativeVarianceComputed: return "NegativeVarianceComputed";
    case ErrorCode::NonDegenerateTau: return "NonDegenerateTau";
    case ErrorCode::InversionResidual: return "InversionResidual";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::DayBeforeStationarity: return "DayBeforeStationarity";
    case ErrorCode::NotPoissonModel: return "NotPoissonModel";
    case ErrorCode::MissingThreshold: return "MissingThreshold";
    case ErrorCode::NoSwarmEvents: return "NoSwarmEvents";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code name so it survives being printed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hive
