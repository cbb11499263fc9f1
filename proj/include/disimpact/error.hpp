#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace disimpact {

enum class ErrorCode {
  OutOfRange,
  FileNotFound,
  Io,
  MalformedInput,
  MalformedCsv,
  NegativeValue,
  UnknownPostId,
  BeforeAnchor,
  MisalignedRange,
  InvalidCounts,
  EmptyInput,
  OutOfDomain,
  EmptyTable,
  DegenerateExpected,
  LengthMismatch,
  EvenRaterCount,
  ConstantInput,
  MisalignedGrids,
  AllLagsUndefined,
  TransportError,
  MalformedResponse,
  InvalidConfig,
  UnknownColumn,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (and the CLI) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Transport-level failure talking to a classifier backend. `retryable` is
/// true for connection errors, timeouts, rate limits and 5xx responses.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable)
      : Error(ErrorCode::TransportError, what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

}  // namespace disimpact
