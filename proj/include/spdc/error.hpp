#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spdc {

/// Failure classes. Each maps to a distinct CLI exit code and a stable
/// machine-readable name.
enum class ErrorKind {
  domain = 1,
  phase_matching,
  evanescent,
  accuracy,
  degenerate_input,
  data,
  contract,
  not_measurable,
  geometry,
  format,
  unsupported_dtype,
  resource,
  io,
  usage,
  config,
};

constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::phase_matching: return "phase_matching";
    case ErrorKind::evanescent: return "evanescent";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::degenerate_input: return "degenerate_input";
    case ErrorKind::data: return "data";
    case ErrorKind::contract: return "contract";
    case ErrorKind::not_measurable: return "not_measurable";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::format: return "format";
    case ErrorKind::unsupported_dtype: return "unsupported_dtype";
    case ErrorKind::resource: return "resource";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Quadrature did not reach the requested tolerance; carries the last estimate's
/// relative change.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(ErrorKind::accuracy, what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Malformed stack file. `offset` is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(ErrorKind kind, const std::string& what, std::size_t offset)
      : Error(kind, what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace spdc
