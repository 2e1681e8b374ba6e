#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace halbach {

enum class ErrorKind {
  PointInsideOrOnMagnet,
  DegenerateGeometry,
  QuadratureNonConvergence,
  OverlappingMagnets,
  InvalidParams,
  NoNullFound,
  NoFeasiblePoint,
  ConfigParse,
  FileIO,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::PointInsideOrOnMagnet: return "PointInsideOrOnMagnet";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::OverlappingMagnets: return "OverlappingMagnets";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NoNullFound: return "NoNullFound";
    case ErrorKind::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::FileIO: return "FileIO";
  }
  return "Unknown";
}

/// Single exception type for the library; the kind is the machine-readable
/// category surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Evaluation point rejected by a magnet. `index` is the offending magnet
/// (or sample, when rethrown by the sampling layer).
class PointInsideError : public Error {
 public:
  PointInsideError(std::size_t index, const std::string& what)
      : Error(ErrorKind::PointInsideOrOnMagnet, what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace halbach
