#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orbit_kahler {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  NotHermitian,
  NotDensity,
  DegenerateGap,
  NotUnitary,
  DimMismatch,
  BaseMismatch,
  NotOffDiagonal,
  NonRealResult,
  NegativeVariance,
  DegenerateDrift,
  InvalidArgument,
  ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotDensity: return "NotDensity";
    case ErrorKind::DegenerateGap: return "DegenerateGap";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::NotOffDiagonal: return "NotOffDiagonal";
    case ErrorKind::NonRealResult: return "NonRealResult";
    case ErrorKind::NegativeVariance: return "NegativeVariance";
    case ErrorKind::DegenerateDrift: return "DegenerateDrift";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Physical constant and numerical tolerances shared by every operation.
///
/// `tau_h`   hermiticity / block-structure tolerance (absolute, scaled by max(1, |M|max))
/// `tau_c`   eigenvalue clustering gap; gaps in (tau_c, 2 tau_c] are rejected as ambiguous
/// `tau_tr`  positivity and unit-trace tolerance for density operators
/// `tau_u`   unitarity tolerance
/// `tau_check` residual tolerance for derived identities (reality of traces, bounds)
/// `fd_step` central-difference step along unitary flows
struct Config {
  double hbar = 1.0;
  double tau_h = 1e-10;
  double tau_c = 1e-9;
  double tau_tr = 1e-9;
  double tau_u = 1e-10;
  double tau_check = 1e-9;
  double fd_step = 1e-4;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be > 0");
    };
    positive(hbar, "hbar");
    positive(tau_h, "tau_h");
    positive(tau_c, "tau_c");
    positive(tau_tr, "tau_tr");
    positive(tau_u, "tau_u");
    positive(tau_check, "tau_check");
    positive(fd_step, "fd_step");
  }
};

}  // namespace orbit_kahler
