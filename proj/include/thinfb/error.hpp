#pragma once

#include <stdexcept>
#include <string>

namespace thinfb {

/// Failure categories. The CLI maps them onto exit codes.
enum class ErrorKind {
  domain,          // point or ball outside the cube
  resolution,      // radius below the 8h resolution floor
  ellipticity,     // coefficient matrix not symmetric positive definite
  precondition,    // any other violated precondition
  nonconvergence,  // iterative solver ran out of iterations
  degenerate,      // vanishing normalizer, empty free boundary, ...
  io,
  usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::ellipticity: return "ellipticity";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// 0 ok, 1 numerical failure, 2 usage, 3 resolution/precondition.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return 2;
    case ErrorKind::domain:
    case ErrorKind::resolution:
    case ErrorKind::ellipticity:
    case ErrorKind::precondition: return 3;
    default: return 1;
  }
}

}  // namespace thinfb
