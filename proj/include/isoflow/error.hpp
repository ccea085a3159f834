#pragma once

#include <stdexcept>
#include <string>

namespace isoflow {

enum class ErrorKind {
  NotHessenberg,
  ResourceLimit,
  NotHermitian,
  ShapeMismatch,
  NonzeroDiagonal,
  NoConvergence,
  DegenerateSpectrum,
  SingularInput,
  StepUnderflow,
  DriftExceeded,
  NotConverged,
  Decomposable,
  SourceConstraintViolation,
  NotUnitary,
  NotInZh,
  BadInput,
};

const char* to_string(ErrorKind kind);

// Every failure in the library surfaces as an Error carrying its kind, so
// front ends can map kinds to exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace isoflow
