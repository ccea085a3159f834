#include "isoflow/error.hpp"

namespace isoflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHessenberg: return "NotHessenberg";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::DriftExceeded: return "DriftExceeded";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::Decomposable: return "Decomposable";
    case ErrorKind::SourceConstraintViolation: return "SourceConstraintViolation";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotInZh: return "NotInZh";
    case ErrorKind::BadInput: return "BadInput";
  }
  return "Unknown";
}

}  // namespace isoflow
