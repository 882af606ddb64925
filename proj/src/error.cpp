#include "drm/error.hpp"

namespace drm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AntisymmetryViolation: return "AntisymmetryViolation";
    case ErrorKind::JacobiViolation: return "JacobiViolation";
    case ErrorKind::InvarianceViolation: return "InvarianceViolation";
    case ErrorKind::DegenerateForm: return "DegenerateForm";
    case ErrorKind::DegenerateRestriction: return "DegenerateRestriction";
    case ErrorKind::NotSubalgebra: return "NotSubalgebra";
    case ErrorKind::ComplementNotInvariant: return "ComplementNotInvariant";
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::InadmissibleSpectrum: return "InadmissibleSpectrum";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SingularC: return "SingularC";
    case ErrorKind::SingularAd: return "SingularAd";
    case ErrorKind::OnWall: return "OnWall";
    case ErrorKind::NoAdmissibleSamples: return "NoAdmissibleSamples";
    case ErrorKind::NotAutomorphism: return "NotAutomorphism";
    case ErrorKind::NotIsometry: return "NotIsometry";
    case ErrorKind::WrongOrder: return "WrongOrder";
    case ErrorKind::NoFixedPoints: return "NoFixedPoints";
    case ErrorKind::GradeMismatch: return "GradeMismatch";
    case ErrorKind::BadGrade: return "BadGrade";
    case ErrorKind::BadTau: return "BadTau";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool is_config_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownName:
    case ErrorKind::BadParams:
    case ErrorKind::Parse:
    case ErrorKind::Io:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

}  // namespace drm
