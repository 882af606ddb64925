#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drm {

enum class ErrorKind {
  // algebra axioms
  AntisymmetryViolation,
  JacobiViolation,
  InvarianceViolation,
  DegenerateForm,
  // subspaces and chains
  DegenerateRestriction,
  NotSubalgebra,
  ComplementNotInvariant,
  // functional calculus and domains
  PoleProximity,
  InadmissibleSpectrum,
  IllConditioned,
  SingularC,
  SingularAd,
  OnWall,
  NoAdmissibleSamples,
  // twisted gradings
  NotAutomorphism,
  NotIsometry,
  WrongOrder,
  NoFixedPoints,
  GradeMismatch,
  BadGrade,
  BadTau,
  // configuration and IO
  UnknownName,
  BadParams,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by user configuration or files rather than by
/// mathematics (these map to CLI exit code 3).
bool is_config_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace drm
