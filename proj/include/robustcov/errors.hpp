#pragma once

#include <stdexcept>
#include <string>

namespace robustcov {

// Base class for all library errors.  Inputs that violate a documented
// precondition throw one of the derived types below rather than being
// silently clamped or repaired.  name() identifies the concrete type so
// callers can report it without RTTI gymnastics.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* name() const { return "Error"; }
};

#define ROBUSTCOV_DEFINE_ERROR(NAME)                            \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& what) : Error(what) {}     \
    const char* name() const override { return #NAME; }         \
  }

ROBUSTCOV_DEFINE_ERROR(DimensionMismatch);
ROBUSTCOV_DEFINE_ERROR(DimensionTooLarge);
ROBUSTCOV_DEFINE_ERROR(ZeroMatrix);
ROBUSTCOV_DEFINE_ERROR(NotSymmetric);
ROBUSTCOV_DEFINE_ERROR(NotUnitVector);
ROBUSTCOV_DEFINE_ERROR(KTooLarge);
ROBUSTCOV_DEFINE_ERROR(NegativeInput);
ROBUSTCOV_DEFINE_ERROR(NonFiniteInput);
ROBUSTCOV_DEFINE_ERROR(NonpositiveThreshold);
ROBUSTCOV_DEFINE_ERROR(NonpositiveGamma);
ROBUSTCOV_DEFINE_ERROR(TTooSmall);
ROBUSTCOV_DEFINE_ERROR(EmptySample);
ROBUSTCOV_DEFINE_ERROR(SizeMismatch);
ROBUSTCOV_DEFINE_ERROR(PTooSmall);
ROBUSTCOV_DEFINE_ERROR(QOutOfRange);
ROBUSTCOV_DEFINE_ERROR(HypothesisViolated);
ROBUSTCOV_DEFINE_ERROR(MomentDiverges);
ROBUSTCOV_DEFINE_ERROR(InvalidSpec);
ROBUSTCOV_DEFINE_ERROR(EtaTooLarge);
ROBUSTCOV_DEFINE_ERROR(DegeneratePilot);

#undef ROBUSTCOV_DEFINE_ERROR

}  // namespace robustcov
