#pragma once

#include <stdexcept>
#include <string>

namespace mc {

// Base for every failure the library reports. Verification outcomes that are
// merely negative (a cone check that does not pass) are values, not errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MC_DECLARE_ERROR(Name)                               \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what) : Error(what) {}  \
  };

MC_DECLARE_ERROR(DivisionByZeroInterval)
MC_DECLARE_ERROR(DomainError)
MC_DECLARE_ERROR(SingularEnclosure)
MC_DECLARE_ERROR(EnclosureFailure)
MC_DECLARE_ERROR(TransversalityFailure)
MC_DECLARE_ERROR(LostCrossing)
MC_DECLARE_ERROR(CollisionSingularity)
MC_DECLARE_ERROR(RateOrderViolation)
MC_DECLARE_ERROR(UnverifiedCones)
MC_DECLARE_ERROR(ResolutionError)
MC_DECLARE_ERROR(ConfigError)
MC_DECLARE_ERROR(Inconclusive)

#undef MC_DECLARE_ERROR

}  // namespace mc
