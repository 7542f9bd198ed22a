#pragma once

#include <stdexcept>
#include <string>

namespace qdce {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QDCE_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

QDCE_DEFINE_ERROR(NonPositiveCutoff);
QDCE_DEFINE_ERROR(DimensionMismatch);
QDCE_DEFINE_ERROR(NonHermitianObservable);
QDCE_DEFINE_ERROR(InvalidState);
QDCE_DEFINE_ERROR(VariantMismatch);
QDCE_DEFINE_ERROR(NormDriftExceeded);
QDCE_DEFINE_ERROR(TraceDriftExceeded);
QDCE_DEFINE_ERROR(PositivityViolation);
QDCE_DEFINE_ERROR(OrderOutOfRange);
QDCE_DEFINE_ERROR(EmptySeries);
QDCE_DEFINE_ERROR(ConfigInvalid);

#undef QDCE_DEFINE_ERROR

}  // namespace qdce
