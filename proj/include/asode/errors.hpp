#pragma once

#include <stdexcept>
#include <string>

namespace asode {

// Base for every failure raised by the library. Each subclass names one
// failure condition so callers can react to it specifically.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ASODE_DEFINE_ERROR(Name)           \
    class Name : public Error {            \
    public:                                \
        using Error::Error;                \
    }

ASODE_DEFINE_ERROR(DegenerateParameter);
ASODE_DEFINE_ERROR(RootFindingFailure);
ASODE_DEFINE_ERROR(SingularMatrix);
ASODE_DEFINE_ERROR(DimensionMismatch);
ASODE_DEFINE_ERROR(UnknownProblem);
ASODE_DEFINE_ERROR(ZeroToleranceDenominator);
ASODE_DEFINE_ERROR(StepsizeUnderflow);
ASODE_DEFINE_ERROR(MaxRejectsExceeded);
ASODE_DEFINE_ERROR(NonFiniteState);
ASODE_DEFINE_ERROR(PoleProximity);
ASODE_DEFINE_ERROR(ReferenceUnavailable);
ASODE_DEFINE_ERROR(InvalidArgument);

#undef ASODE_DEFINE_ERROR

}  // namespace asode
