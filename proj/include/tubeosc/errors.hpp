#pragma once

#include <stdexcept>
#include <string>

namespace tubeosc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define TUBEOSC_DEFINE_ERROR(Name)          \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

TUBEOSC_DEFINE_ERROR(FormatError);
TUBEOSC_DEFINE_ERROR(OutOfOrderError);
TUBEOSC_DEFINE_ERROR(EmptySeries);
TUBEOSC_DEFINE_ERROR(EmptyPeriod);
TUBEOSC_DEFINE_ERROR(InvalidSpec);
TUBEOSC_DEFINE_ERROR(InvalidGrid);
TUBEOSC_DEFINE_ERROR(SequenceError);
TUBEOSC_DEFINE_ERROR(RangeError);
TUBEOSC_DEFINE_ERROR(DegenerateRange);
TUBEOSC_DEFINE_ERROR(InvalidThresholds);
TUBEOSC_DEFINE_ERROR(InvalidQuote);
TUBEOSC_DEFINE_ERROR(MissingData);
TUBEOSC_DEFINE_ERROR(DegenerateVariance);
TUBEOSC_DEFINE_ERROR(ConfigError);
TUBEOSC_DEFINE_ERROR(DataMissing);
TUBEOSC_DEFINE_ERROR(TraceUnavailable);

#undef TUBEOSC_DEFINE_ERROR

}  // namespace tubeosc
