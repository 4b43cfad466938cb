#pragma once

#include <stdexcept>
#include <string>

namespace rollmono {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Stable machine-readable identifier, used in the CLI's error JSON.
    virtual const char* kind() const noexcept { return "Error"; }
};

/// Numerical failures (exit code 2 in the CLI).
class NumericalError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NumericalError"; }
};

#define ROLLMONO_DEFINE_ERROR(Name, Base)                                  \
    class Name : public Base {                                             \
    public:                                                                \
        using Base::Base;                                                  \
        const char* kind() const noexcept override { return #Name; }       \
    }

ROLLMONO_DEFINE_ERROR(VerticalStateError, NumericalError);
ROLLMONO_DEFINE_ERROR(ToleranceNotMet, NumericalError);
ROLLMONO_DEFINE_ERROR(StepSizeUnderflow, NumericalError);
ROLLMONO_DEFINE_ERROR(NoCrossingFound, NumericalError);
ROLLMONO_DEFINE_ERROR(SingularSystem, NumericalError);
ROLLMONO_DEFINE_ERROR(NoRoot, NumericalError);
ROLLMONO_DEFINE_ERROR(RootNotBracketed, NumericalError);
ROLLMONO_DEFINE_ERROR(LoopHitsSingularity, NumericalError);
ROLLMONO_DEFINE_ERROR(WindingAmbiguous, NumericalError);

/// Bad user input: configuration files, flags, empty plot data (exit code 1).
ROLLMONO_DEFINE_ERROR(ConfigError, Error);
ROLLMONO_DEFINE_ERROR(IoError, Error);

#undef ROLLMONO_DEFINE_ERROR

}  // namespace rollmono
