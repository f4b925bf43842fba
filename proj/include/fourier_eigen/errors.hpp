#pragma once

#include <stdexcept>
#include <string>

namespace fe {

// One exception type per failure class so callers (and the CLI) can map them
// onto exit codes without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define FE_DEFINE_ERROR(Name)                                          \
    struct Name : Error {                                              \
        using Error::Error;                                            \
        const char* kind() const noexcept override { return #Name; }   \
    };

FE_DEFINE_ERROR(ZeroLeadingCoefficient)
FE_DEFINE_ERROR(InvalidWeight)
FE_DEFINE_ERROR(InvalidId)
FE_DEFINE_ERROR(IdentityViolation)
FE_DEFINE_ERROR(BadDimension)
FE_DEFINE_ERROR(NoSolution)
FE_DEFINE_ERROR(TruncationTooSmall)
FE_DEFINE_ERROR(ConstraintUnavailable)
FE_DEFINE_ERROR(WeightOutOfRange)
FE_DEFINE_ERROR(MismatchBeyondScalar)
FE_DEFINE_ERROR(BadWeight)
FE_DEFINE_ERROR(DecompositionFailure)
FE_DEFINE_ERROR(PrecisionLoss)
FE_DEFINE_ERROR(PoleAt2k)
FE_DEFINE_ERROR(BadSamplePoint)
FE_DEFINE_ERROR(SignAnomaly)
FE_DEFINE_ERROR(ParseError)

#undef FE_DEFINE_ERROR

}  // namespace fe
