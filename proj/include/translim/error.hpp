#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace translim {

enum class ErrorCode {
    InvalidSpec,
    ArgumentOutsideRegion,
    PoleAtOrigin,
    DivergentGeometricTerm,
    UnsupportedArrivalLaw,
    UnsupportedLaw,
    NonPositiveTime,
    AbscissaViolation,
    NonFiniteTransformValue,
    RootNotBracketed,
    NonMonotoneDerivative,
    RatioUnattainable,
    UnsupportedPolicyForAnalytic,
    InvalidReplications,
    UnsupportedDistribution,
    EmptyGrid,
    FileNotFound,
    SchemaMismatch,
    ParseError,
    EmptySeriesAfterFilter,
    InsufficientData,
    NonPositiveValue,
    NoConvergence,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the
// message text is for humans, the code is for callers.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace translim
