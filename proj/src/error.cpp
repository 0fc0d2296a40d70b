#include "translim/error.hpp"

namespace translim {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::ArgumentOutsideRegion: return "ArgumentOutsideRegion";
        case ErrorCode::PoleAtOrigin: return "PoleAtOrigin";
        case ErrorCode::DivergentGeometricTerm: return "DivergentGeometricTerm";
        case ErrorCode::UnsupportedArrivalLaw: return "UnsupportedArrivalLaw";
        case ErrorCode::UnsupportedLaw: return "UnsupportedLaw";
        case ErrorCode::NonPositiveTime: return "NonPositiveTime";
        case ErrorCode::AbscissaViolation: return "AbscissaViolation";
        case ErrorCode::NonFiniteTransformValue: return "NonFiniteTransformValue";
        case ErrorCode::RootNotBracketed: return "RootNotBracketed";
        case ErrorCode::NonMonotoneDerivative: return "NonMonotoneDerivative";
        case ErrorCode::RatioUnattainable: return "RatioUnattainable";
        case ErrorCode::UnsupportedPolicyForAnalytic: return "UnsupportedPolicyForAnalytic";
        case ErrorCode::InvalidReplications: return "InvalidReplications";
        case ErrorCode::UnsupportedDistribution: return "UnsupportedDistribution";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptySeriesAfterFilter: return "EmptySeriesAfterFilter";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

}  // namespace translim
