#include "qteich/error.hpp"

namespace qteich {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::StripViolation: return "StripViolation";
        case ErrorKind::QuadratureDivergence: return "QuadratureDivergence";
        case ErrorKind::RegimeViolation: return "RegimeViolation";
        case ErrorKind::PoleHit: return "PoleHit";
        case ErrorKind::PoleProximity: return "PoleProximity";
        case ErrorKind::ContinuationDepthExceeded: return "ContinuationDepthExceeded";
        case ErrorKind::HalfPlaneViolation: return "HalfPlaneViolation";
        case ErrorKind::SectorBoundary: return "SectorBoundary";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::NonDecayingTail: return "NonDecayingTail";
        case ErrorKind::AxisOutOfRange: return "AxisOutOfRange";
        case ErrorKind::SpecMismatch: return "SpecMismatch";
        case ErrorKind::IdenticalAxes: return "IdenticalAxes";
        case ErrorKind::BoundaryClipping: return "BoundaryClipping";
        case ErrorKind::BoundaryMass: return "BoundaryMass";
        case ErrorKind::TailTooLarge: return "TailTooLarge";
        case ErrorKind::DiagonalizationFailure: return "DiagonalizationFailure";
        case ErrorKind::FlipInapplicable: return "FlipInapplicable";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::InvalidWord: return "InvalidWord";
        case ErrorKind::DegenerateQ: return "DegenerateQ";
    }
    return "Unknown";
}

}  // namespace qteich
