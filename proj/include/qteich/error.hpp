#pragma once

#include <stdexcept>
#include <string>

namespace qteich {

enum class ErrorKind {
    InvalidParameter,
    StripViolation,
    QuadratureDivergence,
    RegimeViolation,
    PoleHit,
    PoleProximity,
    ContinuationDepthExceeded,
    HalfPlaneViolation,
    SectorBoundary,
    DomainViolation,
    NonDecayingTail,
    AxisOutOfRange,
    SpecMismatch,
    IdenticalAxes,
    BoundaryClipping,
    BoundaryMass,
    TailTooLarge,
    DiagonalizationFailure,
    FlipInapplicable,
    IndexOutOfRange,
    InvalidWord,
    DegenerateQ,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qteich
