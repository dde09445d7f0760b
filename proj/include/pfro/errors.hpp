#pragma once

#include <stdexcept>
#include <string>

namespace pfro {

// Root of the library's error hierarchy. Every precondition violation or
// unrecoverable condition throws a named subclass, and the class name is
// prefixed into what(), so callers (and the CLI) report what actually went
// wrong instead of a bare message.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PFRO_DEFINE_ERROR(NAME)                                                       \
    struct NAME : Error {                                                              \
        explicit NAME(const std::string& msg) : Error(std::string(#NAME ": ") + msg) {} \
    }

PFRO_DEFINE_ERROR(InvalidConfig);
// Query against an index that holds no primitive of the requested color.
PFRO_DEFINE_ERROR(EmptyIndex);
// Poisson clock ran past t_max: no further arrival exists in the window.
PFRO_DEFINE_ERROR(ClockExhausted);
// Grid classification would exceed the configured memory budget.
PFRO_DEFINE_ERROR(ResolutionTooLarge);
PFRO_DEFINE_ERROR(EmptySet);
// Regression asked for with fewer usable points than the fit requires.
PFRO_DEFINE_ERROR(DegenerateFit);
PFRO_DEFINE_ERROR(PreconditionViolated);
// Ball family cannot be placed inside the cube under the separation rules.
PFRO_DEFINE_ERROR(CannotPlaceBalls);
// Curve endpoints coincide (or the polyline has no extent): the splitting
// procedure has no scale to work with.
PFRO_DEFINE_ERROR(DegenerateCurve);
PFRO_DEFINE_ERROR(NonpositiveBound);
// Split tree cannot be refined to the requested depth.
PFRO_DEFINE_ERROR(DepthInfeasible);
// Malformed snapshot / report / spec file.
PFRO_DEFINE_ERROR(FormatError);
// Operation only defined in the plane (SVG rendering).
PFRO_DEFINE_ERROR(UnsupportedDimension);

#undef PFRO_DEFINE_ERROR

} // namespace pfro
