#pragma once

#include <stdexcept>
#include <string>

namespace quench {

/// Base class of every failure raised by the library. The CLI maps these to
/// exit code 1 (numerical failure).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QUENCH_DEFINE_ERROR(Name)                                    \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

QUENCH_DEFINE_ERROR(SingularMatrix);
QUENCH_DEFINE_ERROR(InvalidBracket);
QUENCH_DEFINE_ERROR(OutOfRange);
QUENCH_DEFINE_ERROR(QuadFailure);
QUENCH_DEFINE_ERROR(OutOfDomain);
QUENCH_DEFINE_ERROR(TouchdownReached);
QUENCH_DEFINE_ERROR(MeshTangled);
QUENCH_DEFINE_ERROR(StiffnessFailure);
QUENCH_DEFINE_ERROR(BoundInapplicable);
QUENCH_DEFINE_ERROR(TruncationTooSmall);
QUENCH_DEFINE_ERROR(NoCriticalPoint);
QUENCH_DEFINE_ERROR(PredictionOutOfRange);
QUENCH_DEFINE_ERROR(Unsupported);
QUENCH_DEFINE_ERROR(IterateInvalid);
QUENCH_DEFINE_ERROR(InvalidTime);

#undef QUENCH_DEFINE_ERROR

/// Newton (or root search) ran out of iterations. Carries the last residual
/// norm so callers can report how close the iteration got.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double last_residual)
        : Error("NoConvergence: " + what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

}  // namespace quench
