#pragma once

#include <stdexcept>
#include <string>

namespace uteich {

/// Base for every library failure; kind() is the stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define UTEICH_ERROR(Name)                                                 \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what) {}     \
    };

// core-analysis
UTEICH_ERROR(SingularDerivative)
UTEICH_ERROR(DegenerateTriple)
UTEICH_ERROR(InverseUndefined)
UTEICH_ERROR(NonMonotone)
// disc-calculus
UTEICH_ERROR(DegreeOverflow)
UTEICH_ERROR(NonContractive)
UTEICH_ERROR(NoConvergence)
UTEICH_ERROR(SingularityTooClose)
// welding
UTEICH_ERROR(DegenerateJacobian)
UTEICH_ERROR(MoebiusDegenerate)
UTEICH_ERROR(NotStarShaped)
UTEICH_ERROR(IterationDiverged)
UTEICH_ERROR(WeldingInconsistent)
UTEICH_ERROR(AssumptionViolated)
UTEICH_ERROR(BoundViolated)
UTEICH_ERROR(WronskianCollapse)
// grassmannian
UTEICH_ERROR(NonDiffeomorphism)
UTEICH_ERROR(GraphTransversalityLost)
// geometry
UTEICH_ERROR(BasePointMismatch)
UTEICH_ERROR(NotHermitian)
UTEICH_ERROR(ZeroDirection)
UTEICH_ERROR(NotOrthonormal)
UTEICH_ERROR(NotPositiveDefinite)
UTEICH_ERROR(StepRejected)
// kdv
UTEICH_ERROR(Blowup)
UTEICH_ERROR(ResidualDiverged)
// cli
UTEICH_ERROR(ConfigInvalid)

#undef UTEICH_ERROR

} // namespace uteich
