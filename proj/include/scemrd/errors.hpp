#pragma once

#include <stdexcept>
#include <string>

namespace scemrd {

/// Newton iteration on the collocation equations failed to contract.
class NewtonDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Residual tolerance could not be met within the mesh-point budget.
class MeshOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A(x) is numerically singular at a queried point of the reduced problem.
class SingularReducedMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The structural sign/dominance assumptions on A(x) do not hold.
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The diffusion pattern is outside the supported cases.
class UnsupportedProblem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace scemrd
