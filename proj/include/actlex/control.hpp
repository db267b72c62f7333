#pragma once

#include <array>

#include "actlex/epa.hpp"
#include "actlex/impression.hpp"

namespace actlex {

// Residual r(v) = c + J v of a deflection objective whose unknown enters the
// equations affinely (every basis term has degree <= 1 in each character).
struct AffineResidual {
    std::array<double, 9> offset{};
    std::array<std::array<double, 3>, 9> jacobian{};

    double objective(const Epa& v) const;
};

struct LeastSquaresSolution {
    Epa value;
    double deflection = 0.0;
    bool regularized = false;
};

inline constexpr double kRidgeLambda = 1e-9;
inline constexpr double kConditionLimit = 1e10;

// Minimises |offset + J v|^2 through the 3x3 normal equations. When the
// normal matrix is singular or its condition number exceeds kConditionLimit
// the ridge-regularised system is solved instead, which tends to the
// minimum-norm solution.
LeastSquaresSolution solve_affine_least_squares(const AffineResidual& residual);

// Behavior that minimises deflection given the current transients of the two
// parties and their fundamentals. Throws InvalidInputError on non-finite input.
Epa optimal_behavior(const Epa& actor_transient, const Epa& object_transient,
                     const Epa& actor_fundamental, const Epa& object_fundamental,
                     const CoefficientSet& coeffs);

// Actor identity that best accounts for an observed behavior toward an object.
Epa optimal_actor(const Epa& behavior, const Epa& object_transient, const Epa& object_fundamental,
                  const CoefficientSet& coeffs);

AffineResidual behavior_residual(const Epa& actor_transient, const Epa& object_transient,
                                 const Epa& actor_fundamental, const Epa& object_fundamental,
                                 const CoefficientSet& coeffs);
AffineResidual actor_residual(const Epa& behavior, const Epa& object_transient,
                              const Epa& object_fundamental, const CoefficientSet& coeffs);

}  // namespace actlex
