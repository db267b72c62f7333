#pragma once

#include <array>

#include "actlex/epa.hpp"

namespace actlex {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Coefficients of the modifier-identity amalgamation
/// `composite = intercept + modifier_weights * M + identity_weights * I`.
struct AmalgamationCoefficients {
    Epa intercept{-0.17, -0.18, 0.00};
    Matrix3 modifier_weights{{{0.62, -0.14, -0.18}, {-0.11, 0.63, 0.00}, {0.00, 0.00, 0.61}}};
    Matrix3 identity_weights{{{0.50, 0.00, 0.00}, {0.00, 0.56, 0.07}, {0.00, -0.05, 0.60}}};
};

Epa multiply(const Matrix3& m, const Epa& x);

// Composite EPA of a modified identity. No clamping; throws InvalidInputError
// on non-finite input.
Epa amalgamate(const Epa& modifier, const Epa& identity,
               const AmalgamationCoefficients& coeffs = {});

}  // namespace actlex
