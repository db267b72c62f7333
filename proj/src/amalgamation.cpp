#include "actlex/amalgamation.hpp"

#include "actlex/errors.hpp"

namespace actlex {

Epa multiply(const Matrix3& m, const Epa& x) {
    Epa out;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = m[i][0] * x.e + m[i][1] * x.p + m[i][2] * x.a;
    }
    return out;
}

Epa amalgamate(const Epa& modifier, const Epa& identity, const AmalgamationCoefficients& coeffs) {
    if (!modifier.finite() || !identity.finite()) {
        throw InvalidInputError("amalgamate: non-finite modifier or identity");
    }
    return coeffs.intercept + multiply(coeffs.modifier_weights, modifier) +
           multiply(coeffs.identity_weights, identity);
}

}  // namespace actlex
