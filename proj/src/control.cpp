#include "actlex/control.hpp"

#include <Eigen/Dense>

#include "actlex/errors.hpp"

namespace actlex {

namespace {

using Residual9 = std::array<double, 9>;

// Residual of the transients of an event against the fundamentals it should
// confirm; the unknown character appears in both.
Residual9 residual(const EventProfile& input, const EventProfile& fundamentals, const CoefficientSet& coeffs) {
    const auto t = impression(input, coeffs).flatten();
    const auto f = fundamentals.flatten();
    Residual9 r{};
    for (std::size_t i = 0; i < 9; ++i) r[i] = t[i] - f[i];
    return r;
}

template <class Build>
AffineResidual linearize(Build&& build, const CoefficientSet& coeffs) {
    AffineResidual out;
    auto [in0, f0] = build(Epa{});
    out.offset = residual(in0, f0, coeffs);
    for (std::size_t j = 0; j < 3; ++j) {
        Epa unit{};
        unit[j] = 1.0;
        auto [in, f] = build(unit);
        const auto rj = residual(in, f, coeffs);
        for (std::size_t i = 0; i < 9; ++i) out.jacobian[i][j] = rj[i] - out.offset[i];
    }
    return out;
}

}  // namespace

double AffineResidual::objective(const Epa& v) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        const double r = offset[i] + jacobian[i][0] * v.e + jacobian[i][1] * v.p + jacobian[i][2] * v.a;
        sum += r * r;
    }
    return sum;
}

LeastSquaresSolution solve_affine_least_squares(const AffineResidual& residual) {
    Eigen::Matrix<double, 9, 3> J;
    Eigen::Matrix<double, 9, 1> c;
    for (int i = 0; i < 9; ++i) {
        c(i) = residual.offset[i];
        for (int j = 0; j < 3; ++j) J(i, j) = residual.jacobian[i][j];
    }
    const Eigen::Matrix3d normal = J.transpose() * J;
    const Eigen::Vector3d rhs = -J.transpose() * c;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const bool ill = !(lo > 0.0) || hi / lo > kConditionLimit;

    Eigen::Vector3d v;
    if (ill) {
        v = (normal + kRidgeLambda * Eigen::Matrix3d::Identity()).ldlt().solve(rhs);
    } else {
        v = normal.ldlt().solve(rhs);
    }
    LeastSquaresSolution out;
    out.value = {v(0), v(1), v(2)};
    out.deflection = residual.objective(out.value);
    out.regularized = ill;
    return out;
}

AffineResidual behavior_residual(const Epa& actor_transient, const Epa& object_transient,
                                 const Epa& actor_fundamental, const Epa& object_fundamental,
                                 const CoefficientSet& coeffs) {
    return linearize(
        [&](const Epa& v) {
            return std::pair{EventProfile{actor_transient, v, object_transient},
                             EventProfile{actor_fundamental, v, object_fundamental}};
        },
        coeffs);
}

AffineResidual actor_residual(const Epa& behavior, const Epa& object_transient, const Epa& object_fundamental,
                              const CoefficientSet& coeffs) {
    return linearize(
        [&](const Epa& v) {
            return std::pair{EventProfile{v, behavior, object_transient},
                             EventProfile{v, behavior, object_fundamental}};
        },
        coeffs);
}

Epa optimal_behavior(const Epa& actor_transient, const Epa& object_transient, const Epa& actor_fundamental,
                     const Epa& object_fundamental, const CoefficientSet& coeffs) {
    if (!actor_transient.finite() || !object_transient.finite() || !actor_fundamental.finite() ||
        !object_fundamental.finite()) {
        throw InvalidInputError("optimal_behavior: non-finite input");
    }
    return solve_affine_least_squares(
               behavior_residual(actor_transient, object_transient, actor_fundamental, object_fundamental, coeffs))
        .value;
}

Epa optimal_actor(const Epa& behavior, const Epa& object_transient, const Epa& object_fundamental,
                  const CoefficientSet& coeffs) {
    if (!behavior.finite() || !object_transient.finite() || !object_fundamental.finite()) {
        throw InvalidInputError("optimal_actor: non-finite input");
    }
    return solve_affine_least_squares(actor_residual(behavior, object_transient, object_fundamental, coeffs)).value;
}

}  // namespace actlex
