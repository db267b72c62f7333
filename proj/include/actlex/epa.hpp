#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace actlex {

// Bound of the survey rating scale on every EPA dimension.
inline constexpr double kEpaLimit = 4.3;

/// Evaluation, potency and activity on the bipolar semantic-differential scale.
struct Epa {
    double e = 0.0;
    double p = 0.0;
    double a = 0.0;

    constexpr double operator[](std::size_t i) const { return i == 0 ? e : (i == 1 ? p : a); }
    constexpr double& operator[](std::size_t i) { return i == 0 ? e : (i == 1 ? p : a); }

    bool finite() const { return std::isfinite(e) && std::isfinite(p) && std::isfinite(a); }
    bool in_range(double limit = kEpaLimit) const {
        return std::abs(e) <= limit && std::abs(p) <= limit && std::abs(a) <= limit;
    }
    std::array<double, 3> to_array() const { return {e, p, a}; }

    friend constexpr bool operator==(const Epa&, const Epa&) = default;
};

constexpr Epa operator+(Epa x, Epa y) { return {x.e + y.e, x.p + y.p, x.a + y.a}; }
constexpr Epa operator-(Epa x, Epa y) { return {x.e - y.e, x.p - y.p, x.a - y.a}; }
constexpr Epa operator*(double s, Epa x) { return {s * x.e, s * x.p, s * x.a}; }

inline double squared_distance(const Epa& x, const Epa& y) {
    const Epa d = x - y;
    return d.e * d.e + d.p * d.p + d.a * d.a;
}

inline double distance(const Epa& x, const Epa& y) { return std::sqrt(squared_distance(x, y)); }

Epa clamp(const Epa& x, double limit = kEpaLimit);

std::ostream& operator<<(std::ostream& os, const Epa& x);

enum class Category { identity, behavior, modifier };

inline constexpr std::array<Category, 3> kCategories = {Category::identity, Category::behavior,
                                                        Category::modifier};

std::string_view to_string(Category c);
// Throws ParseError on unknown names.
Category parse_category(std::string_view name);

/// Actor, behavior and object EPA of one ABO event.
///
/// Flattened order is [Ae, Ap, Aa, Be, Bp, Ba, Oe, Op, Oa].
struct EventProfile {
    Epa actor;
    Epa behavior;
    Epa object;

    static constexpr std::size_t kSize = 9;

    std::array<double, kSize> flatten() const {
        return {actor.e, actor.p, actor.a, behavior.e, behavior.p, behavior.a,
                object.e, object.p, object.a};
    }
    static EventProfile unflatten(std::span<const double, kSize> x) {
        return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}, {x[6], x[7], x[8]}};
    }
    bool finite() const { return actor.finite() && behavior.finite() && object.finite(); }

    friend bool operator==(const EventProfile&, const EventProfile&) = default;
};

inline constexpr std::array<std::string_view, EventProfile::kSize> kProfileLabels = {
    "Ae", "Ap", "Aa", "Be", "Bp", "Ba", "Oe", "Op", "Oa"};

}  // namespace actlex
