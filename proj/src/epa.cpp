#include "actlex/epa.hpp"

#include <algorithm>
#include <string>

#include "actlex/errors.hpp"

namespace actlex {

Epa clamp(const Epa& x, double limit) {
    return {std::clamp(x.e, -limit, limit), std::clamp(x.p, -limit, limit), std::clamp(x.a, -limit, limit)};
}

std::ostream& operator<<(std::ostream& os, const Epa& x) {
    return os << '(' << x.e << ", " << x.p << ", " << x.a << ')';
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::identity: return "identity";
        case Category::behavior: return "behavior";
        case Category::modifier: return "modifier";
    }
    return "unknown";
}

Category parse_category(std::string_view name) {
    if (name == "identity") return Category::identity;
    if (name == "behavior") return Category::behavior;
    if (name == "modifier") return Category::modifier;
    throw ParseError("unknown category '" + std::string(name) + "' (expected identity, behavior or modifier)");
}

}  // namespace actlex
