#pragma once

// Shipped fixtures and polynomial families.

#include "finj/ring.hpp"

#include <string>
#include <vector>

namespace finj {

struct Fixture {
    std::string name;
    Scalar p;
    std::vector<int> weights;
    std::string poly;

    HypersurfaceData data() const {
        return validate_hypersurface(parse_poly(poly, PrimeField(p), WeightSystem(weights)));
    }
};

inline std::string fermat_text(int n, int a) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " + x" : "x") + std::to_string(i) + "^" + std::to_string(a);
    return s;
}

inline std::string sum_of_squares_text(int n) { return fermat_text(n, 2); }

inline const std::vector<Fixture>& default_fixtures() {
    static const std::vector<Fixture> fx = {
        {"quadric-3", 3, {1, 1, 1}, sum_of_squares_text(3)},
        {"quadric-5", 3, {1, 1, 1, 1, 1}, sum_of_squares_text(5)},
        {"fermat-cubic-surface", 7, {1, 1, 1, 1}, fermat_text(4, 3)},
        {"fermat-cubic-threefold", 5, {1, 1, 1, 1, 1}, fermat_text(5, 3)},
        {"weighted-2-3-5", 7, {15, 10, 6}, "x0^2 + x1^3 + x2^5"},
    };
    return fx;
}

inline const Fixture& fixture(const std::string& name) {
    for (const auto& f : default_fixtures())
        if (f.name == name) return f;
    throw InputError("unknown fixture: " + name);
}

} // namespace finj
