#ifndef FHOM_TESTS_HELPERS_HPP
#define FHOM_TESTS_HELPERS_HPP

#include <random>

#include "fhom/symmat3.hpp"

namespace fhom::testing {

inline std::mt19937& rng() {
    static std::mt19937 gen(20240817u);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline SymMat3 random_symmat(double scale = 1.0) {
    auto u = [&] { return uniform(-scale, scale); };
    return {u(), u(), u(), u(), u(), u()};
}

}  // namespace fhom::testing

#endif
