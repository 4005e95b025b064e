#pragma once

#include <random>

#include "odmrpol/geometry.hpp"

namespace testsupport {

inline odmrpol::UnitVec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    for (;;) {
        const odmrpol::Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
        if (odmrpol::norm(v) > 1e-3) return odmrpol::UnitVec3(v);
    }
}

}  // namespace testsupport
