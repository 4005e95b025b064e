#include "odmrpol/sweep.hpp"

#include <numbers>
#include <stdexcept>

namespace odmrpol {

const char* sweep_mode_name(SweepMode mode) {
    return mode == SweepMode::polarizer ? "polarizer" : "laser";
}

namespace {

SweepResult run_sweep(SweepMode mode, const std::array<NVFamily, 4>& families,
                      const PhotophysicsParams& params, const UnitVec3& fixed,
                      const PolarizationPlane& plane, int n_angles) {
    if (n_angles < 4) throw std::invalid_argument("sweep: need at least 4 angles");
    params.validate();

    SweepResult out{mode, plane, fixed.vec(), {}, {}};
    out.angle_rad.reserve(static_cast<std::size_t>(n_angles));
    out.weights.reserve(static_cast<std::size_t>(n_angles));
    for (int k = 0; k < n_angles; ++k) {
        const double angle = std::numbers::pi * static_cast<double>(k) / n_angles;
        const UnitVec3 swept = angle_to_vector(plane, angle);
        const UnitVec3& n_l = mode == SweepMode::laser ? swept : fixed;
        const UnitVec3& n_p = mode == SweepMode::polarizer ? swept : fixed;
        out.angle_rad.push_back(angle);
        out.weights.push_back(family_weights(params, families, n_l, n_p));
    }
    return out;
}

}  // namespace

SweepResult sweep_polarizer(const std::array<NVFamily, 4>& families,
                            const PhotophysicsParams& params, const UnitVec3& n_l,
                            const PolarizationPlane& plane, int n_angles) {
    return run_sweep(SweepMode::polarizer, families, params, n_l, plane, n_angles);
}

SweepResult sweep_laser(const std::array<NVFamily, 4>& families, const PhotophysicsParams& params,
                        const UnitVec3& n_p, const PolarizationPlane& plane, int n_angles) {
    return run_sweep(SweepMode::laser, families, params, n_p, plane, n_angles);
}

std::array<std::optional<double>, 4> identify_family_by_suppression(const SweepResult& sweep) {
    std::array<std::optional<double>, 4> out;
    for (int fam = 0; fam < 4; ++fam) {
        double best = 1.0;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < sweep.weights.size(); ++k) {
            const double r = sweep.weights[k].relative_contribution[static_cast<std::size_t>(fam)];
            if (r < best) {
                best = r;
                best_k = k;
            }
        }
        if (best < 0.01) out[static_cast<std::size_t>(fam)] = sweep.angle_rad[best_k];
    }
    return out;
}

}  // namespace odmrpol
