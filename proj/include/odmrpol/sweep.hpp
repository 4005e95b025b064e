#pragma once

#include <array>
#include <optional>
#include <vector>

#include "odmrpol/geometry.hpp"
#include "odmrpol/photophysics.hpp"

namespace odmrpol {

enum class SweepMode { polarizer, laser };

const char* sweep_mode_name(SweepMode mode);

// One polarization angle swept through a plane while the other polarization
// stays fixed. Angles run over [0, pi): polarization is a line, not an arrow.
struct SweepResult {
    SweepMode mode = SweepMode::polarizer;
    PolarizationPlane plane;
    Vec3 fixed_direction{};
    std::vector<double> angle_rad;
    std::vector<FamilyWeights> weights;
};

SweepResult sweep_polarizer(const std::array<NVFamily, 4>& families,
                            const PhotophysicsParams& params, const UnitVec3& n_l,
                            const PolarizationPlane& plane = collection_plane(),
                            int n_angles = 180);

SweepResult sweep_laser(const std::array<NVFamily, 4>& families, const PhotophysicsParams& params,
                        const UnitVec3& n_p, const PolarizationPlane& plane = laser_plane(),
                        int n_angles = 180);

// For each family, the sweep angle where its relative contribution drops
// below 1%, if any such angle exists in the sweep.
std::array<std::optional<double>, 4> identify_family_by_suppression(const SweepResult& sweep);

}  // namespace odmrpol
