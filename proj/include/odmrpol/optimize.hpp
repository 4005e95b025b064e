#pragma once

#include <array>

#include "odmrpol/geometry.hpp"
#include "odmrpol/photophysics.hpp"

namespace odmrpol {

enum class OptimizeTarget { relative_contrast, chi };
enum class OptimizeConstraint { experiment_planes, unconstrained };

const char* optimize_target_name(OptimizeTarget target);          // "R" or "chi"
const char* optimize_constraint_name(OptimizeConstraint c);       // "planes" or "free"

struct OptimizeOptions {
    double grid_deg = 1.0;  // grid pitch, must lie in (0, 4]
    bool refine = true;     // polish the grid winner by coordinate ascent
    int threads = 1;
    double refine_tol_rad = 1e-4;

    void validate() const;
};

struct Optimum {
    OptimizeTarget target = OptimizeTarget::relative_contrast;
    OptimizeConstraint constraint = OptimizeConstraint::unconstrained;
    FamilyLabel family = FamilyLabel::A;
    Vec3 n_l{};
    Vec3 n_p{};
    double value = 0.0;       // objective at (n_l, n_p)
    double grid_value = 0.0;  // best value seen on the grid before refinement
    double grid_deg = 0.0;
};

// Objective for one family: its relative contribution R (target
// relative_contrast) or the shot-noise figure chi = R * sqrt(sum_j P_j I_j)
// (target chi). Both depend on the two polarization directions only.
double polarization_objective(const std::array<NVFamily, 4>& families, FamilyLabel family,
                              OptimizeTarget target, const UnitVec3& n_l, const UnitVec3& n_p);

// value at the reference configuration n_L = [0,1,0], n_P = [0,0,1], where
// all four families contribute equally.
double baseline_polarization_value(const std::array<NVFamily, 4>& families, FamilyLabel family,
                                   OptimizeTarget target);

// Ratio of the optimum value to the baseline weights' value for the same
// target and family.
double improvement_report(const Optimum& optimum, const FamilyWeights& baseline);

// Exhaustive grid search over the two polarization directions, then optional
// local refinement. experiment_planes confines n_l to the laser plane and n_p
// to the collection plane; unconstrained searches both unit hemispheres.
// Deterministic for a given grid: ties resolve to the first grid point in scan
// order, and the thread count only partitions the scan without changing it.
Optimum optimize_polarizations(const std::array<NVFamily, 4>& families, FamilyLabel family,
                               OptimizeTarget target, OptimizeConstraint constraint,
                               const OptimizeOptions& options = {});

}  // namespace odmrpol
