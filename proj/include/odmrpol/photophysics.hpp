#pragma once

#include <array>
#include <stdexcept>

#include "odmrpol/geometry.hpp"

namespace odmrpol {

// Every family extinguished at once: the weight denominator vanishes and no
// relative quantity is defined.
struct DegenerateConfiguration : std::runtime_error {
    DegenerateConfiguration()
        : std::runtime_error("degenerate configuration: all families extinguished") {}
};

struct PhotophysicsParams {
    double pl_off = 1.0;                // emission rate per center, RF off resonance
    double pl_on = 0.85;                // emission rate per center, RF on resonance
    double collection_efficiency = 1.0; // in (0, 1]
    double ensemble_size = 4.0;         // centers in the probed volume, split evenly over families

    void validate() const;  // throws std::invalid_argument
    double pl_scale() const { return collection_efficiency * ensemble_size * pl_off / 4.0; }
};

// Per-family quantities for one (n_L, n_P) setting. Arrays are indexed by
// FamilyLabel order A,B,C,D.
struct FamilyWeights {
    std::array<double, 4> excitation{};            // pump coupling, in [0,1]
    std::array<double, 4> emission{};              // polarizer transmission, in [0,1]
    std::array<double, 4> relative_contribution{}; // fraction of the detected light
    std::array<double, 4> contrast{};              // ODMR dip depth of this family's lines
    std::array<double, 4> chi{};                   // sensitivity merit, independent of absolute rates
    std::array<double, 4> rho{};                   // sensitivity merit carrying the absolute PL level
    double s0 = 0.0;                               // detected PL with RF off resonance
};

// Pump coupling of one family: 1 - (axis . n_L)^2.
double excitation_probability(const UnitVec3& axis, const UnitVec3& n_l);

// Transmission of one family's (averaged) emission through a polarizer along
// n_P: 1 - (axis . n_P)^2. Equals the sum of the two dipole components.
double polarized_emission_intensity(const UnitVec3& axis, const UnitVec3& n_p);

// Far-field radiated intensity of a single linear dipole seen from
// observation_dir: |(u x d) x u|^2 = 1 - (u . d)^2.
double dipole_far_field_intensity(const UnitVec3& dipole, const UnitVec3& observation_dir);

// Total detected PL with the RF drive off resonance.
double detected_pl(const PhotophysicsParams& params, const std::array<NVFamily, 4>& families,
                   const UnitVec3& n_l, const UnitVec3& n_p);

FamilyWeights family_weights(const PhotophysicsParams& params,
                             const std::array<NVFamily, 4>& families, const UnitVec3& n_l,
                             const UnitVec3& n_p);

}  // namespace odmrpol
