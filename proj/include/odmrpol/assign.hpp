#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "odmrpol/zeeman.hpp"

namespace odmrpol {

// Two families would swap under the measurement uncertainty (or are exactly
// degenerate); no defensible peak-to-family map exists.
struct AmbiguousAssignment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssignOptions {
    // How far a pair midpoint may sit from the zero-field line before pairing
    // is rejected. Widened automatically when center CIs say the fit is looser.
    double midpoint_tolerance_hz = 2e6;
    // Predicted splittings closer than this are treated as indistinguishable
    // even for a perfectly confident fit (exact degeneracies have zero CI).
    double ambiguity_floor_hz = 1e3;
    // Optional per-peak 95% CIs on the fitted centers, aligned with the peaks.
    std::vector<double> ci95_center_hz;
};

struct Assignment {
    std::vector<int> family_of_peak;               // aligned with the input peaks
    std::array<double, 4> observed_splitting_hz{}; // indexed by FamilyLabel
    std::array<double, 4> predicted_splitting_hz{};
    double total_deviation_hz = 0.0;               // sum of |observed - predicted|
};

// Maps 8 fitted peaks to families in two stages: peaks are paired from the
// outside in (a pair shares one field projection, so its midpoint sits at the
// zero-field line), then pair splittings are matched to the predicted
// 2*gamma*|B.axis| over all family permutations by least total deviation.
// Equal-deviation matchings resolve in label order. Throws AmbiguousAssignment
// when two predicted splittings are too close to tell apart.
Assignment assign_peaks_to_families(const SpectrumModel& fitted, const MagneticField& field,
                                    const std::array<NVFamily, 4>& families,
                                    const NVConstants& constants = {},
                                    const AssignOptions& options = {});

}  // namespace odmrpol
