#include "odmrpol/assign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace odmrpol {

Assignment assign_peaks_to_families(const SpectrumModel& fitted, const MagneticField& field,
                                    const std::array<NVFamily, 4>& families,
                                    const NVConstants& constants, const AssignOptions& options) {
    if (fitted.peaks.size() != 8)
        throw std::invalid_argument("assign_peaks_to_families: need exactly 8 peaks");
    if (!options.ci95_center_hz.empty() && options.ci95_center_hz.size() != 8)
        throw std::invalid_argument("assign_peaks_to_families: CI list must match the peaks");

    std::array<std::size_t, 8> order;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fitted.peaks[a].center_hz < fitted.peaks[b].center_hz;
    });

    // Outside-in pairing: k-th lowest with k-th highest.
    std::array<double, 4> observed{};
    std::array<double, 4> pair_ci{};
    double ci_max = 0.0;
    for (int pair = 0; pair < 4; ++pair) {
        const std::size_t lo = order[pair];
        const std::size_t hi = order[7 - pair];
        const double lo_hz = fitted.peaks[lo].center_hz;
        const double hi_hz = fitted.peaks[hi].center_hz;
        observed[pair] = hi_hz - lo_hz;
        if (!options.ci95_center_hz.empty()) {
            pair_ci[pair] = options.ci95_center_hz[lo] + options.ci95_center_hz[hi];
            ci_max = std::max(ci_max, pair_ci[pair]);
        }
    }
    for (int pair = 0; pair < 4; ++pair) {
        const double mid = 0.5 * (fitted.peaks[order[pair]].center_hz +
                                  fitted.peaks[order[7 - pair]].center_hz);
        const double tol = std::max(options.midpoint_tolerance_hz, 4.0 * pair_ci[pair]);
        if (std::abs(mid - constants.zero_field_splitting_hz) > tol)
            throw std::invalid_argument(
                "assign_peaks_to_families: pair midpoint off the zero-field line by " +
                std::to_string(mid - constants.zero_field_splitting_hz) + " Hz");
    }

    std::array<double, 4> predicted{};
    for (int i = 0; i < 4; ++i) {
        const ResonancePair res = resonance_frequencies(field, families[i].axis, constants);
        predicted[i] = res.upper_hz - res.lower_hz;
    }

    // Distinguishability gate: if two families' predicted splittings sit
    // within the fit uncertainty of each other, any choice between them is
    // arbitrary.
    const double resolvable = std::max(options.ambiguity_floor_hz, ci_max);
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (std::abs(predicted[i] - predicted[j]) <= resolvable)
                throw AmbiguousAssignment(
                    std::string("families ") + family_name(static_cast<FamilyLabel>(i)) + " and " +
                    family_name(static_cast<FamilyLabel>(j)) + " have splittings within " +
                    std::to_string(resolvable) + " Hz of each other");
        }
    }

    // Best family permutation by total absolute deviation; the first (label-
    // ordered) permutation wins ties.
    std::array<int, 4> perm = {0, 1, 2, 3};
    std::array<int, 4> best_perm = perm;
    double best_cost = -1.0;
    do {
        double cost = 0.0;
        for (int pair = 0; pair < 4; ++pair)
            cost += std::abs(observed[pair] - predicted[perm[pair]]);
        if (best_cost < 0.0 || cost < best_cost) {
            best_cost = cost;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    Assignment out;
    out.family_of_peak.assign(8, -1);
    out.predicted_splitting_hz = predicted;
    out.total_deviation_hz = best_cost;
    for (int pair = 0; pair < 4; ++pair) {
        const int fam = best_perm[pair];
        out.family_of_peak[order[pair]] = fam;
        out.family_of_peak[order[7 - pair]] = fam;
        out.observed_splitting_hz[fam] = observed[pair];
    }
    return out;
}

}  // namespace odmrpol
