#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "odmrpol/geometry.hpp"
#include "odmrpol/photophysics.hpp"

namespace odmrpol {

struct NVConstants {
    double zero_field_splitting_hz = 2.87e9;
    double gyromagnetic_ratio_hz_per_t = 28e9;
};

// Static bias field in the crystal frame. The linear-projection resonance
// model below only holds well below ~10 mT, so larger fields are rejected.
struct MagneticField {
    Vec3 tesla;

    explicit MagneticField(const Vec3& b_tesla);
    double magnitude() const { return norm(tesla); }
};

struct ResonancePair {
    double lower_hz;
    double upper_hz;
};

// The two spin-transition frequencies of one family: |D -+ gamma * (B.axis)|.
ResonancePair resonance_frequencies(const MagneticField& field, const UnitVec3& axis,
                                    const NVConstants& constants = {});

// Reassigns labels so that A..D are ordered by ascending lower resonance
// frequency under the given field (the convention used when families are told
// apart spectroscopically). Axes and dipole bases are untouched.
std::array<NVFamily, 4> relabel_families_by_resonance(const std::array<NVFamily, 4>& families,
                                                      const MagneticField& field,
                                                      const NVConstants& constants = {});

struct LorentzianPeak {
    double center_hz = 0.0;
    double fwhm_hz = 0.0;
    double contrast = 0.0;
};

// Eight-line model of an ensemble spectrum: two peaks per family, sorted by
// center frequency. family_of_peak maps each peak to a FamilyLabel index, or
// -1 when unknown (e.g. fresh fit output).
struct SpectrumModel {
    std::vector<LorentzianPeak> peaks;
    std::vector<int> family_of_peak;

    double min_center_separation_hz() const;
};

// Two peaks per family at its resonance pair, both carrying that family's
// contrast, all sharing one linewidth. Peaks may overlap (the caller can check
// min_center_separation_hz against the linewidth to warn).
SpectrumModel build_spectrum_model(const MagneticField& field,
                                   const std::array<NVFamily, 4>& families,
                                   const FamilyWeights& weights, double linewidth_fwhm_hz,
                                   const NVConstants& constants = {});

// Mean contrast of each family's two peaks. Requires a complete family map.
std::array<double, 4> family_contrast(const SpectrumModel& model);

std::vector<double> make_frequency_grid(double f_lo_hz, double f_hi_hz, std::size_t n_points);

struct Spectrum {
    std::vector<double> frequency_hz;   // strictly increasing
    std::vector<double> normalized_pl;  // ~1 off resonance

    void validate() const;  // throws std::invalid_argument
};

// Samples the model on the grid and adds i.i.d. Gaussian noise of the given
// standard deviation. Deterministic for a fixed seed; sigma = 0 is noiseless.
Spectrum synthesize_spectrum(const SpectrumModel& model, const std::vector<double>& grid_hz,
                             double noise_sigma, std::uint64_t seed);

}  // namespace odmrpol
