#include "odmrpol/zeeman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "odmrpol/kernels.hpp"

namespace odmrpol {

MagneticField::MagneticField(const Vec3& b_tesla) : tesla(b_tesla) {
    if (!(norm(b_tesla) < 0.01))
        throw std::domain_error("MagneticField: |B| must stay below 0.01 T");
}

ResonancePair resonance_frequencies(const MagneticField& field, const UnitVec3& axis,
                                    const NVConstants& constants) {
    const double proj = dot(field.tesla, axis.vec());
    const double shift = constants.gyromagnetic_ratio_hz_per_t * proj;
    const double a = std::abs(constants.zero_field_splitting_hz - shift);
    const double b = std::abs(constants.zero_field_splitting_hz + shift);
    return {std::min(a, b), std::max(a, b)};
}

std::array<NVFamily, 4> relabel_families_by_resonance(const std::array<NVFamily, 4>& families,
                                                      const MagneticField& field,
                                                      const NVConstants& constants) {
    std::array<int, 4> order = {0, 1, 2, 3};
    std::array<double, 4> lower{};
    for (int i = 0; i < 4; ++i)
        lower[i] = resonance_frequencies(field, families[i].axis, constants).lower_hz;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return lower[a] < lower[b]; });
    std::array<NVFamily, 4> out = families;
    for (int rank = 0; rank < 4; ++rank) {
        out[rank] = families[order[rank]];
        out[rank].label = static_cast<FamilyLabel>(rank);
    }
    return out;
}

double SpectrumModel::min_center_separation_hz() const {
    if (peaks.size() < 2) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < peaks.size(); ++i)
        best = std::min(best, peaks[i].center_hz - peaks[i - 1].center_hz);
    return best;
}

SpectrumModel build_spectrum_model(const MagneticField& field,
                                   const std::array<NVFamily, 4>& families,
                                   const FamilyWeights& weights, double linewidth_fwhm_hz,
                                   const NVConstants& constants) {
    if (!(linewidth_fwhm_hz > 0.0))
        throw std::invalid_argument("build_spectrum_model: linewidth must be positive");
    SpectrumModel model;
    model.peaks.reserve(8);
    model.family_of_peak.reserve(8);
    for (int i = 0; i < 4; ++i) {
        const ResonancePair res = resonance_frequencies(field, families[i].axis, constants);
        const double c = weights.contrast[i];
        model.peaks.push_back({res.lower_hz, linewidth_fwhm_hz, c});
        model.family_of_peak.push_back(static_cast<int>(families[i].label));
        model.peaks.push_back({res.upper_hz, linewidth_fwhm_hz, c});
        model.family_of_peak.push_back(static_cast<int>(families[i].label));
    }
    std::vector<std::size_t> order(model.peaks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.peaks[a].center_hz < model.peaks[b].center_hz;
    });
    SpectrumModel sorted;
    sorted.peaks.reserve(order.size());
    sorted.family_of_peak.reserve(order.size());
    for (std::size_t idx : order) {
        sorted.peaks.push_back(model.peaks[idx]);
        sorted.family_of_peak.push_back(model.family_of_peak[idx]);
    }
    return sorted;
}

std::array<double, 4> family_contrast(const SpectrumModel& model) {
    std::array<double, 4> sum{};
    std::array<int, 4> count{};
    if (model.family_of_peak.size() != model.peaks.size())
        throw std::invalid_argument("family_contrast: family map size mismatch");
    for (std::size_t i = 0; i < model.peaks.size(); ++i) {
        const int fam = model.family_of_peak[i];
        if (fam < 0 || fam > 3)
            throw std::invalid_argument("family_contrast: model lacks a complete family map");
        sum[fam] += model.peaks[i].contrast;
        ++count[fam];
    }
    std::array<double, 4> mean{};
    for (int i = 0; i < 4; ++i) {
        if (count[i] != 2)
            throw std::invalid_argument("family_contrast: each family needs exactly two peaks");
        mean[i] = sum[i] / 2.0;
    }
    return mean;
}

std::vector<double> make_frequency_grid(double f_lo_hz, double f_hi_hz, std::size_t n_points) {
    if (n_points < 2 || !(f_lo_hz < f_hi_hz))
        throw std::invalid_argument("make_frequency_grid: need f_lo < f_hi and >= 2 points");
    std::vector<double> grid(n_points);
    const double step = (f_hi_hz - f_lo_hz) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i)
        grid[i] = f_lo_hz + step * static_cast<double>(i);
    grid.back() = f_hi_hz;
    return grid;
}

void Spectrum::validate() const {
    if (frequency_hz.size() != normalized_pl.size())
        throw std::invalid_argument("Spectrum: column lengths differ");
    for (std::size_t i = 1; i < frequency_hz.size(); ++i)
        if (!(frequency_hz[i] > frequency_hz[i - 1]))
            throw std::invalid_argument("Spectrum: frequency grid must be strictly increasing");
}

Spectrum synthesize_spectrum(const SpectrumModel& model, const std::vector<double>& grid_hz,
                             double noise_sigma, std::uint64_t seed) {
    if (noise_sigma < 0.0)
        throw std::invalid_argument("synthesize_spectrum: negative noise sigma");
    const std::size_t n = grid_hz.size();
    const std::size_t k = model.peaks.size();
    std::vector<double> center(k), fwhm(k), contrast(k);
    for (std::size_t i = 0; i < k; ++i) {
        center[i] = model.peaks[i].center_hz;
        fwhm[i] = model.peaks[i].fwhm_hz;
        contrast[i] = model.peaks[i].contrast;
    }
    Spectrum out;
    out.frequency_hz = grid_hz;
    out.normalized_pl.resize(n);
    kernels::active_table().lorentzian_sum(grid_hz.data(), n, center.data(), fwhm.data(),
                                           contrast.data(), k, out.normalized_pl.data());
    if (noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_sigma);
        for (double& v : out.normalized_pl) v += gauss(rng);
    }
    out.validate();
    return out;
}

}  // namespace odmrpol
