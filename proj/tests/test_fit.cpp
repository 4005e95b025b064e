#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "odmrpol/fit.hpp"
#include "test_support.hpp"

using namespace odmrpol;
using doctest::Approx;
using testsupport::random_unit;

namespace {

MagneticField default_field() {
    const double scale = 4e-3 / std::sqrt(21.0);
    return MagneticField({scale * 1.0, scale * 2.0, scale * 4.0});
}

FamilyWeights baseline_weights() {
    return family_weights({}, canonical_families(), UnitVec3(0, 1, 0), UnitVec3(0, 0, 1));
}

SpectrumModel default_model(double linewidth = 1e7) {
    return build_spectrum_model(default_field(), canonical_families(), baseline_weights(),
                                linewidth);
}

Spectrum synth(const SpectrumModel& model, double sigma, std::uint64_t seed,
               std::size_t points = 2000) {
    const auto grid = make_frequency_grid(model.peaks.front().center_hz - 1e8,
                                          model.peaks.back().center_hz + 1e8, points);
    return synthesize_spectrum(model, grid, sigma, seed);
}

// Random non-degenerate field whose 8 peaks are all separated by at least
// min_sep.
MagneticField random_resolved_field(std::mt19937_64& rng, double min_sep) {
    std::uniform_real_distribution<double> mag(1e-3, 5e-3);
    for (;;) {
        const UnitVec3 dir = random_unit(rng);
        const MagneticField field(mag(rng) * dir.vec());
        const auto model = build_spectrum_model(field, canonical_families(), baseline_weights(),
                                                1e7);
        if (model.min_center_separation_hz() >= min_sep) return field;
    }
}

}  // namespace

TEST_CASE("peak detection finds the eight dips") {
    const auto model = default_model();
    for (double sigma : {0.0, 0.002}) {
        const auto spectrum = synth(model, sigma, 5);
        const auto detected = detect_peaks(spectrum);
        REQUIRE(detected.peaks.size() == 8);
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(std::abs(detected.peaks[i].center_hz - model.peaks[i].center_hz) < 2e6);
            CHECK(detected.peaks[i].contrast > 0.0);
            CHECK(detected.peaks[i].fwhm_hz > 0.0);
        }
    }
}

TEST_CASE("peak detection rejects unresolvable spectra") {
    // Degenerate field: only two distinct dip positions.
    const auto degenerate = build_spectrum_model(MagneticField({0.0, 0.0, 4e-3}),
                                                 canonical_families(), baseline_weights(), 1e7);
    CHECK_THROWS_AS(detect_peaks(synth(degenerate, 0.0, 0)), PeakDetectionFailed);

    Spectrum tiny;
    tiny.frequency_hz = {1.0, 2.0, 3.0};
    tiny.normalized_pl = {1.0, 0.9, 1.0};
    CHECK_THROWS_AS(detect_peaks(tiny), std::invalid_argument);
}

TEST_CASE("noiseless round trip is essentially exact") {
    const auto model = default_model();
    const auto spectrum = synth(model, 0.0, 0);
    const auto fit = fit_spectrum(spectrum);
    REQUIRE(fit.model.peaks.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(std::abs(fit.model.peaks[i].center_hz - model.peaks[i].center_hz) < 1e3);
        CHECK(std::abs(fit.model.peaks[i].contrast - model.peaks[i].contrast) < 1e-6);
        CHECK(fit.model.peaks[i].fwhm_hz == Approx(model.peaks[i].fwhm_hz).epsilon(1e-4));
    }
    CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("noisy round trip stays within the advertised tolerances") {
    const auto model = default_model();
    const auto spectrum = synth(model, 0.002, 7);
    const auto fit = fit_spectrum(spectrum);
    REQUIRE(fit.model.peaks.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(std::abs(fit.model.peaks[i].center_hz - model.peaks[i].center_hz) < 1e6);
        CHECK(fit.model.peaks[i].contrast ==
              Approx(model.peaks[i].contrast).epsilon(0.10));
        // The intervals must sit at the physically expected scale, not at
        // numerical noise: roughly linewidth * sigma / contrast for centers.
        CHECK(fit.ci95_center_hz[i] > 1e4);
        CHECK(fit.ci95_center_hz[i] < 1e6);
        CHECK(fit.ci95_fwhm_hz[i] > 1e4);
        CHECK(fit.ci95_fwhm_hz[i] < 5e6);
        CHECK(fit.ci95_contrast[i] > 1e-4);
        CHECK(fit.ci95_contrast[i] < 1e-2);
        CHECK(std::abs(fit.model.peaks[i].center_hz - model.peaks[i].center_hz) <
              6.0 * fit.ci95_center_hz[i]);
    }
    CHECK(fit.residual_rms == Approx(0.002).epsilon(0.3));
}

TEST_CASE("noiseless round trip across random resolved configurations") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_real_distribution<double> lw(5e6, 1.5e7);
        const double linewidth = lw(rng);
        const MagneticField field = random_resolved_field(rng, 2.0 * linewidth);
        const auto model = build_spectrum_model(field, canonical_families(), baseline_weights(),
                                                linewidth);
        const auto fit = fit_spectrum(synth(model, 0.0, 0));
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(std::abs(fit.model.peaks[i].center_hz - model.peaks[i].center_hz) <
                  1e-4 * linewidth);
            CHECK(std::abs(fit.model.peaks[i].contrast - model.peaks[i].contrast) < 1e-6);
        }
    }
}

TEST_CASE("explicit initial guess rescues overlapping spectra") {
    const auto degenerate = build_spectrum_model(MagneticField({0.0, 0.0, 4e-3}),
                                                 canonical_families(), baseline_weights(), 1e7);
    const auto spectrum = synth(degenerate, 0.0, 0);
    const auto fit = fit_spectrum(spectrum, {}, &degenerate);
    CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("a fit that cannot move reports non-convergence") {
    const auto model = default_model();
    auto spectrum = synth(model, 0.002, 9);
    // Zero-contrast peaks have an identically zero Jacobian: no step can be
    // accepted and the residual stays far above the noiseless floor.
    SpectrumModel stuck = model;
    for (auto& p : stuck.peaks) p.contrast = 0.0;
    CHECK_THROWS_AS(fit_spectrum(spectrum, {}, &stuck), FitNotConverged);
}
