#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "odmrpol/zeeman.hpp"

namespace odmrpol {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitNotConverged : FitError {
    using FitError::FitError;
};
struct PeakDetectionFailed : FitError {
    using FitError::FitError;
};

struct FitOptions {
    std::size_t n_peaks = 8;
    std::size_t max_iterations = 500;
    double ssr_rel_tol = 1e-10;  // convergence: relative SSR decrease between accepted steps
};

struct FitResult {
    SpectrumModel model;  // sorted by center frequency; family map left unset (-1)
    std::vector<double> ci95_center_hz;
    std::vector<double> ci95_fwhm_hz;
    std::vector<double> ci95_contrast;
    double residual_rms = 0.0;
    double ssr = 0.0;
    std::size_t iterations = 0;
};

// Blind initializer: boxcar-smooth the trace, find local minima, keep the
// n_peaks deepest dips that clear the noise floor. Width seeds are 10x the
// median grid spacing, contrast seeds are the dip depths below 1.
// Throws PeakDetectionFailed when fewer than n_peaks dips qualify.
SpectrumModel detect_peaks(const Spectrum& spectrum, std::size_t n_peaks = 8);

// Levenberg-Marquardt fit of a sum of Lorentzian dips on a unit baseline,
// 3 parameters per peak. Width and contrast are optimized through their
// square roots so both stay non-negative without hard constraints. With no
// initial_guess, detect_peaks seeds the fit. 95% confidence intervals come
// from the linearized covariance at the solution.
FitResult fit_spectrum(const Spectrum& spectrum, const FitOptions& options = {},
                       const SpectrumModel* initial_guess = nullptr);

}  // namespace odmrpol
