#include "odmrpol/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "odmrpol/kernels.hpp"

namespace odmrpol {
namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

// sigma of i.i.d. noise from the median absolute successive difference;
// robust against the sparse dips riding on the baseline.
double noise_sigma_estimate(const std::vector<double>& y) {
    if (y.size() < 2) return 0.0;
    std::vector<double> d(y.size() - 1);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) d[i] = std::abs(y[i + 1] - y[i]);
    return median(std::move(d)) / (std::sqrt(2.0) * 0.6744897501960817);
}

std::vector<double> boxcar_smooth(const std::vector<double>& y, std::size_t halfwidth) {
    const std::size_t n = y.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > halfwidth ? i - halfwidth : 0;
        const std::size_t hi = std::min(n - 1, i + halfwidth);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

struct WorkParams {
    std::vector<double> center, alpha, gamma;  // fwhm = alpha^2, contrast = gamma^2
};

void eval_model(const std::vector<double>& freq, const WorkParams& p, std::vector<double>& fwhm,
                std::vector<double>& contrast, std::vector<double>& out) {
    const std::size_t k = p.center.size();
    for (std::size_t j = 0; j < k; ++j) {
        fwhm[j] = p.alpha[j] * p.alpha[j];
        contrast[j] = p.gamma[j] * p.gamma[j];
    }
    out.resize(freq.size());
    kernels::active_table().lorentzian_sum(freq.data(), freq.size(), p.center.data(), fwhm.data(),
                                           contrast.data(), k, out.data());
}

double ssr_of(const std::vector<double>& y, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - f[i];
        s += r * r;
    }
    return s;
}

}  // namespace

SpectrumModel detect_peaks(const Spectrum& spectrum, std::size_t n_peaks) {
    spectrum.validate();
    const std::size_t n = spectrum.frequency_hz.size();
    if (n < 5 * n_peaks)
        throw std::invalid_argument("detect_peaks: need at least 5 samples per peak");

    std::size_t halfwidth = std::max<std::size_t>(1, n / 400);
    const std::vector<double> smooth = boxcar_smooth(spectrum.normalized_pl, halfwidth);
    const std::size_t window = 2 * halfwidth + 1;

    const double sigma = noise_sigma_estimate(spectrum.normalized_pl);
    const double floor = std::max(5.0 * sigma / std::sqrt(static_cast<double>(window)), 1e-12);

    struct Dip {
        double depth;
        std::size_t index;
    };
    std::vector<Dip> dips;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (smooth[i] < smooth[i - 1] && smooth[i] <= smooth[i + 1]) {
            const double depth = 1.0 - smooth[i];
            if (depth > floor) dips.push_back({depth, i});
        }
    }
    std::sort(dips.begin(), dips.end(), [](const Dip& a, const Dip& b) {
        if (a.depth != b.depth) return a.depth > b.depth;
        return a.index < b.index;
    });

    // Deepest first, suppressing runners-up crowding an already-picked dip.
    const std::size_t exclusion = 3 * window;
    std::vector<std::size_t> picked;
    for (const Dip& d : dips) {
        if (picked.size() == n_peaks) break;
        bool crowded = false;
        for (std::size_t idx : picked) {
            const std::size_t gap = idx > d.index ? idx - d.index : d.index - idx;
            if (gap < exclusion) {
                crowded = true;
                break;
            }
        }
        if (!crowded) picked.push_back(d.index);
    }
    if (picked.size() < n_peaks)
        throw PeakDetectionFailed("detect_peaks: found " + std::to_string(picked.size()) +
                                  " dips, need " + std::to_string(n_peaks));
    std::sort(picked.begin(), picked.end());

    std::vector<double> steps(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        steps[i] = spectrum.frequency_hz[i + 1] - spectrum.frequency_hz[i];
    const double width_seed = 10.0 * median(std::move(steps));

    SpectrumModel guess;
    for (std::size_t idx : picked) {
        guess.peaks.push_back({spectrum.frequency_hz[idx], width_seed, 1.0 - smooth[idx]});
        guess.family_of_peak.push_back(-1);
    }
    return guess;
}

FitResult fit_spectrum(const Spectrum& spectrum, const FitOptions& options,
                       const SpectrumModel* initial_guess) {
    spectrum.validate();
    const std::size_t n = spectrum.frequency_hz.size();
    const std::size_t k = options.n_peaks;
    if (k == 0) throw std::invalid_argument("fit_spectrum: need at least one peak");
    if (n < 5 * k) throw std::invalid_argument("fit_spectrum: need at least 5 samples per peak");

    SpectrumModel seed = initial_guess ? *initial_guess : detect_peaks(spectrum, k);
    if (seed.peaks.size() != k)
        throw std::invalid_argument("fit_spectrum: initial guess has wrong peak count");

    const std::vector<double>& freq = spectrum.frequency_hz;
    const std::vector<double>& y = spectrum.normalized_pl;

    // Zero-width Lorentzians are singular at their center; keep widths a hair
    // above zero (far below the grid resolution, so it never binds a real fit).
    const double min_alpha = std::sqrt(0.01 * (freq[1] - freq[0]));

    WorkParams p;
    p.center.resize(k);
    p.alpha.resize(k);
    p.gamma.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        p.center[j] = seed.peaks[j].center_hz;
        p.alpha[j] = std::max(std::sqrt(std::max(seed.peaks[j].fwhm_hz, 0.0)), min_alpha);
        p.gamma[j] = std::sqrt(std::max(seed.peaks[j].contrast, 0.0));
    }

    const std::size_t dim = 3 * k;
    std::vector<double> fwhm(k), contrast(k), f, f_trial;
    eval_model(freq, p, fwhm, contrast, f);
    double ssr = ssr_of(y, f);

    // A perfect-model fit bottoms out at rounding debris instead of making
    // relative progress; anything this far below the data scale is converged.
    double ysq = 0.0;
    for (double v : y) ysq += v * v;
    const double ssr_floor = 1e-18 * ysq;

    Eigen::MatrixXd jac(n, dim);
    Eigen::VectorXd resid(n);
    const kernels::Table& kt = kernels::active_table();

    double lambda = 1e-3;
    bool converged = ssr <= ssr_floor;
    std::size_t iter = 0;
    WorkParams trial = p;

    for (; iter < options.max_iterations && !converged; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            double* dc = jac.col(3 * j).data();
            double* da = jac.col(3 * j + 1).data();
            double* dg = jac.col(3 * j + 2).data();
            kt.lorentzian_partials(freq.data(), n, p.center[j], fwhm[j], contrast[j], dc, da, dg);
            jac.col(3 * j + 1) *= 2.0 * p.alpha[j];
            jac.col(3 * j + 2) *= 2.0 * p.gamma[j];
        }
        for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - f[i];

        const Eigen::MatrixXd hess = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * resid;

        Eigen::VectorXd scale = hess.diagonal().cwiseSqrt();
        for (Eigen::Index i = 0; i < scale.size(); ++i)
            if (!(scale[i] > 0.0)) scale[i] = 1.0;

        Eigen::MatrixXd eq = hess;
        for (Eigen::Index r = 0; r < eq.rows(); ++r)
            for (Eigen::Index c = 0; c < eq.cols(); ++c) eq(r, c) /= scale[r] * scale[c];
        const Eigen::VectorXd geq = grad.cwiseQuotient(scale);

        bool accepted = false;
        while (!accepted && lambda < 1e16) {
            Eigen::MatrixXd damped = eq;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd step = damped.ldlt().solve(geq).cwiseQuotient(scale);

            for (std::size_t j = 0; j < k; ++j) {
                trial.center[j] = p.center[j] + step[3 * j];
                trial.alpha[j] = p.alpha[j] + step[3 * j + 1];
                trial.gamma[j] = p.gamma[j] + step[3 * j + 2];
                if (std::abs(trial.alpha[j]) < min_alpha) trial.alpha[j] = min_alpha;
            }
            eval_model(freq, trial, fwhm, contrast, f_trial);
            const double ssr_trial = ssr_of(y, f_trial);

            if (std::isfinite(ssr_trial) && ssr_trial < ssr) {
                accepted = true;
                std::swap(p, trial);
                std::swap(f, f_trial);
                if (ssr - ssr_trial < options.ssr_rel_tol * ssr) converged = true;
                ssr = ssr_trial;
                if (ssr <= ssr_floor) converged = true;
                lambda = std::max(lambda * 0.25, 1e-15);
            } else {
                lambda *= 4.0;
            }
        }
        if (!accepted) {
            if (ssr <= ssr_floor) converged = true;
            break;  // no improving step within damping range
        }
        // fwhm/contrast now hold the accepted trial's values
        for (std::size_t j = 0; j < k; ++j) {
            fwhm[j] = p.alpha[j] * p.alpha[j];
            contrast[j] = p.gamma[j] * p.gamma[j];
        }
    }
    if (!converged)
        throw FitNotConverged("fit_spectrum: no convergence after " + std::to_string(iter) +
                              " iterations (ssr " + std::to_string(ssr) + ")");

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p.center[a] < p.center[b]; });

    FitResult result;
    result.iterations = iter;
    result.ssr = ssr;
    result.residual_rms = std::sqrt(ssr / static_cast<double>(n));
    for (std::size_t j : order) {
        result.model.peaks.push_back({p.center[j], p.alpha[j] * p.alpha[j],
                                      p.gamma[j] * p.gamma[j]});
        result.model.family_of_peak.push_back(-1);
    }

    // Confidence intervals from the linearized covariance in the reported
    // (center, fwhm, contrast) parameter space, via a spectral pseudo-inverse
    // so nearly-degenerate peak overlaps cannot blow up the solve.
    for (std::size_t j = 0; j < k; ++j) {
        const LorentzianPeak& pk = result.model.peaks[j];
        kt.lorentzian_partials(freq.data(), n, pk.center_hz, pk.fwhm_hz, pk.contrast,
                               jac.col(3 * j).data(), jac.col(3 * j + 1).data(),
                               jac.col(3 * j + 2).data());
    }
    const Eigen::MatrixXd hess0 = jac.transpose() * jac;
    const double dof = static_cast<double>(n > dim ? n - dim : 1);
    const double var = ssr / dof;

    // Center and width columns are many orders of magnitude smaller than
    // contrast columns (slopes per Hz vs per unit depth), so equilibrate to
    // unit diagonal before the spectral cutoff; otherwise every center
    // direction looks degenerate.
    Eigen::VectorXd col_scale = hess0.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < col_scale.size(); ++i)
        if (!(col_scale[i] > 0.0)) col_scale[i] = 1.0;
    Eigen::MatrixXd eq0 = hess0;
    for (Eigen::Index r = 0; r < eq0.rows(); ++r)
        for (Eigen::Index c = 0; c < eq0.cols(); ++c) eq0(r, c) /= col_scale[r] * col_scale[c];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(eq0);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Eigen::MatrixXd& vec = es.eigenvectors();
    const double cutoff = ev.cwiseAbs().maxCoeff() * 1e-12;
    result.ci95_center_hz.resize(k);
    result.ci95_fwhm_hz.resize(k);
    result.ci95_contrast.resize(k);
    for (std::size_t j = 0; j < dim; ++j) {
        double diag = 0.0;
        for (std::size_t m = 0; m < dim; ++m)
            if (ev[m] > cutoff) diag += vec(j, m) * vec(j, m) / ev[m];
        const double ci = 1.96 * std::sqrt(var * diag) / col_scale[j];
        if (j % 3 == 0) result.ci95_center_hz[j / 3] = ci;
        else if (j % 3 == 1) result.ci95_fwhm_hz[j / 3] = ci;
        else result.ci95_contrast[j / 3] = ci;
    }
    return result;
}

}  // namespace odmrpol
