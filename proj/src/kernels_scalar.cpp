#include "odmrpol/kernels.hpp"

// Reference implementations. The AVX2 variants mirror these operation
// sequences lane for lane; any change here must be mirrored there or the
// bitwise-equivalence tests will fail.

namespace odmrpol::kernels {
namespace {

void lorentzian_sum_scalar(const double* freq, std::size_t n, const double* center,
                           const double* fwhm, const double* contrast, std::size_t n_peaks,
                           double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double f = freq[i];
        double acc = 1.0;
        for (std::size_t k = 0; k < n_peaks; ++k) {
            const double half = 0.5 * fwhm[k];
            const double h = half * half;
            const double d = f - center[k];
            acc -= (contrast[k] * h) / (h + d * d);
        }
        out[i] = acc;
    }
}

void lorentzian_partials_scalar(const double* freq, std::size_t n, double center, double fwhm,
                                double contrast, double* d_center, double* d_fwhm,
                                double* d_contrast) {
    const double half = 0.5 * fwhm;
    const double h = half * half;
    const double two_c = 2.0 * contrast;
    const double half_c = contrast * half;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = freq[i] - center;
        const double q = 1.0 / (h + d * d);
        const double hq = h * q;
        const double u = hq * q;
        const double w = d * q;
        d_contrast[i] = -hq;
        d_center[i] = -((two_c * d) * u);
        d_fwhm[i] = -((half_c * w) * w);
    }
}

void transverse_weight_scalar(const double* x, const double* y, const double* z, std::size_t n,
                              double ax, double ay, double az, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (x[i] * ax + y[i] * ay) + z[i] * az;
        out[i] = 1.0 - t * t;
    }
}

void transverse_weight_angles_scalar(const double* c, const double* s, std::size_t n, double a,
                                     double b, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = c[i] * a + s[i] * b;
        out[i] = 1.0 - t * t;
    }
}

inline double share_den(const double* i0, const double* i1, const double* i2, const double* i3,
                        const double* p, std::size_t j) {
    return ((p[0] * i0[j] + p[1] * i1[j]) + p[2] * i2[j]) + p[3] * i3[j];
}

BestEntry best_share_scalar(const double* i0, const double* i1, const double* i2, const double* i3,
                            std::size_t n, const double* p, int fam) {
    if (n == 0) return {};
    const double* ifam = (fam == 0) ? i0 : (fam == 1) ? i1 : (fam == 2) ? i2 : i3;
    const double pf = p[fam];
    BestEntry best{pf * ifam[0], share_den(i0, i1, i2, i3, p, 0), 0};
    for (std::size_t j = 1; j < n; ++j) {
        const double den = share_den(i0, i1, i2, i3, p, j);
        const double num = pf * ifam[j];
        if (num * best.den > best.num * den) best = {num, den, j};
    }
    return best;
}

BestEntry best_share_chi_scalar(const double* i0, const double* i1, const double* i2,
                                const double* i3, std::size_t n, const double* p, int fam) {
    if (n == 0) return {};
    const double* ifam = (fam == 0) ? i0 : (fam == 1) ? i1 : (fam == 2) ? i2 : i3;
    const double pf = p[fam];
    BestEntry best{pf * ifam[0], share_den(i0, i1, i2, i3, p, 0), 0};
    for (std::size_t j = 1; j < n; ++j) {
        const double den = share_den(i0, i1, i2, i3, p, j);
        const double num = pf * ifam[j];
        if ((num * num) * best.den > (best.num * best.num) * den) best = {num, den, j};
    }
    return best;
}

const Table table = {
    "scalar",
    &lorentzian_sum_scalar,
    &lorentzian_partials_scalar,
    &transverse_weight_scalar,
    &transverse_weight_angles_scalar,
    &best_share_scalar,
    &best_share_chi_scalar,
};

}  // namespace

const Table& scalar_table() { return table; }

}  // namespace odmrpol::kernels
