#include "odmrpol/kernels.hpp"

// AVX2 variants of the scalar reference kernels. Only exactly-rounded lane
// operations are used (mul/add/sub/div, sign flips), in the same order as the
// scalar code and without FMA, so results are bitwise identical per element.
// The argmax scans test whole blocks against the best-so-far with a vector
// compare; a stale best can only widen the candidate set, and candidates are
// re-tested sequentially with the scalar rule, so tie-breaks match too.

#if defined(__AVX2__) && defined(__x86_64__)

#include <immintrin.h>

namespace odmrpol::kernels {
namespace {

inline __m256d negate(__m256d v) {
    return _mm256_xor_pd(v, _mm256_set1_pd(-0.0));
}

void lorentzian_sum_avx2(const double* freq, std::size_t n, const double* center,
                         const double* fwhm, const double* contrast, std::size_t n_peaks,
                         double* out) {
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d f = _mm256_loadu_pd(freq + i);
        __m256d acc = _mm256_set1_pd(1.0);
        for (std::size_t k = 0; k < n_peaks; ++k) {
            const double half = 0.5 * fwhm[k];
            const double h = half * half;
            const __m256d d = _mm256_sub_pd(f, _mm256_set1_pd(center[k]));
            const __m256d den = _mm256_add_pd(_mm256_set1_pd(h), _mm256_mul_pd(d, d));
            acc = _mm256_sub_pd(acc, _mm256_div_pd(_mm256_set1_pd(contrast[k] * h), den));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (std::size_t i = n4; i < n; ++i) {
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

void lorentzian_partials_avx2(const double* freq, std::size_t n, double center, double fwhm,
                              double contrast, double* d_center, double* d_fwhm,
                              double* d_contrast) {
    const double half = 0.5 * fwhm;
    const double h = half * half;
    const double two_c = 2.0 * contrast;
    const double half_c = contrast * half;
    const __m256d cv = _mm256_set1_pd(center);
    const __m256d hv = _mm256_set1_pd(h);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two_cv = _mm256_set1_pd(two_c);
    const __m256d half_cv = _mm256_set1_pd(half_c);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d f = _mm256_loadu_pd(freq + i);
        const __m256d d = _mm256_sub_pd(f, cv);
        const __m256d q = _mm256_div_pd(one, _mm256_add_pd(hv, _mm256_mul_pd(d, d)));
        const __m256d hq = _mm256_mul_pd(hv, q);
        const __m256d u = _mm256_mul_pd(hq, q);
        const __m256d w = _mm256_mul_pd(d, q);
        _mm256_storeu_pd(d_contrast + i, negate(hq));
        _mm256_storeu_pd(d_center + i, negate(_mm256_mul_pd(_mm256_mul_pd(two_cv, d), u)));
        _mm256_storeu_pd(d_fwhm + i, negate(_mm256_mul_pd(_mm256_mul_pd(half_cv, w), w)));
    }
    for (std::size_t i = n4; i < n; ++i) {
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

void transverse_weight_avx2(const double* x, const double* y, const double* z, std::size_t n,
                            double ax, double ay, double az, double* out) {
    const __m256d axv = _mm256_set1_pd(ax);
    const __m256d ayv = _mm256_set1_pd(ay);
    const __m256d azv = _mm256_set1_pd(az);
    const __m256d one = _mm256_set1_pd(1.0);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d t =
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(x + i), axv),
                                        _mm256_mul_pd(_mm256_loadu_pd(y + i), ayv)),
                          _mm256_mul_pd(_mm256_loadu_pd(z + i), azv));
        _mm256_storeu_pd(out + i, _mm256_sub_pd(one, _mm256_mul_pd(t, t)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        const double t = (x[i] * ax + y[i] * ay) + z[i] * az;
        out[i] = 1.0 - t * t;
    }
}

void transverse_weight_angles_avx2(const double* c, const double* s, std::size_t n, double a,
                                   double b, double* out) {
    const __m256d av = _mm256_set1_pd(a);
    const __m256d bv = _mm256_set1_pd(b);
    const __m256d one = _mm256_set1_pd(1.0);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d t = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(c + i), av),
                                        _mm256_mul_pd(_mm256_loadu_pd(s + i), bv));
        _mm256_storeu_pd(out + i, _mm256_sub_pd(one, _mm256_mul_pd(t, t)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        const double t = c[i] * a + s[i] * b;
        out[i] = 1.0 - t * t;
    }
}

inline double share_den(const double* i0, const double* i1, const double* i2, const double* i3,
                        const double* p, std::size_t j) {
    return ((p[0] * i0[j] + p[1] * i1[j]) + p[2] * i2[j]) + p[3] * i3[j];
}

template <bool Chi>
BestEntry best_share_impl(const double* i0, const double* i1, const double* i2, const double* i3,
                          std::size_t n, const double* p, int fam) {
    if (n == 0) return {};
    const double* ifam = (fam == 0) ? i0 : (fam == 1) ? i1 : (fam == 2) ? i2 : i3;
    const double pf = p[fam];
    BestEntry best{pf * ifam[0], share_den(i0, i1, i2, i3, p, 0), 0};

    const __m256d p0 = _mm256_set1_pd(p[0]);
    const __m256d p1 = _mm256_set1_pd(p[1]);
    const __m256d p2 = _mm256_set1_pd(p[2]);
    const __m256d p3 = _mm256_set1_pd(p[3]);
    const __m256d pfv = _mm256_set1_pd(pf);
    const __m256d slack = _mm256_set1_pd(1.0 - 1e-9);
    __m256d best_num = _mm256_set1_pd(Chi ? best.num * best.num : best.num);
    __m256d best_den = _mm256_set1_pd(best.den);

    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t j = 0; j < n4; j += 4) {
        const __m256d den = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(p0, _mm256_loadu_pd(i0 + j)),
                                        _mm256_mul_pd(p1, _mm256_loadu_pd(i1 + j))),
                          _mm256_mul_pd(p2, _mm256_loadu_pd(i2 + j))),
            _mm256_mul_pd(p3, _mm256_loadu_pd(i3 + j)));
        const __m256d num = _mm256_mul_pd(pfv, _mm256_loadu_pd(ifam + j));
        const __m256d lhs = Chi ? _mm256_mul_pd(_mm256_mul_pd(num, num), best_den)
                                : _mm256_mul_pd(num, best_den);
        // Slightly shrunk threshold: the block is screened against the best
        // from before the block, so near-ties must fall through to the exact
        // sequential re-test below rather than be rejected here.
        const __m256d rhs = _mm256_mul_pd(_mm256_mul_pd(best_num, den), slack);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(lhs, rhs, _CMP_GT_OQ));
        if (mask == 0) continue;

        alignas(32) double nums[4];
        alignas(32) double dens[4];
        _mm256_store_pd(nums, num);
        _mm256_store_pd(dens, den);
        bool changed = false;
        for (int lane = 0; lane < 4; ++lane) {
            if (!(mask & (1 << lane))) continue;
            const bool better = Chi ? (nums[lane] * nums[lane]) * best.den >
                                          (best.num * best.num) * dens[lane]
                                    : nums[lane] * best.den > best.num * dens[lane];
            if (better) {
                best = {nums[lane], dens[lane], j + static_cast<std::size_t>(lane)};
                changed = true;
            }
        }
        if (changed) {
            best_num = _mm256_set1_pd(Chi ? best.num * best.num : best.num);
            best_den = _mm256_set1_pd(best.den);
        }
    }
    for (std::size_t j = n4; j < n; ++j) {
        const double den = share_den(i0, i1, i2, i3, p, j);
        const double num = pf * ifam[j];
        const bool better = Chi ? (num * num) * best.den > (best.num * best.num) * den
                                : num * best.den > best.num * den;
        if (better) best = {num, den, j};
    }
    return best;
}

BestEntry best_share_avx2(const double* i0, const double* i1, const double* i2, const double* i3,
                          std::size_t n, const double* p, int fam) {
    return best_share_impl<false>(i0, i1, i2, i3, n, p, fam);
}

BestEntry best_share_chi_avx2(const double* i0, const double* i1, const double* i2,
                              const double* i3, std::size_t n, const double* p, int fam) {
    return best_share_impl<true>(i0, i1, i2, i3, n, p, fam);
}

const Table table = {
    "avx2",
    &lorentzian_sum_avx2,
    &lorentzian_partials_avx2,
    &transverse_weight_avx2,
    &transverse_weight_angles_avx2,
    &best_share_avx2,
    &best_share_chi_avx2,
};

}  // namespace

const Table* avx2_table() {
    return __builtin_cpu_supports("avx2") ? &table : nullptr;
}

}  // namespace odmrpol::kernels

#else

namespace odmrpol::kernels {

const Table* avx2_table() { return nullptr; }

}  // namespace odmrpol::kernels

#endif
