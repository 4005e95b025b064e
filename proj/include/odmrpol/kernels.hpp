#pragma once

#include <cstddef>
#include <string_view>

namespace odmrpol::kernels {

// Batched inner loops behind function-pointer tables. scalar_table() is the
// reference; avx2_table() is a vectorized variant available on capable x86-64
// hosts. Both variants use the same exactly-rounded mul/add/div sequences and
// no FMA contraction, so their outputs are bitwise identical; the dispatch can
// therefore be decided at runtime without changing results.

// Best element of a scan, kept as the fraction that was compared so callers
// can recover the objective without losing the tie-break semantics.
struct BestEntry {
    double num = 0.0;
    double den = 1.0;
    std::size_t index = 0;
};

struct Table {
    const char* name;

    // out[i] = 1 - sum_k contrast[k] * h_k / (h_k + (freq[i] - center[k])^2)
    // with h_k = (fwhm[k]/2)^2.
    void (*lorentzian_sum)(const double* freq, std::size_t n, const double* center,
                           const double* fwhm, const double* contrast, std::size_t n_peaks,
                           double* out);

    // Partial derivatives of lorentzian_sum with respect to one peak's
    // parameters, written to three arrays of length n.
    void (*lorentzian_partials)(const double* freq, std::size_t n, double center, double fwhm,
                                double contrast, double* d_center, double* d_fwhm,
                                double* d_contrast);

    // out[i] = 1 - (x[i]*ax + y[i]*ay + z[i]*az)^2
    void (*transverse_weight)(const double* x, const double* y, const double* z, std::size_t n,
                              double ax, double ay, double az, double* out);

    // out[i] = 1 - (c[i]*a + s[i]*b)^2
    void (*transverse_weight_angles)(const double* c, const double* s, std::size_t n, double a,
                                     double b, double* out);

    // argmax over j of (p[fam] * i_fam[j]) / (p0*i0[j] + p1*i1[j] + p2*i2[j] + p3*i3[j]).
    // Inputs must be non-negative with every denominator positive.
    // Comparisons are done by cross multiplication; the first maximizer wins.
    BestEntry (*best_share)(const double* i0, const double* i1, const double* i2, const double* i3,
                            std::size_t n, const double* p, int fam);

    // Same scan but maximizing num / sqrt(den).
    BestEntry (*best_share_chi)(const double* i0, const double* i1, const double* i2,
                                const double* i3, std::size_t n, const double* p, int fam);
};

const Table& scalar_table();

// nullptr when the build target or the running CPU lacks AVX2.
const Table* avx2_table();

// Table used by the library. Picked once: the ODMRPOL_KERNELS environment
// variable ("scalar", "avx2", "auto") wins, otherwise the best available.
const Table& active_table();

// Programmatic override, mainly for tests. Returns false (and keeps the
// current selection) if the requested variant is unavailable.
bool select_table(std::string_view name);

}  // namespace odmrpol::kernels
