#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include <doctest.h>

#include "odmrpol/kernels.hpp"

using namespace odmrpol;
using doctest::Approx;

namespace {

const std::vector<std::size_t> sizes = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 64, 100, 1000, 1001};

std::vector<double> uniform_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

// Coarsely quantized positives: many exact ties across entries.
std::vector<double> quantized_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> d(1, 5);
    std::vector<double> v(n);
    for (double& x : v) x = 0.125 * d(rng);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar lorentzian_sum matches the closed form") {
    const auto& table = kernels::scalar_table();
    const double center[2] = {2.85e9, 2.89e9};
    const double fwhm[2] = {1e7, 2e7};
    const double contrast[2] = {0.02, 0.04};
    const double freq[3] = {2.85e9, 2.87e9, 3.2e9};
    double out[3];
    table.lorentzian_sum(freq, 3, center, fwhm, contrast, 2, out);
    for (int i = 0; i < 3; ++i) {
        double expect = 1.0;
        for (int k = 0; k < 2; ++k) {
            const double h = 0.25 * fwhm[k] * fwhm[k];
            const double d = freq[i] - center[k];
            expect -= contrast[k] * h / (h + d * d);
        }
        CHECK(out[i] == Approx(expect).epsilon(1e-14));
    }
    // An isolated peak's center samples at 1 - c.
    double one;
    table.lorentzian_sum(center, 1, center, fwhm, contrast, 1, &one);
    CHECK(one == Approx(1.0 - contrast[0]).epsilon(1e-12));
}

TEST_CASE("scalar lorentzian_partials match finite differences") {
    const auto& table = kernels::scalar_table();
    const double center = 2.87e9, fwhm = 1.2e7, contrast = 0.03;
    std::vector<double> freq;
    for (int i = -40; i <= 40; ++i) freq.push_back(center + i * 1.1e6 + 3e5);
    const std::size_t n = freq.size();
    std::vector<double> dc(n), dw(n), da(n);
    table.lorentzian_partials(freq.data(), n, center, fwhm, contrast, dc.data(), dw.data(),
                              da.data());

    auto eval = [&](double c0, double w0, double a0, double f) {
        const double h = 0.25 * w0 * w0;
        const double d = f - c0;
        return 1.0 - a0 * h / (h + d * d);
    };
    for (std::size_t i = 0; i < n; i += 7) {
        const double f = freq[i];
        const double dc_num = (eval(center + 1.0, fwhm, contrast, f) -
                               eval(center - 1.0, fwhm, contrast, f)) / 2.0;
        const double dw_num = (eval(center, fwhm + 1.0, contrast, f) -
                               eval(center, fwhm - 1.0, contrast, f)) / 2.0;
        const double da_num = (eval(center, fwhm, contrast + 1e-6, f) -
                               eval(center, fwhm, contrast - 1e-6, f)) / 2e-6;
        CHECK(dc[i] == Approx(dc_num).scale(1e-9).epsilon(1e-5));
        CHECK(dw[i] == Approx(dw_num).scale(1e-9).epsilon(1e-5));
        CHECK(da[i] == Approx(da_num).scale(1e-3).epsilon(1e-7));
    }
}

TEST_CASE("scalar transverse weights match the dot-product form") {
    const auto& table = kernels::scalar_table();
    std::mt19937_64 rng(21);
    const auto x = uniform_vec(rng, 64, -1.0, 1.0);
    const auto y = uniform_vec(rng, 64, -1.0, 1.0);
    const auto z = uniform_vec(rng, 64, -1.0, 1.0);
    std::vector<double> out(64);
    const double ax = 0.3, ay = -0.5, az = 0.81;
    table.transverse_weight(x.data(), y.data(), z.data(), 64, ax, ay, az, out.data());
    for (std::size_t i = 0; i < 64; ++i) {
        const double c = x[i] * ax + y[i] * ay + z[i] * az;
        CHECK(out[i] == Approx(1.0 - c * c).scale(1.0).epsilon(1e-14));
    }

    std::vector<double> out2(64);
    table.transverse_weight_angles(x.data(), y.data(), 64, 0.7, -0.2, out2.data());
    for (std::size_t i = 0; i < 64; ++i) {
        const double c = x[i] * 0.7 + y[i] * (-0.2);
        CHECK(out2[i] == Approx(1.0 - c * c).scale(1.0).epsilon(1e-14));
    }
}

TEST_CASE("scalar best_share picks the first maximizer") {
    const auto& table = kernels::scalar_table();
    // Family 1 shares: equal maxima at indices 1 and 3.
    const double i0[4] = {1.0, 0.5, 1.0, 0.5};
    const double i1[4] = {0.5, 1.0, 0.5, 1.0};
    const double i2[4] = {1.0, 0.5, 1.0, 0.5};
    const double i3[4] = {0.5, 1.0, 0.5, 1.0};
    const double p[4] = {1.0, 1.0, 1.0, 1.0};
    const auto best = table.best_share(i0, i1, i2, i3, 4, p, 1);
    CHECK(best.index == 1);
    CHECK(best.num == 1.0);
    CHECK(best.den == 3.0);

    const auto best0 = table.best_share(i0, i1, i2, i3, 0, p, 1);
    CHECK(best0.index == 0);
}

TEST_CASE("chi scan can prefer a different entry than the share scan") {
    const auto& table = kernels::scalar_table();
    // Entry 0: num 1, den 1 -> R = 1, chi = 1.
    // Entry 1: num 2, den 3 -> R = 0.667, chi = 1.155.
    const double i0[2] = {0.0, 1.0};
    const double i1[2] = {1.0, 2.0};
    const double z[2] = {0.0, 0.0};
    const double p[4] = {1.0, 1.0, 0.0, 0.0};
    CHECK(table.best_share(i0, i1, z, z, 2, p, 1).index == 0);
    CHECK(table.best_share_chi(i0, i1, z, z, 2, p, 1).index == 1);
}

TEST_CASE("best_share agrees with a sequential reference scan") {
    const auto& table = kernels::scalar_table();
    std::mt19937_64 rng(22);
    for (std::size_t n : sizes) {
        const auto i0 = uniform_vec(rng, n, 0.0, 1.0);
        const auto i1 = uniform_vec(rng, n, 0.0, 1.0);
        const auto i2 = uniform_vec(rng, n, 0.0, 1.0);
        const auto i3 = uniform_vec(rng, n, 0.0, 1.0);
        const double p[4] = {0.9, 0.7, 0.5, 0.3};
        for (int fam = 0; fam < 4; ++fam) {
            const double* ii[4] = {i0.data(), i1.data(), i2.data(), i3.data()};
            std::size_t want = 0;
            double bn = p[fam] * ii[fam][0];
            double bd = p[0] * i0[0] + p[1] * i1[0] + p[2] * i2[0] + p[3] * i3[0];
            for (std::size_t j = 1; j < n; ++j) {
                const double num = p[fam] * ii[fam][j];
                const double den = p[0] * i0[j] + p[1] * i1[j] + p[2] * i2[j] + p[3] * i3[j];
                if (num * bd > bn * den) {
                    bn = num;
                    bd = den;
                    want = j;
                }
            }
            const auto best = table.best_share(i0.data(), i1.data(), i2.data(), i3.data(), n, p,
                                               fam);
            CHECK(best.index == want);
            CHECK(best.num == bn);
            CHECK(best.den == bd);
        }
    }
}

TEST_CASE("avx2 kernels are bitwise identical to the scalar reference") {
    const kernels::Table* avx2 = kernels::avx2_table();
    if (avx2 == nullptr) return;  // host without AVX2: nothing to compare
    const auto& scalar = kernels::scalar_table();
    std::mt19937_64 rng(23);

    for (std::size_t n : sizes) {
        // lorentzian_sum / partials over a frequency-like grid
        auto freq = uniform_vec(rng, n, 2.7e9, 3.0e9);
        const auto center = uniform_vec(rng, 8, 2.75e9, 2.95e9);
        const auto fwhm = uniform_vec(rng, 8, 5e6, 2e7);
        const auto contrast = uniform_vec(rng, 8, 0.005, 0.05);
        std::vector<double> a(n), b(n);
        scalar.lorentzian_sum(freq.data(), n, center.data(), fwhm.data(), contrast.data(), 8,
                              a.data());
        avx2->lorentzian_sum(freq.data(), n, center.data(), fwhm.data(), contrast.data(), 8,
                             b.data());
        CHECK(bitwise_equal(a, b));

        std::vector<double> a1(n), a2(n), a3(n), b1(n), b2(n), b3(n);
        scalar.lorentzian_partials(freq.data(), n, center[0], fwhm[0], contrast[0], a1.data(),
                                   a2.data(), a3.data());
        avx2->lorentzian_partials(freq.data(), n, center[0], fwhm[0], contrast[0], b1.data(),
                                  b2.data(), b3.data());
        CHECK(bitwise_equal(a1, b1));
        CHECK(bitwise_equal(a2, b2));
        CHECK(bitwise_equal(a3, b3));

        // transverse weights over direction-like data
        const auto x = uniform_vec(rng, n, -1.0, 1.0);
        const auto y = uniform_vec(rng, n, -1.0, 1.0);
        const auto z = uniform_vec(rng, n, -1.0, 1.0);
        scalar.transverse_weight(x.data(), y.data(), z.data(), n, 0.577, -0.577, 0.577, a.data());
        avx2->transverse_weight(x.data(), y.data(), z.data(), n, 0.577, -0.577, 0.577, b.data());
        CHECK(bitwise_equal(a, b));
        scalar.transverse_weight_angles(x.data(), y.data(), n, 0.31, 0.95, a.data());
        avx2->transverse_weight_angles(x.data(), y.data(), n, 0.31, 0.95, b.data());
        CHECK(bitwise_equal(a, b));
    }
}

TEST_CASE("avx2 scans match the scalar scans exactly, ties included") {
    const kernels::Table* avx2 = kernels::avx2_table();
    if (avx2 == nullptr) return;
    const auto& scalar = kernels::scalar_table();
    std::mt19937_64 rng(24);

    for (std::size_t n : sizes) {
        for (int variant = 0; variant < 3; ++variant) {
            std::vector<double> i0, i1, i2, i3;
            if (variant == 0) {
                i0 = uniform_vec(rng, n, 0.0, 1.0);
                i1 = uniform_vec(rng, n, 0.0, 1.0);
                i2 = uniform_vec(rng, n, 0.0, 1.0);
                i3 = uniform_vec(rng, n, 0.0, 1.0);
            } else if (variant == 1) {
                i0 = quantized_vec(rng, n);
                i1 = quantized_vec(rng, n);
                i2 = quantized_vec(rng, n);
                i3 = quantized_vec(rng, n);
            } else {
                i0.assign(n, 0.75);  // all entries tie
                i1.assign(n, 0.5);
                i2.assign(n, 0.25);
                i3.assign(n, 1.0);
            }
            const double p[4] = {0.8, 0.6, 0.4, 0.2};
            for (int fam = 0; fam < 4; ++fam) {
                const auto s = scalar.best_share(i0.data(), i1.data(), i2.data(), i3.data(), n, p,
                                                 fam);
                const auto v = avx2->best_share(i0.data(), i1.data(), i2.data(), i3.data(), n, p,
                                                fam);
                CHECK(s.index == v.index);
                CHECK(s.num == v.num);
                CHECK(s.den == v.den);
                const auto sc = scalar.best_share_chi(i0.data(), i1.data(), i2.data(), i3.data(),
                                                      n, p, fam);
                const auto vc = avx2->best_share_chi(i0.data(), i1.data(), i2.data(), i3.data(),
                                                     n, p, fam);
                CHECK(sc.index == vc.index);
                CHECK(sc.num == vc.num);
                CHECK(sc.den == vc.den);
            }
        }
    }
}

TEST_CASE("kernel table selection") {
    CHECK(kernels::scalar_table().name == std::string("scalar"));
    CHECK(kernels::select_table("scalar"));
    CHECK(kernels::active_table().name == std::string("scalar"));
    CHECK_FALSE(kernels::select_table("never-heard-of-it"));
    CHECK(kernels::active_table().name == std::string("scalar"));

    if (kernels::avx2_table() != nullptr) {
        CHECK(kernels::avx2_table()->name == std::string("avx2"));
        CHECK(kernels::select_table("avx2"));
        CHECK(kernels::active_table().name == std::string("avx2"));
        CHECK(kernels::select_table("auto"));
        CHECK(kernels::active_table().name == std::string("avx2"));
    } else {
        CHECK_FALSE(kernels::select_table("avx2"));
        CHECK(kernels::select_table("auto"));
        CHECK(kernels::active_table().name == std::string("scalar"));
    }
}
