#include <cmath>

#include <doctest.h>

#include "odmrpol/optimize.hpp"

using namespace odmrpol;
using doctest::Approx;

namespace {

OptimizeOptions fast_options(double grid_deg, bool refine = true, int threads = 1) {
    OptimizeOptions options;
    options.grid_deg = grid_deg;
    options.refine = refine;
    options.threads = threads;
    return options;
}

bool same_optimum(const Optimum& a, const Optimum& b) {
    return a.value == b.value && a.grid_value == b.grid_value && a.n_l.x == b.n_l.x &&
           a.n_l.y == b.n_l.y && a.n_l.z == b.n_l.z && a.n_p.x == b.n_p.x &&
           a.n_p.y == b.n_p.y && a.n_p.z == b.n_p.z;
}

}  // namespace

TEST_CASE("unconstrained optima match the analytic values") {
    const auto families = canonical_families();

    const auto best_r = optimize_polarizations(families, FamilyLabel::B,
                                               OptimizeTarget::relative_contrast,
                                               OptimizeConstraint::unconstrained,
                                               fast_options(2.0));
    CHECK(best_r.value == Approx(0.625).epsilon(1e-3));
    CHECK(best_r.value >= best_r.grid_value);
    CHECK(best_r.family == FamilyLabel::B);
    CHECK(best_r.grid_deg == 2.0);
    const double n_l_norm = std::sqrt(best_r.n_l.x * best_r.n_l.x + best_r.n_l.y * best_r.n_l.y +
                                      best_r.n_l.z * best_r.n_l.z);
    CHECK(n_l_norm == Approx(1.0).epsilon(1e-9));

    const auto best_chi = optimize_polarizations(families, FamilyLabel::B, OptimizeTarget::chi,
                                                 OptimizeConstraint::unconstrained,
                                                 fast_options(2.0));
    CHECK(best_chi.value == Approx(0.78679862).epsilon(1e-4));
    CHECK(best_chi.value >= best_chi.grid_value);
}

TEST_CASE("grid refinement is monotone in the pitch") {
    const auto families = canonical_families();
    const auto coarse = optimize_polarizations(families, FamilyLabel::B,
                                               OptimizeTarget::relative_contrast,
                                               OptimizeConstraint::unconstrained,
                                               fast_options(4.0, false));
    const auto fine = optimize_polarizations(families, FamilyLabel::B,
                                             OptimizeTarget::relative_contrast,
                                             OptimizeConstraint::unconstrained,
                                             fast_options(2.0, false));
    // The 2 degree grid contains every 4 degree point.
    CHECK(fine.grid_value >= coarse.grid_value);
    // Without refinement the reported value is the grid value.
    CHECK(coarse.value == coarse.grid_value);
    CHECK(fine.value == fine.grid_value);
}

TEST_CASE("plane-constrained search reaches the same contrast optimum") {
    const auto families = canonical_families();
    const auto planes = optimize_polarizations(families, FamilyLabel::B,
                                               OptimizeTarget::relative_contrast,
                                               OptimizeConstraint::experiment_planes,
                                               fast_options(2.0));
    const auto free = optimize_polarizations(families, FamilyLabel::B,
                                             OptimizeTarget::relative_contrast,
                                             OptimizeConstraint::unconstrained,
                                             fast_options(2.0));
    CHECK(planes.value == Approx(0.625).epsilon(1e-3));
    // Both land on the shared optimum; refinement noise can put either a hair
    // ahead.
    CHECK(planes.value <= free.value + 1e-6);

    const auto planes_chi = optimize_polarizations(families, FamilyLabel::B, OptimizeTarget::chi,
                                                   OptimizeConstraint::experiment_planes,
                                                   fast_options(2.0));
    const auto free_chi = optimize_polarizations(families, FamilyLabel::B, OptimizeTarget::chi,
                                                 OptimizeConstraint::unconstrained,
                                                 fast_options(2.0));
    CHECK(planes_chi.value <= free_chi.value + 1e-6);
    CHECK(planes_chi.value >= 1.0 / 3.0);
}

TEST_CASE("optimization is deterministic and thread-count independent") {
    const auto families = canonical_families();
    const auto a = optimize_polarizations(families, FamilyLabel::D,
                                          OptimizeTarget::relative_contrast,
                                          OptimizeConstraint::unconstrained, fast_options(2.0));
    const auto b = optimize_polarizations(families, FamilyLabel::D,
                                          OptimizeTarget::relative_contrast,
                                          OptimizeConstraint::unconstrained, fast_options(2.0));
    CHECK(same_optimum(a, b));

    const auto threaded = optimize_polarizations(families, FamilyLabel::D,
                                                 OptimizeTarget::relative_contrast,
                                                 OptimizeConstraint::unconstrained,
                                                 fast_options(2.0, true, 3));
    CHECK(same_optimum(a, threaded));
}

TEST_CASE("baseline values and improvement ratios") {
    const auto families = canonical_families();
    for (auto family : all_families) {
        CHECK(baseline_polarization_value(families, family, OptimizeTarget::relative_contrast) ==
              Approx(0.25).epsilon(1e-12));
        CHECK(baseline_polarization_value(families, family, OptimizeTarget::chi) ==
              Approx(1.0 / 3.0).epsilon(1e-12));
    }

    const auto baseline =
        family_weights({}, families, UnitVec3(0, 1, 0), UnitVec3(0, 0, 1));

    const auto best_r = optimize_polarizations(families, FamilyLabel::B,
                                               OptimizeTarget::relative_contrast,
                                               OptimizeConstraint::unconstrained,
                                               fast_options(2.0));
    CHECK(improvement_report(best_r, baseline) == Approx(2.5).epsilon(5e-3));

    const auto best_chi = optimize_polarizations(families, FamilyLabel::B, OptimizeTarget::chi,
                                                 OptimizeConstraint::unconstrained,
                                                 fast_options(2.0));
    CHECK(improvement_report(best_chi, baseline) == Approx(2.360396).epsilon(1e-3));

    FamilyWeights broken = baseline;
    broken.relative_contribution[1] = 0.0;
    CHECK_THROWS_AS(improvement_report(best_r, broken), std::invalid_argument);
}

TEST_CASE("objective evaluation matches the family weights") {
    const auto families = canonical_families();
    const UnitVec3 n_l(0, 1, 0), n_p(0, 0, 1);
    const auto weights = family_weights({}, families, n_l, n_p);
    for (auto family : all_families) {
        const int f = static_cast<int>(family);
        CHECK(polarization_objective(families, family, OptimizeTarget::relative_contrast, n_l,
                                     n_p) == Approx(weights.relative_contribution[f]).epsilon(1e-12));
        CHECK(polarization_objective(families, family, OptimizeTarget::chi, n_l, n_p) ==
              Approx(weights.chi[f]).epsilon(1e-12));
    }

    // Polarization directions are axes: flipping either one changes nothing.
    const UnitVec3 n_l2(0.3, -0.4, 0.5), n_p2(-0.2, 0.9, 0.1);
    const double direct = polarization_objective(families, FamilyLabel::C, OptimizeTarget::chi,
                                                 n_l2, n_p2);
    CHECK(polarization_objective(families, FamilyLabel::C, OptimizeTarget::chi, -n_l2, n_p2) ==
          direct);
    CHECK(polarization_objective(families, FamilyLabel::C, OptimizeTarget::chi, n_l2, -n_p2) ==
          direct);
}

TEST_CASE("optimizer options are validated") {
    const auto families = canonical_families();
    for (auto break_options : {+[](OptimizeOptions& o) { o.grid_deg = 0.0; },
                               +[](OptimizeOptions& o) { o.grid_deg = 5.0; },
                               +[](OptimizeOptions& o) { o.threads = 0; },
                               +[](OptimizeOptions& o) { o.refine_tol_rad = 0.0; }}) {
        OptimizeOptions options;
        break_options(options);
        CHECK_THROWS_AS(optimize_polarizations(families, FamilyLabel::A,
                                               OptimizeTarget::relative_contrast,
                                               OptimizeConstraint::unconstrained, options),
                        std::invalid_argument);
    }
}
