#include "odmrpol/photophysics.hpp"

#include <cmath>

namespace odmrpol {

void PhotophysicsParams::validate() const {
    if (!(pl_on > 0.0) || !(pl_on < pl_off))
        throw std::invalid_argument("photophysics: need 0 < pl_on < pl_off");
    if (!(ensemble_size > 0.0))
        throw std::invalid_argument("photophysics: ensemble_size must be positive");
    if (!(collection_efficiency > 0.0) || collection_efficiency > 1.0)
        throw std::invalid_argument("photophysics: collection_efficiency must be in (0, 1]");
}

double excitation_probability(const UnitVec3& axis, const UnitVec3& n_l) {
    const double t = dot(axis.vec(), n_l.vec());
    return 1.0 - t * t;
}

double polarized_emission_intensity(const UnitVec3& axis, const UnitVec3& n_p) {
    const double t = dot(axis.vec(), n_p.vec());
    return 1.0 - t * t;
}

double dipole_far_field_intensity(const UnitVec3& dipole, const UnitVec3& observation_dir) {
    const double t = dot(dipole.vec(), observation_dir.vec());
    return 1.0 - t * t;
}

double detected_pl(const PhotophysicsParams& params, const std::array<NVFamily, 4>& families,
                   const UnitVec3& n_l, const UnitVec3& n_p) {
    params.validate();
    double wsum = 0.0;
    for (const NVFamily& f : families)
        wsum += excitation_probability(f.axis, n_l) * polarized_emission_intensity(f.axis, n_p);
    return params.pl_scale() * wsum;
}

FamilyWeights family_weights(const PhotophysicsParams& params,
                             const std::array<NVFamily, 4>& families, const UnitVec3& n_l,
                             const UnitVec3& n_p) {
    params.validate();
    FamilyWeights w;
    double wsum = 0.0;
    std::array<double, 4> pi_prod{};
    for (int i = 0; i < 4; ++i) {
        w.excitation[i] = excitation_probability(families[i].axis, n_l);
        w.emission[i] = polarized_emission_intensity(families[i].axis, n_p);
        pi_prod[i] = w.excitation[i] * w.emission[i];
        wsum += pi_prod[i];
    }
    if (!(wsum > 0.0))
        throw DegenerateConfiguration();

    const double contrast_scale = 1.0 - params.pl_on / params.pl_off;
    const double root_wsum = std::sqrt(wsum);
    w.s0 = params.pl_scale() * wsum;
    const double root_s0 = std::sqrt(w.s0);
    for (int i = 0; i < 4; ++i) {
        w.relative_contribution[i] = pi_prod[i] / wsum;
        w.contrast[i] = w.relative_contribution[i] * contrast_scale;
        w.chi[i] = w.relative_contribution[i] * root_wsum;
        w.rho[i] = w.contrast[i] * root_s0;
    }
    return w;
}

}  // namespace odmrpol
