#include "odmrpol/geometry.hpp"

#include <cmath>
#include <numbers>

namespace odmrpol {

const char* family_name(FamilyLabel label) {
    switch (label) {
        case FamilyLabel::A: return "A";
        case FamilyLabel::B: return "B";
        case FamilyLabel::C: return "C";
        case FamilyLabel::D: return "D";
    }
    throw std::invalid_argument("family_name: bad label");
}

FamilyLabel parse_family(const std::string& name) {
    if (name == "A") return FamilyLabel::A;
    if (name == "B") return FamilyLabel::B;
    if (name == "C") return FamilyLabel::C;
    if (name == "D") return FamilyLabel::D;
    throw std::invalid_argument("unknown family: " + name);
}

namespace {

NVFamily make_family(FamilyLabel label, const Vec3& axis_dir) {
    UnitVec3 axis(axis_dir);
    UnitVec3 d1(cross(axis.vec(), Vec3{0.0, 0.0, 1.0}));
    UnitVec3 d2(cross(axis.vec(), d1.vec()));
    return {label, axis, d1, d2};
}

}  // namespace

std::array<NVFamily, 4> canonical_families() {
    return {make_family(FamilyLabel::A, {1.0, 1.0, 1.0}),
            make_family(FamilyLabel::B, {1.0, -1.0, -1.0}),
            make_family(FamilyLabel::C, {-1.0, -1.0, 1.0}),
            make_family(FamilyLabel::D, {-1.0, 1.0, -1.0})};
}

PolarizationPlane::PolarizationPlane(const UnitVec3& normal_axis, const UnitVec3& angle_zero)
    : normal(normal_axis), e1(angle_zero), e2(cross(normal_axis.vec(), angle_zero.vec())) {
    if (std::abs(dot(normal.vec(), e1.vec())) > 1e-9)
        throw std::invalid_argument("PolarizationPlane: angle zero not perpendicular to normal");
}

PolarizationPlane collection_plane() {
    return {UnitVec3(0.0, 0.0, 1.0), UnitVec3(0.0, 1.0, 0.0)};
}

PolarizationPlane laser_plane() {
    return {UnitVec3(1.0, 1.0, 0.0), UnitVec3(0.0, 0.0, 1.0)};
}

UnitVec3 angle_to_vector(const PolarizationPlane& plane, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return UnitVec3(c * plane.e1.vec() + s * plane.e2.vec());
}

double hwp_to_polarization(double hwp_angle_rad, double fast_axis_offset_rad) {
    double a = std::fmod(2.0 * (hwp_angle_rad - fast_axis_offset_rad), std::numbers::pi);
    if (a < 0.0) a += std::numbers::pi;
    return a;
}

double collection_half_angle(double numerical_aperture, double refractive_index) {
    if (!(numerical_aperture > 0.0) || !(refractive_index > 0.0))
        throw std::domain_error("collection_half_angle: inputs must be positive");
    if (!(numerical_aperture < refractive_index))
        throw std::domain_error("collection_half_angle: NA must be smaller than the index");
    return std::asin(numerical_aperture / refractive_index);
}

}  // namespace odmrpol
