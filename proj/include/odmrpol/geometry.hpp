#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace odmrpol {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Direction in the cubic crystal frame ([100],[010],[001] basis).
// Normalized on construction; zero-length input is rejected.
class UnitVec3 {
  public:
    UnitVec3(double x, double y, double z) : UnitVec3(Vec3{x, y, z}) {}
    explicit UnitVec3(const Vec3& v) : v_(v) {
        const double n = norm(v);
        if (!(n > 1e-12))
            throw std::invalid_argument("UnitVec3: zero-length vector");
        v_.x /= n;
        v_.y /= n;
        v_.z /= n;
    }
    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }
    const Vec3& vec() const { return v_; }
    operator const Vec3&() const { return v_; }

    // Negation preserves unit length exactly; renormalizing would perturb the
    // low bits.
    UnitVec3 operator-() const { return UnitVec3(Vec3{-v_.x, -v_.y, -v_.z}, already_unit{}); }

  private:
    struct already_unit {};
    UnitVec3(const Vec3& v, already_unit) : v_(v) {}

    Vec3 v_;
};

enum class FamilyLabel { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<FamilyLabel, 4> all_families = {FamilyLabel::A, FamilyLabel::B,
                                                            FamilyLabel::C, FamilyLabel::D};

const char* family_name(FamilyLabel label);
FamilyLabel parse_family(const std::string& name);  // throws std::invalid_argument

struct NVFamily {
    FamilyLabel label;
    UnitVec3 axis;     // the <111> orientation shared by this family
    UnitVec3 dipole1;  // orthonormal emission dipole pair, both perpendicular to axis
    UnitVec3 dipole2;
};

// The four orientation families. B and D are the two whose axes are
// perpendicular to [110], i.e. the ones lying in the laser polarization plane.
std::array<NVFamily, 4> canonical_families();

// Plane transverse to a propagation/viewing axis. e1 marks the in-plane angle
// zero; e2 = normal x e1 completes a right-handed triad.
struct PolarizationPlane {
    UnitVec3 normal;
    UnitVec3 e1;
    UnitVec3 e2;

    PolarizationPlane(const UnitVec3& normal_axis, const UnitVec3& angle_zero);
};

// Detection side: polarizer rotates in the plane normal to the viewing axis
// [001], with angle zero along [010].
PolarizationPlane collection_plane();

// Pump side: laser polarization rotates in the plane normal to the propagation
// direction [110]/sqrt(2), with angle zero along [001].
PolarizationPlane laser_plane();

// cos(angle)*e1 + sin(angle)*e2
UnitVec3 angle_to_vector(const PolarizationPlane& plane, double angle_rad);

// Polarization angle produced by a half-wave plate at hwp_angle with the given
// fast-axis offset: 2*(hwp - offset), folded into [0, pi).
double hwp_to_polarization(double hwp_angle_rad, double fast_axis_offset_rad);

// Half-angle of the collection cone inside the crystal: asin(NA/n).
double collection_half_angle(double numerical_aperture, double refractive_index);

}  // namespace odmrpol
