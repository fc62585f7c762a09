#pragma once

#include "smsim/types.hpp"

namespace smsim {

/// Cross-product matrix: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Inverse of skew for an antisymmetric matrix (averages the off-diagonal pairs).
Vec3 unskew(const Mat3& s);

/// True when R'R = I and det R = +1 within tol.
bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Rotation exponential, exp(skew(w)).
Mat3 exp_so3(const Vec3& w);

/// Rotation logarithm; principal angle in [0, pi].
Vec3 log_so3(const Mat3& r);

/// Rate of exponential coordinates phi for body angular velocity w,
/// where R(t) = R0 * exp(skew(phi(t))). Exact dexp-inverse.
Vec3 so3_chart_rate(const Vec3& phi, const Vec3& w);

/// Intrinsic x-y-z Euler rotation, Rx(a) * Ry(b) * Rz(c).
Mat3 euler_xyz_to_rotation(double a, double b, double c);

/// Euler x-y-z angles of a rotation (pitch taken in (-pi/2, pi/2)).
Vec3 rotation_to_euler_xyz(const Mat3& r);

// ---------------------------------------------------------------------------
// Modified Rodrigues Parameters. sigma = tan(phi/4) * axis for the rotation R
// with body-frame kinematics Rdot = R * skew(w). The canonical set has
// |sigma| <= 1 (principal angle <= pi); the shadow set -sigma/|sigma|^2
// represents the same rotation.
// ---------------------------------------------------------------------------

/// MRP of a rotation, canonical set (|sigma| <= 1).
/// Throws SingularOrientationError within tolerance of the 2*pi singularity.
Vec3 mrp_from_rotation(const Mat3& r);

/// Rotation represented by an MRP (either set).
Mat3 rotation_from_mrp(const Vec3& sigma);

/// Map an MRP to its shadow-set counterpart.
Vec3 mrp_shadow(const Vec3& sigma);

/// Switch to the shadow set whenever |sigma| > 1.
Vec3 mrp_canonicalize(const Vec3& sigma);

/// Choice of MRP kinematics matrix G in sigma_dot = G(sigma) * w / 2.
enum class MrpKinematicsForm {
    /// (1 - s's)/2 I + [s]x + [s]x^2
    PaperLiteral,
    /// (1 - s's)/2 I + [s]x + s s'  (standard MRP kinematics)
    Textbook,
};

/// Kinematics matrix G(sigma) for the selected form.
Mat3 mrp_kinematics_matrix(const Vec3& sigma,
                           MrpKinematicsForm form = MrpKinematicsForm::Textbook);

/// sigma_dot = G(sigma) * w / 2.
Vec3 mrp_rate(const Vec3& sigma, const Vec3& w,
              MrpKinematicsForm form = MrpKinematicsForm::Textbook);

}  // namespace smsim
