#include "smsim/geometry.hpp"

#include <cmath>

namespace smsim {

Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

Vec3 unskew(const Mat3& s) {
    return 0.5 * Vec3(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
}

bool is_rotation(const Mat3& r, double tol) {
    const double ortho = (r.transpose() * r - Mat3::Identity()).norm();
    return ortho < tol && std::abs(r.determinant() - 1.0) < tol;
}

Mat3 exp_so3(const Vec3& w) {
    const double theta = w.norm();
    const Mat3 wx = skew(w);
    if (theta < 1e-8) {
        // series to O(theta^4); keeps round-trip exact at machine precision
        return Mat3::Identity() + wx + 0.5 * wx * wx;
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Mat3::Identity() + a * wx + b * wx * wx;
}

namespace detail {
Vec4 quaternion_from_rotation(const Mat3& r);
}

Vec3 log_so3(const Mat3& r) {
    // via the quaternion: uniformly accurate, including near pi
    Vec4 q = detail::quaternion_from_rotation(r);
    if (q(0) < 0.0) q = -q;
    const double vn = q.tail<3>().norm();
    if (vn < 1e-12) {
        return 2.0 * q.tail<3>();  // small angle
    }
    const double theta = 2.0 * std::atan2(vn, q(0));
    return theta / vn * q.tail<3>();
}

Vec3 so3_chart_rate(const Vec3& phi, const Vec3& w) {
    const double theta = phi.norm();
    const Vec3 c1 = phi.cross(w);
    const Vec3 c2 = phi.cross(c1);
    if (theta < 1e-6) {
        return w + 0.5 * c1 + (1.0 / 12.0) * c2;
    }
    const double half = 0.5 * theta;
    const double cot = std::cos(half) / std::sin(half);
    const double g = (1.0 - half * cot) / (theta * theta);
    return w + 0.5 * c1 + g * c2;
}

Mat3 euler_xyz_to_rotation(double a, double b, double c) {
    const Mat3 rx = exp_so3(Vec3(a, 0, 0));
    const Mat3 ry = exp_so3(Vec3(0, b, 0));
    const Mat3 rz = exp_so3(Vec3(0, 0, c));
    return rx * ry * rz;
}

Vec3 rotation_to_euler_xyz(const Mat3& r) {
    // r = Rx(a) Ry(b) Rz(c):  r(0,2) = sin b
    const double b = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
    double a, c;
    if (std::abs(std::cos(b)) > 1e-9) {
        a = std::atan2(-r(1, 2), r(2, 2));
        c = std::atan2(-r(0, 1), r(0, 0));
    } else {
        a = std::atan2(r(2, 1), r(1, 1));
        c = 0.0;
    }
    return Vec3(a, b, c);
}

namespace detail {

// Shepperd-style quaternion extraction, (w, x, y, z), unnormalized sign.
Vec4 quaternion_from_rotation(const Mat3& r) {
    Vec4 q;
    const double tr = r.trace();
    if (tr > 0.0) {
        double s = std::sqrt(tr + 1.0) * 2.0;
        q << 0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s,
            (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q << (r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s,
            (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q << (r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s,
            (r(1, 2) + r(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q << (r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s,
            (r(1, 2) + r(2, 1)) / s, 0.25 * s;
    }
    return q.normalized();
}

}  // namespace detail

Vec3 mrp_from_rotation(const Mat3& r) {
    Vec4 q = detail::quaternion_from_rotation(r);
    if (q(0) < 0.0) q = -q;  // canonical set, principal angle <= pi
    const double denom = 1.0 + q(0);
    if (denom < 1e-12) {
        throw SingularOrientationError(
            "mrp_from_rotation: orientation at the 2*pi MRP singularity");
    }
    return q.tail<3>() / denom;
}

Mat3 rotation_from_mrp(const Vec3& sigma) {
    const double s2 = sigma.squaredNorm();
    const Mat3 sx = skew(sigma);
    const double d = (1.0 + s2) * (1.0 + s2);
    return Mat3::Identity() + (8.0 * sx * sx + 4.0 * (1.0 - s2) * sx) / d;
}

Vec3 mrp_shadow(const Vec3& sigma) {
    const double s2 = sigma.squaredNorm();
    if (s2 < 1e-30) {
        throw SingularOrientationError("mrp_shadow: shadow of zero MRP is undefined");
    }
    return -sigma / s2;
}

Vec3 mrp_canonicalize(const Vec3& sigma) {
    return sigma.squaredNorm() > 1.0 ? mrp_shadow(sigma) : sigma;
}

Mat3 mrp_kinematics_matrix(const Vec3& sigma, MrpKinematicsForm form) {
    const double s2 = sigma.squaredNorm();
    const Mat3 sx = skew(sigma);
    Mat3 g = 0.5 * (1.0 - s2) * Mat3::Identity() + sx;
    if (form == MrpKinematicsForm::PaperLiteral) {
        g += sx * sx;
    } else {
        g += sigma * sigma.transpose();
    }
    return g;
}

Vec3 mrp_rate(const Vec3& sigma, const Vec3& w, MrpKinematicsForm form) {
    return 0.5 * mrp_kinematics_matrix(sigma, form) * w;
}

}  // namespace smsim
