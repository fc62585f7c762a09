#include "test_helpers.hpp"

namespace smsim::test {

namespace {

// Local spatial-algebra pieces, written from the transforms directly so the
// oracle does not share code with the Jacobian-based assembly under test.
Mat6 twist_xform_inv(const Iso3& t) {
    Mat6 x = Mat6::Zero();
    const Mat3 rt = t.linear().transpose();
    x.topLeftCorner<3, 3>() = rt;
    x.topRightCorner<3, 3>() = -rt * skew(t.translation());
    x.bottomRightCorner<3, 3>() = rt;
    return x;
}

Vec6 twist_cross(const Vec6& a, const Vec6& b) {
    Vec6 out;
    out.head<3>() = a.tail<3>().cross(b.head<3>()) + a.head<3>().cross(b.tail<3>());
    out.tail<3>() = a.tail<3>().cross(b.tail<3>());
    return out;
}

Vec6 wrench_cross(const Vec6& v, const Vec6& h) {
    Vec6 out;
    out.head<3>() = v.tail<3>().cross(h.head<3>());
    out.tail<3>() = v.tail<3>().cross(h.tail<3>()) + v.head<3>().cross(h.head<3>());
    return out;
}

Vec6 body_momentum(const InertialParams& p, const Vec6& v) {
    Vec6 h;
    h.head<3>() = p.mass * v.head<3>() - p.h.cross(v.tail<3>());
    h.tail<3>() = p.h.cross(v.head<3>()) + p.inertia * v.tail<3>();
    return h;
}

}  // namespace

VecX rne_inverse_dynamics(const ChainModel& model, const VecX& q,
                          const VecX& xdot, const VecX& xddot,
                          const ParamSet& params) {
    const int n = model.n_joints();
    std::vector<Vec6> vel(static_cast<size_t>(n + 1));
    std::vector<Vec6> acc(static_cast<size_t>(n + 1));
    std::vector<Vec6> s(static_cast<size_t>(n + 1));
    std::vector<Mat6> x(static_cast<size_t>(n + 1));

    vel[0] = xdot.head<6>();
    acc[0] = xddot.head<6>();

    for (int i = 1; i <= n; ++i) {
        const size_t si = static_cast<size_t>(i);
        const Iso3 a = model.joint_transform(i, q(i - 1));
        x[si] = twist_xform_inv(i == 1 ? Iso3(model.mount * a) : a);
        Vec6 axis = Vec6::Zero();
        axis(5) = 1.0;
        // joint axis is z of DH frame i-1, pulled into frame i coordinates
        s[si] = twist_xform_inv(a) * axis;
        const double qd = xdot(6 + i - 1);
        const double qdd = xddot(6 + i - 1);
        vel[si] = x[si] * vel[si - 1] + s[si] * qd;
        acc[si] = x[si] * acc[si - 1] + s[si] * qdd +
                  twist_cross(vel[si], s[si]) * qd;
    }

    std::vector<Vec6> wrench(static_cast<size_t>(n + 1));
    for (int i = n; i >= 0; --i) {
        const size_t si = static_cast<size_t>(i);
        const InertialParams& p = params.bodies[si];
        wrench[si] = body_momentum(p, acc[si]) +
                     wrench_cross(vel[si], body_momentum(p, vel[si]));
        if (i < n) {
            wrench[si] += x[si + 1].transpose() * wrench[si + 1];
        }
    }

    VecX u(model.n_vel());
    u.head<6>() = wrench[0];
    for (int i = 1; i <= n; ++i) {
        u(6 + i - 1) = s[static_cast<size_t>(i)].dot(wrench[static_cast<size_t>(i)]);
    }
    return u;
}

}  // namespace smsim::test
