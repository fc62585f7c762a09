#include "smsim/multibody.hpp"

#include <cmath>

namespace smsim {

Iso3 ChainModel::joint_transform(int i, double q_i) const {
    const DhRow& row = dh.at(static_cast<size_t>(i - 1));
    Iso3 t = Iso3::Identity();
    t.linear() = exp_so3(Vec3(0, 0, q_i + row.theta_offset));
    t.translation() = t.linear() * Vec3(row.a, 0, row.d);
    t.linear() = t.linear() * exp_so3(Vec3(row.alpha, 0, 0));
    return t;
}

SystemState SystemState::zero(const ChainModel& model) {
    SystemState s;
    s.q = VecX::Zero(model.n_joints());
    s.xdot = VecX::Zero(model.n_vel());
    return s;
}

VecX ParamSet::to_vector() const {
    VecX v(10 * n_bodies());
    for (int j = 0; j < n_bodies(); ++j) {
        v.segment<10>(10 * j) = bodies[static_cast<size_t>(j)].to_vector();
    }
    return v;
}

ParamSet ParamSet::from_vector(const VecX& v) {
    ParamSet p;
    const int nb = static_cast<int>(v.size() / 10);
    p.bodies.reserve(static_cast<size_t>(nb));
    for (int j = 0; j < nb; ++j) {
        p.bodies.push_back(InertialParams::from_vector(v.segment<10>(10 * j)));
    }
    return p;
}

Mat6 ad_twist(const Vec6& t) {
    Mat6 m = Mat6::Zero();
    const Mat3 wx = skew(t.tail<3>());
    m.topLeftCorner<3, 3>() = wx;
    m.topRightCorner<3, 3>() = skew(t.head<3>());
    m.bottomRightCorner<3, 3>() = wx;
    return m;
}

Mat6 ad_dual(const Vec6& t) {
    Mat6 m = Mat6::Zero();
    const Mat3 wx = skew(t.tail<3>());
    m.topLeftCorner<3, 3>() = wx;
    m.bottomLeftCorner<3, 3>() = skew(t.head<3>());
    m.bottomRightCorner<3, 3>() = wx;
    return m;
}

Mat6 spatial_inertia(const InertialParams& p) {
    Mat6 m = Mat6::Zero();
    const Mat3 hx = skew(p.h);
    m.topLeftCorner<3, 3>() = p.mass * Mat3::Identity();
    m.topRightCorner<3, 3>() = -hx;
    m.bottomLeftCorner<3, 3>() = hx;
    m.bottomRightCorner<3, 3>() = p.inertia;
    return m;
}

Eigen::Matrix<double, 6, 10> inertia_product_matrix(const Vec6& x) {
    Eigen::Matrix<double, 6, 10> a;
    a.setZero();
    const Vec3 xv = x.head<3>();
    const Vec3 xw = x.tail<3>();
    a.block<3, 1>(0, 0) = xv;
    a.block<3, 3>(0, 1) = skew(xw);
    a.block<3, 3>(3, 1) = -skew(xv);
    // I * xw laid out over (Ixx, Iyy, Izz, Ixy, Iyz, Izx)
    a(3, 4) = xw.x();
    a(4, 5) = xw.y();
    a(5, 6) = xw.z();
    a(3, 7) = xw.y();
    a(4, 7) = xw.x();
    a(4, 8) = xw.z();
    a(5, 8) = xw.y();
    a(3, 9) = xw.z();
    a(5, 9) = xw.x();
    return a;
}

namespace {

// Adjoint of T^-1: maps a twist at/in the parent frame to the child frame.
Mat6 twist_transform_inverse(const Iso3& t) {
    Mat6 x = Mat6::Zero();
    const Mat3 rt = t.linear().transpose();
    x.topLeftCorner<3, 3>() = rt;
    x.topRightCorner<3, 3>() = -rt * skew(t.translation());
    x.bottomRightCorner<3, 3>() = rt;
    return x;
}

// Joint twist of frame i relative to frame i-1, expressed in frame i.
// Constant per row: rotation about z through the parent origin pulled
// through the fixed part Tz(d) Tx(a) Rx(alpha).
Vec6 joint_twist(const DhRow& row) {
    const Mat3 rx_neg = exp_so3(Vec3(-row.alpha, 0, 0));
    Vec6 s;
    s.head<3>() = rx_neg * Vec3(0, row.a, 0);
    s.tail<3>() = rx_neg * Vec3(0, 0, 1);
    return s;
}

}  // namespace

KinematicsCache compute_kinematics(const ChainModel& model, const VecX& q,
                                   const VecX& xdot) {
    const int n = model.n_joints();
    const int nv = model.n_vel();
    KinematicsCache kin;
    kin.xdot = xdot;
    kin.jac.resize(static_cast<size_t>(n + 1));
    kin.jac_dot.resize(static_cast<size_t>(n + 1));
    kin.twist.resize(static_cast<size_t>(n + 1));
    kin.pose_in_base.resize(static_cast<size_t>(n + 1));

    kin.jac[0] = MatX::Zero(6, nv);
    kin.jac[0].topLeftCorner<6, 6>() = Mat6::Identity();
    kin.jac_dot[0] = MatX::Zero(6, nv);
    kin.twist[0] = xdot.head<6>();
    kin.pose_in_base[0] = Iso3::Identity();

    Iso3 pose = model.mount;
    for (int i = 1; i <= n; ++i) {
        const size_t si = static_cast<size_t>(i);
        const Iso3 a = model.joint_transform(i, q(i - 1));
        Iso3 parent_to_child = a;
        if (i == 1) parent_to_child = model.mount * a;
        pose = (i == 1) ? parent_to_child : pose * a;
        kin.pose_in_base[si] = pose;

        const Mat6 x = twist_transform_inverse(parent_to_child);
        const Vec6 s = joint_twist(model.dh[static_cast<size_t>(i - 1)]);
        const double qd = xdot(6 + i - 1);

        MatX xj = x * kin.jac[si - 1];
        kin.jac[si] = xj;
        kin.jac[si].col(6 + i - 1) += s;

        kin.jac_dot[si] = x * kin.jac_dot[si - 1];
        kin.jac_dot[si].noalias() -= qd * (ad_twist(s) * xj);

        kin.twist[si] = kin.jac[si] * xdot;
    }
    kin.ee_in_base = (n == 0) ? model.mount * model.ee : pose * model.ee;
    return kin;
}

ForwardKinematics forward_kinematics(const ChainModel& model,
                                     const SystemState& state) {
    const KinematicsCache kin =
        compute_kinematics(model, state.q, VecX::Zero(model.n_vel()));
    Iso3 base = Iso3::Identity();
    base.linear() = state.R_b;
    base.translation() = state.p_b;
    ForwardKinematics fk;
    fk.body_pose.reserve(kin.pose_in_base.size());
    for (const Iso3& t : kin.pose_in_base) {
        fk.body_pose.push_back(base * t);
    }
    fk.ee_pose = base * kin.ee_in_base;
    return fk;
}

Iso3 body_com_pose(const ChainModel& model, const SystemState& state,
                   const InertialParams& params, int body) {
    if (params.mass <= 0.0) {
        throw InconsistentParamsError("body_com_pose: non-positive mass");
    }
    const ForwardKinematics fk = forward_kinematics(model, state);
    const Vec3 com = params.h / params.mass;
    const Mat3 i_com =
        params.inertia - params.mass * (skew(com).transpose() * skew(com));
    Eigen::SelfAdjointEigenSolver<Mat3> es(i_com);
    Mat3 axes = es.eigenvectors();
    if (axes.determinant() < 0.0) axes.col(2) *= -1.0;
    Iso3 local = Iso3::Identity();
    local.linear() = axes;
    local.translation() = com;
    return fk.body_pose.at(static_cast<size_t>(body)) * local;
}

MatX mass_matrix(const ChainModel& model, const KinematicsCache& kin,
                 const ParamSet& params) {
    const int nv = model.n_vel();
    MatX m = MatX::Zero(nv, nv);
    for (int j = 0; j < model.n_bodies(); ++j) {
        const MatX& jac = kin.jac[static_cast<size_t>(j)];
        const Mat6 ii = spatial_inertia(params.bodies[static_cast<size_t>(j)]);
        m.noalias() += jac.transpose() * (ii * jac);
    }
    return 0.5 * (m + m.transpose());
}

MatX mass_matrix(const ChainModel& model, const VecX& q, const ParamSet& params) {
    return mass_matrix(model, compute_kinematics(model, q, VecX::Zero(model.n_vel())),
                       params);
}

MatX coriolis_matrix(const ChainModel& model, const KinematicsCache& kin,
                     const ParamSet& params) {
    const int nv = model.n_vel();
    MatX c = MatX::Zero(nv, nv);
    for (int j = 0; j < model.n_bodies(); ++j) {
        const size_t sj = static_cast<size_t>(j);
        const MatX& jac = kin.jac[sj];
        const Mat6 ii = spatial_inertia(params.bodies[sj]);
        // I Jdot + (ad*_V I + I ad_V) J ; the parenthesis is antisymmetric,
        // which gives Mdot = C + C' exactly.
        MatX inner = ii * kin.jac_dot[sj];
        inner.noalias() +=
            (ad_dual(kin.twist[sj]) * ii + ii * ad_twist(kin.twist[sj])) * jac;
        c.noalias() += jac.transpose() * inner;
    }
    return c;
}

MatX coriolis_matrix(const ChainModel& model, const VecX& q, const VecX& xdot,
                     const ParamSet& params) {
    return coriolis_matrix(model, compute_kinematics(model, q, xdot), params);
}

namespace {

MatX regressor_block_impl(const KinematicsCache& kin, const VecX& v_mult,
                          const VecX& accel, int body) {
    const size_t sj = static_cast<size_t>(body);
    const MatX& jac = kin.jac[sj];
    const Vec6 v = kin.twist[sj];
    const Vec6 beta = jac * v_mult;
    Vec6 a_eff = jac * accel;
    a_eff.noalias() += kin.jac_dot[sj] * v_mult;
    a_eff.noalias() += ad_twist(v) * beta;
    Eigen::Matrix<double, 6, 10> phi = inertia_product_matrix(a_eff);
    phi.noalias() += ad_dual(v) * inertia_product_matrix(beta);
    return jac.transpose() * phi;
}

}  // namespace

MatX regressor(const ChainModel& model, const KinematicsCache& kin,
               const VecX& v_mult, const VecX& accel) {
    const int nv = model.n_vel();
    MatX y(nv, 10 * model.n_bodies());
    for (int j = 0; j < model.n_bodies(); ++j) {
        y.middleCols<10>(10 * j) = regressor_block_impl(kin, v_mult, accel, j);
    }
    return y;
}

MatX regressor_block(const ChainModel& model, const KinematicsCache& kin,
                     const VecX& v_mult, const VecX& accel, int body) {
    (void)model;
    return regressor_block_impl(kin, v_mult, accel, body);
}

VecX forward_dynamics(const ChainModel& model, const VecX& q, const VecX& xdot,
                      const VecX& u_eff, const ParamSet& params) {
    const KinematicsCache kin = compute_kinematics(model, q, xdot);
    const MatX m = mass_matrix(model, kin, params);
    const MatX c = coriolis_matrix(model, kin, params);
    Eigen::LDLT<MatX> ldlt(m);
    const VecX d = ldlt.vectorD();
    const double dmin = d.minCoeff();
    const double dmax = d.maxCoeff();
    if (ldlt.info() != Eigen::Success || dmin <= 0.0 || dmax / dmin > 1e12) {
        throw SingularMassMatrixError(
            "forward_dynamics: mass matrix singular or ill-conditioned");
    }
    return ldlt.solve(u_eff - c * xdot);
}

Vec6 total_momentum(const ChainModel& model, const SystemState& state,
                    const ParamSet& params) {
    const KinematicsCache kin = compute_kinematics(model, state.q, state.xdot);
    Iso3 base = Iso3::Identity();
    base.linear() = state.R_b;
    base.translation() = state.p_b;
    Vec6 total = Vec6::Zero();
    for (int j = 0; j < model.n_bodies(); ++j) {
        const size_t sj = static_cast<size_t>(j);
        const Vec6 h_body =
            spatial_inertia(params.bodies[sj]) * kin.twist[sj];
        const Iso3 pose = base * kin.pose_in_base[sj];
        const Vec3 p_lin = pose.linear() * h_body.head<3>();
        total.head<3>() += p_lin;
        total.tail<3>() +=
            pose.linear() * h_body.tail<3>() + pose.translation().cross(p_lin);
    }
    return total;
}

}  // namespace smsim
