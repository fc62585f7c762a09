#pragma once

#include <vector>

#include "smsim/geometry.hpp"
#include "smsim/inertial.hpp"
#include "smsim/types.hpp"

namespace smsim {

/// One standard Denavit-Hartenberg row: A(q) = Rz(q + theta_offset) Tz(d) Tx(a) Rx(alpha).
struct DhRow {
    double a = 0.0;             // m
    double alpha = 0.0;         // rad
    double d = 0.0;             // m
    double theta_offset = 0.0;  // rad
};

/// Kinematic description of the base-plus-arm chain. Body 0 is the base
/// (frame B); body j >= 1 is arm link j with its frame at DH frame j.
/// Immutable after construction; safe for concurrent evaluation.
struct ChainModel {
    std::vector<DhRow> dh;          // n rows
    Iso3 mount = Iso3::Identity();  // frame B -> DH frame 0
    Iso3 ee = Iso3::Identity();     // DH frame n -> end-effector frame E

    int n_joints() const { return static_cast<int>(dh.size()); }
    int n_bodies() const { return n_joints() + 1; }
    int n_vel() const { return 6 + n_joints(); }

    /// Pose of DH frame i in frame i-1 (i in [1, n]).
    Iso3 joint_transform(int i, double q_i) const;
};

/// Base pose, joint positions, and the body-frame generalized velocity
/// xdot = [v_b, w_b, qdot].
struct SystemState {
    Vec3 p_b = Vec3::Zero();
    Mat3 R_b = Mat3::Identity();
    VecX q;
    VecX xdot;

    static SystemState zero(const ChainModel& model);
};

/// Stacked inertial parameters of the n+1 bodies, base first.
struct ParamSet {
    std::vector<InertialParams> bodies;

    int n_bodies() const { return static_cast<int>(bodies.size()); }
    VecX to_vector() const;  // 10 (n+1)
    static ParamSet from_vector(const VecX& v);
};

/// Per-evaluation kinematic quantities shared by every dynamics routine:
/// body Jacobians J_j mapping xdot to the body twist [v; w] in frame G_j,
/// their time derivatives along the supplied velocity, body twists, and
/// poses relative to the base frame.
struct KinematicsCache {
    std::vector<MatX> jac;       // 6 x (6+n) per body
    std::vector<MatX> jac_dot;   // 6 x (6+n) per body
    std::vector<Vec6> twist;     // J_j * xdot
    std::vector<Iso3> pose_in_base;
    Iso3 ee_in_base = Iso3::Identity();
    VecX xdot;
};

/// Build the cache at configuration q; velocity terms use xdot (pass zeros
/// for a purely static cache).
KinematicsCache compute_kinematics(const ChainModel& model, const VecX& q,
                                   const VecX& xdot);

/// Twist cross-product matrix for [v; w] ordering.
Mat6 ad_twist(const Vec6& t);
/// Dual (wrench/momentum) cross-product matrix.
Mat6 ad_dual(const Vec6& t);
/// 6x6 spatial inertia of one body at its frame origin.
Mat6 spatial_inertia(const InertialParams& p);
/// A(x) with A(x) * theta_j == spatial_inertia(theta_j) * x  (6 x 10).
Eigen::Matrix<double, 6, 10> inertia_product_matrix(const Vec6& x);

/// Poses of all body frames and the end effector in the inertial frame.
struct ForwardKinematics {
    std::vector<Iso3> body_pose;  // frames G_j
    Iso3 ee_pose;
};
ForwardKinematics forward_kinematics(const ChainModel& model,
                                     const SystemState& state);

/// Pose of body j's center-of-mass frame (origin at com, principal axes),
/// in the inertial frame; requires positive mass.
Iso3 body_com_pose(const ChainModel& model, const SystemState& state,
                   const InertialParams& params, int body);

/// Generalized mass matrix, symmetric and linear in the parameters.
MatX mass_matrix(const ChainModel& model, const KinematicsCache& kin,
                 const ParamSet& params);
MatX mass_matrix(const ChainModel& model, const VecX& q, const ParamSet& params);

/// Coriolis/centrifugal matrix built at the cache's velocity; satisfies
/// Mdot = C + C' along any trajectory and C * v equals the Newton-Euler bias.
MatX coriolis_matrix(const ChainModel& model, const KinematicsCache& kin,
                     const ParamSet& params);
MatX coriolis_matrix(const ChainModel& model, const VecX& q, const VecX& xdot,
                     const ParamSet& params);

/// Regressor: Y(q, v_cor, v_mult, a) * theta == M(q, theta) * a
///                                            + C(q, v_cor, theta) * v_mult.
/// The cache must have been built with xdot = v_cor.
MatX regressor(const ChainModel& model, const KinematicsCache& kin,
               const VecX& v_mult, const VecX& accel);
/// Single-body slice (columns of body j), (6+n) x 10.
MatX regressor_block(const ChainModel& model, const KinematicsCache& kin,
                     const VecX& v_mult, const VecX& accel, int body);

/// Solve M xddot = u_eff - C xdot. Throws SingularMassMatrixError when the
/// mass matrix is numerically singular (inconsistent parameters upstream).
VecX forward_dynamics(const ChainModel& model, const VecX& q, const VecX& xdot,
                      const VecX& u_eff, const ParamSet& params);

/// Total linear and angular momentum about the inertial origin, expressed in
/// the inertial frame.
Vec6 total_momentum(const ChainModel& model, const SystemState& state,
                    const ParamSet& params);

}  // namespace smsim
