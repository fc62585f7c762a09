#pragma once

#include "smsim/estimator.hpp"
#include "smsim/multibody.hpp"

namespace smsim {

/// One sample of the reference trajectory: base position/attitude with two
/// derivatives (w and wd in the reference frame) and the joint profile.
struct RefSample {
    Vec3 p = Vec3::Zero();
    Vec3 pd = Vec3::Zero();
    Vec3 pdd = Vec3::Zero();
    Mat3 R = Mat3::Identity();
    Vec3 w = Vec3::Zero();
    Vec3 wd = Vec3::Zero();
    VecX q, qd, qdd;
};

struct ControllerGains {
    Mat3 k_p = 0.2 * Mat3::Identity();
    Mat3 k_sigma = 0.2 * Mat3::Identity();
    MatX k_q;    // n x n
    MatX k_obs;  // shared with the estimator
    MrpKinematicsForm mrp_form = MrpKinematicsForm::PaperLiteral;

    static ControllerGains defaults(int n_joints);
    void validate() const;
};

/// All tracking-error quantities of one control cycle. The identities
///   xerr_dot == kbar * xbar + xtilde_dot
///   xerr_dot == xhat_err_dot + (xdot - xhat_dot)
/// hold by construction.
struct ErrorBundle {
    Vec3 p_err;      // inertial frame
    Vec3 sigma_err;  // MRP of R_ref' R_b
    Vec3 euler_err;  // xyz Euler angles of the same rotation (telemetry)
    VecX q_err;
    Vec3 v_err;  // body frame
    Vec3 w_err;  // body frame
    VecX qd_err;
    VecX xbar;          // [p_err; sigma_err; q_err]
    VecX xbar_dot;      // [p_err_dot (inertial); sigma_rate; qd_err]
    VecX xtilde_dot;    // velocity tracking error
    VecX xerr_dot;      // augmented velocity error
    VecX xhat_err_dot;  // observer-based augmented error
    MatX kbar;          // blockdiag(R_b' K_p, K_sigma, K_q)
};

/// Gain matrix K_xbar at the given base attitude.
MatX kbar_matrix(const Mat3& r_b, const ControllerGains& gains, int n_joints);

/// Time derivative of K_xbar along the motion: only the translational block
/// moves, d/dt (R_b') K_p = -skew(w_b) R_b' K_p.
MatX kbar_dot(const Mat3& r_b, const Vec3& w_b, const ControllerGains& gains,
              int n_joints);

/// Assemble every error quantity from the current state, observer velocity
/// and reference sample. Throws SingularOrientationError through the MRP
/// extraction for a 2*pi attitude error.
ErrorBundle compute_errors(const SystemState& state, const VecX& xhat_dot,
                           const RefSample& ref, const ControllerGains& gains);

/// Reference generalized acceleration [d/dt(R_b' pd_ref); d/dt(Rt' w_ref); qdd],
/// the full derivative including the moving-frame terms.
VecX reference_acceleration(const SystemState& state, const ErrorBundle& err,
                            const RefSample& ref);

/// The tracking control input
///   u_c = diag(lh)^-1 [ C(q, xdot, th) xhat_dot
///                       - M(q, th) (K_xbar xbar_dot + Kdot_xbar xbar)
///                       - K_obs xerr_dot + M(q, th) xddot_ref ].
/// The cache must be built at (q, xdot_measured). Throws
/// EfficiencyRangeError when an efficiency estimate sits below lambda_min.
VecX control_input(const ChainModel& model, const KinematicsCache& kin,
                   const SystemState& state, const EstimatorState& est,
                   const RefSample& ref, const ControllerGains& gains,
                   double lambda_min);

/// Worst-case asymptotic-gain report backing the ISS bounds: reciprocal
/// minimum eigenvalues of the position gains and the max-inertia-over-K_obs
/// ratio, the latter estimated by deterministic sampling over the joint range
/// and radial parameter scalings within the bounds.
struct IssReport {
    double position_gain = 0.0;  // 1 / min eig K_p
    double attitude_gain = 0.0;  // 1 / min eig K_sigma
    double joint_gain = 0.0;     // 1 / min eig K_q
    double observer_gain = 0.0;  // max eig M / min eig K_obs
    double mass_matrix_max_eig = 0.0;
};
IssReport iss_bounds(const ControllerGains& gains, const ChainModel& model,
                     const ParamSet& nominal,
                     const std::vector<ParamBounds>& bounds, int samples = 64,
                     unsigned seed = 0);

}  // namespace smsim
