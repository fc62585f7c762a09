#pragma once

#include <vector>

#include "smsim/multibody.hpp"

namespace smsim {

/// Observer velocity plus the online parameter and efficiency estimates.
struct EstimatorState {
    VecX xhat_dot;       // (6+n)
    ParamSet theta_hat;  // n+1 bodies, each kept consistent by projection
    VecX lambda_hat;     // (6+n), kept in [lambda_min, 1]
};

struct EstimatorGains {
    MatX k_obs;         // (6+n) x (6+n), positive definite
    VecX gamma_theta;   // per body, positive
    MatX gamma_lambda;  // (6+n) x (6+n), positive definite
    double delta = 1e-3;
    double lambda_min = 0.1;
    /// Trust region on the parameter flow: cap on the Riemannian speed
    /// sqrt(rate' g rate) of each body's update (the metric makes this a
    /// relative, scale-free rate). Purely a numerical guard for fixed-step
    /// integration; effectively disabled by default.
    double theta_rate_limit = 1e12;

    /// Scalar-gain defaults: K_obs = 2.5 I, gamma_theta = 20, Gamma = 2 I.
    static EstimatorGains defaults(int n_joints, int n_bodies);

    /// Throws ConfigError unless every gain is positive (definite).
    void validate() const;
};

/// Observer acceleration
///   xhat_ddot = M(q, th)^-1 [diag(lh) u - C(q, xdot, th) xhat_dot
///                            + K_obs (xdot - xhat_dot)].
/// The cache must be built at (q, xdot_measured).
VecX observer_acceleration(const ChainModel& model, const KinematicsCache& kin,
                           const VecX& xdot_measured, const EstimatorState& est,
                           const VecX& u, const EstimatorGains& gains);

/// Natural-gradient parameter rates, one 10-vector per body:
///   rate_j = Proj{ -gamma_j g(th_j)^-1 Y_j' (xdot - xhat_dot) }
/// with Y_j the regressor slice at (q, xdot, xhat_dot, xhat_ddot).
/// Bodies with adapt_enabled[j] == false get a zero rate.
std::vector<Vec10> theta_rates(const ChainModel& model,
                               const KinematicsCache& kin,
                               const VecX& xdot_measured,
                               const EstimatorState& est, const VecX& xhat_ddot,
                               const EstimatorGains& gains,
                               const std::vector<ParamBounds>& bounds,
                               const std::vector<bool>& adapt_enabled);

/// Efficiency update rate Proj{ Gamma diag(u) (xdot - xhat_dot) }, the
/// projection being the same boundary-layer attenuation on the box
/// [lambda_min, 1].
VecX lambda_rate(const VecX& u, const VecX& xdot_measured,
                 const EstimatorState& est, const EstimatorGains& gains);

/// Diagnostic Lyapunov value for runs where the truth is known:
///   V = xt' M(q, theta) xt / 2 + lt' Gamma^-1 lt / 2
///     + sum_j (2 gamma_j)^-1 D(theta_hat_j || theta_j)
/// with xt the observation error and lt the efficiency error. Along ideal
/// actuation this V is non-increasing under the update laws.
double lyapunov_value(const ChainModel& model, const KinematicsCache& kin,
                      const VecX& xdot_measured, const ParamSet& theta_true,
                      const VecX& lambda_true, const EstimatorState& est,
                      const EstimatorGains& gains);

}  // namespace smsim
