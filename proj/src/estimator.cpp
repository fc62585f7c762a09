#include "smsim/estimator.hpp"

#include <cmath>

namespace smsim {

EstimatorGains EstimatorGains::defaults(int n_joints, int n_bodies) {
    EstimatorGains g;
    const int nv = 6 + n_joints;
    g.k_obs = 2.5 * MatX::Identity(nv, nv);
    g.gamma_theta = VecX::Constant(n_bodies, 20.0);
    g.gamma_lambda = 2.0 * MatX::Identity(nv, nv);
    return g;
}

void EstimatorGains::validate() const {
    auto check_pd = [](const MatX& m, const char* name) {
        if (m.rows() != m.cols()) {
            throw ConfigError(std::string(name) + " must be square");
        }
        Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) <= 0.0) {
            throw ConfigError(std::string(name) + " must be positive definite");
        }
    };
    check_pd(k_obs, "k_obs");
    check_pd(gamma_lambda, "gamma_lambda");
    if ((gamma_theta.array() <= 0.0).any()) {
        throw ConfigError("gamma_theta entries must be positive");
    }
    if (delta <= 0.0 || lambda_min <= 0.0 || lambda_min > 1.0) {
        throw ConfigError("delta and lambda_min must be positive, lambda_min <= 1");
    }
}

VecX observer_acceleration(const ChainModel& model, const KinematicsCache& kin,
                           const VecX& xdot_measured, const EstimatorState& est,
                           const VecX& u, const EstimatorGains& gains) {
    const VecX xtilde = xdot_measured - est.xhat_dot;
    const MatX m = mass_matrix(model, kin, est.theta_hat);
    const MatX c = coriolis_matrix(model, kin, est.theta_hat);
    VecX rhs = est.lambda_hat.cwiseProduct(u);
    rhs.noalias() -= c * est.xhat_dot;
    rhs.noalias() += gains.k_obs * xtilde;

    Eigen::LDLT<MatX> ldlt(m);
    const VecX d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= 0.0 ||
        d.maxCoeff() / d.minCoeff() > 1e12) {
        throw SingularMassMatrixError(
            "observer_acceleration: estimated mass matrix not invertible "
            "(projection failed upstream)");
    }
    return ldlt.solve(rhs);
}

std::vector<Vec10> theta_rates(const ChainModel& model,
                               const KinematicsCache& kin,
                               const VecX& xdot_measured,
                               const EstimatorState& est, const VecX& xhat_ddot,
                               const EstimatorGains& gains,
                               const std::vector<ParamBounds>& bounds,
                               const std::vector<bool>& adapt_enabled) {
    const VecX xtilde = xdot_measured - est.xhat_dot;
    std::vector<Vec10> rates(static_cast<size_t>(model.n_bodies()),
                             Vec10::Zero());
    for (int j = 0; j < model.n_bodies(); ++j) {
        const size_t sj = static_cast<size_t>(j);
        if (!adapt_enabled[sj]) continue;
        const MatX yj = regressor_block(model, kin, est.xhat_dot, xhat_ddot, j);
        const Vec10 grad = yj.transpose() * xtilde;
        Vec10 raw = natural_gradient_rate(est.theta_hat.bodies[sj], grad,
                                          gains.gamma_theta(j));
        // raw = -gamma g^-1 grad, so raw' g raw = -gamma grad' raw
        const double speed =
            std::sqrt(std::max(0.0, -gains.gamma_theta(j) * grad.dot(raw)));
        if (speed > gains.theta_rate_limit) {
            raw *= gains.theta_rate_limit / speed;
        }
        rates[sj] = smooth_project(est.theta_hat.bodies[sj], raw, bounds[sj],
                                   gains.delta);
    }
    return rates;
}

VecX lambda_rate(const VecX& u, const VecX& xdot_measured,
                 const EstimatorState& est, const EstimatorGains& gains) {
    const VecX xtilde = xdot_measured - est.xhat_dot;
    VecX raw = gains.gamma_lambda * u.cwiseProduct(xtilde);
    // boundary-layer projection onto [lambda_min, 1], componentwise
    for (int i = 0; i < raw.size(); ++i) {
        const double li = est.lambda_hat(i);
        if (raw(i) > 0.0) {
            const double margin = 1.0 - li;
            if (margin < gains.delta) {
                raw(i) *= std::clamp(margin / gains.delta, 0.0, 1.0);
            }
        } else if (raw(i) < 0.0) {
            const double margin = li - gains.lambda_min;
            if (margin < gains.delta) {
                raw(i) *= std::clamp(margin / gains.delta, 0.0, 1.0);
            }
        }
    }
    return raw;
}

double lyapunov_value(const ChainModel& model, const KinematicsCache& kin,
                      const VecX& xdot_measured, const ParamSet& theta_true,
                      const VecX& lambda_true, const EstimatorState& est,
                      const EstimatorGains& gains) {
    const VecX xtilde = xdot_measured - est.xhat_dot;
    const VecX ltilde = lambda_true - est.lambda_hat;
    const MatX m = mass_matrix(model, kin, theta_true);
    double v = 0.5 * xtilde.dot(m * xtilde);
    v += 0.5 * ltilde.dot(gains.gamma_lambda.ldlt().solve(ltilde));
    for (int j = 0; j < model.n_bodies(); ++j) {
        const size_t sj = static_cast<size_t>(j);
        v += bregman_divergence(est.theta_hat.bodies[sj], theta_true.bodies[sj]) /
             (2.0 * gains.gamma_theta(j));
    }
    return v;
}

}  // namespace smsim
