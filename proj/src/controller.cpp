#include "smsim/controller.hpp"

#include <cmath>
#include <random>

namespace smsim {

ControllerGains ControllerGains::defaults(int n_joints) {
    ControllerGains g;
    g.k_q = 0.2 * MatX::Identity(n_joints, n_joints);
    g.k_obs = 2.5 * MatX::Identity(6 + n_joints, 6 + n_joints);
    return g;
}

void ControllerGains::validate() const {
    auto check_pd = [](const MatX& m, const char* name) {
        Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
        if (m.rows() != m.cols() || es.eigenvalues()(0) <= 0.0) {
            throw ConfigError(std::string(name) + " must be positive definite");
        }
    };
    check_pd(k_p, "k_p");
    check_pd(k_sigma, "k_sigma");
    check_pd(k_q, "k_q");
    check_pd(k_obs, "k_obs");
}

MatX kbar_matrix(const Mat3& r_b, const ControllerGains& gains, int n_joints) {
    const int nv = 6 + n_joints;
    MatX k = MatX::Zero(nv, nv);
    k.topLeftCorner<3, 3>() = r_b.transpose() * gains.k_p;
    k.block<3, 3>(3, 3) = gains.k_sigma;
    k.bottomRightCorner(n_joints, n_joints) = gains.k_q;
    return k;
}

MatX kbar_dot(const Mat3& r_b, const Vec3& w_b, const ControllerGains& gains,
              int n_joints) {
    const int nv = 6 + n_joints;
    MatX kd = MatX::Zero(nv, nv);
    kd.topLeftCorner<3, 3>() = -skew(w_b) * r_b.transpose() * gains.k_p;
    return kd;
}

ErrorBundle compute_errors(const SystemState& state, const VecX& xhat_dot,
                           const RefSample& ref, const ControllerGains& gains) {
    const int n = static_cast<int>(state.q.size());
    ErrorBundle e;
    e.p_err = state.p_b - ref.p;
    e.v_err = state.xdot.head<3>() - state.R_b.transpose() * ref.pd;

    const Mat3 r_tilde = ref.R.transpose() * state.R_b;
    e.sigma_err = mrp_from_rotation(r_tilde);
    e.euler_err = rotation_to_euler_xyz(r_tilde);
    e.w_err = state.xdot.segment<3>(3) - r_tilde.transpose() * ref.w;

    e.q_err = state.q - ref.q;
    e.qd_err = state.xdot.tail(n) - ref.qd;

    e.xbar.resize(6 + n);
    e.xbar << e.p_err, e.sigma_err, e.q_err;
    e.xtilde_dot.resize(6 + n);
    e.xtilde_dot << e.v_err, e.w_err, e.qd_err;

    e.kbar = kbar_matrix(state.R_b, gains, n);
    e.xerr_dot = e.kbar * e.xbar + e.xtilde_dot;
    e.xhat_err_dot = e.xerr_dot - (state.xdot - xhat_dot);

    e.xbar_dot.resize(6 + n);
    e.xbar_dot.head<3>() = state.R_b * e.v_err;  // inertial-frame p_err rate
    e.xbar_dot.segment<3>(3) = mrp_rate(e.sigma_err, e.w_err, gains.mrp_form);
    e.xbar_dot.tail(n) = e.qd_err;
    return e;
}

VecX reference_acceleration(const SystemState& state, const ErrorBundle& err,
                            const RefSample& ref) {
    const int n = static_cast<int>(state.q.size());
    const Vec3 w_b = state.xdot.segment<3>(3);
    VecX a(6 + n);
    a.head<3>() =
        state.R_b.transpose() * ref.pdd - w_b.cross(state.R_b.transpose() * ref.pd);
    const Mat3 r_tilde = ref.R.transpose() * state.R_b;
    a.segment<3>(3) = r_tilde.transpose() * ref.wd -
                      err.w_err.cross(r_tilde.transpose() * ref.w);
    a.tail(n) = ref.qdd;
    return a;
}

VecX control_input(const ChainModel& model, const KinematicsCache& kin,
                   const SystemState& state, const EstimatorState& est,
                   const RefSample& ref, const ControllerGains& gains,
                   double lambda_min) {
    if ((est.lambda_hat.array() < lambda_min - 1e-12).any()) {
        throw EfficiencyRangeError(
            "control_input: efficiency estimate below lambda_min");
    }
    const int n = model.n_joints();
    const ErrorBundle err = compute_errors(state, est.xhat_dot, ref, gains);
    const MatX m_hat = mass_matrix(model, kin, est.theta_hat);
    const MatX c_hat = coriolis_matrix(model, kin, est.theta_hat);
    const MatX kdot = kbar_dot(state.R_b, state.xdot.segment<3>(3), gains, n);
    const VecX xddot_ref = reference_acceleration(state, err, ref);

    VecX bracket = c_hat * est.xhat_dot;
    bracket.noalias() -= m_hat * (err.kbar * err.xbar_dot + kdot * err.xbar);
    bracket.noalias() -= gains.k_obs * err.xerr_dot;
    bracket.noalias() += m_hat * xddot_ref;
    return bracket.cwiseQuotient(est.lambda_hat);
}

IssReport iss_bounds(const ControllerGains& gains, const ChainModel& model,
                     const ParamSet& nominal,
                     const std::vector<ParamBounds>& bounds, int samples,
                     unsigned seed) {
    IssReport r;
    auto min_eig = [](const MatX& m) {
        if (m.rows() == 0) return std::numeric_limits<double>::infinity();
        Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    };
    r.position_gain = 1.0 / min_eig(gains.k_p);
    r.attitude_gain = 1.0 / min_eig(gains.k_sigma);
    r.joint_gain = 1.0 / min_eig(gains.k_q);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double max_eig = 0.0;
    for (int s = 0; s < samples; ++s) {
        VecX q(model.n_joints());
        for (int i = 0; i < q.size(); ++i) q(i) = (s == 0) ? 0.0 : angle(rng);
        ParamSet set = nominal;
        if (s > 0) {
            for (int j = 0; j < set.n_bodies(); ++j) {
                const size_t sj = static_cast<size_t>(j);
                // radial scaling stays consistent and sweeps the mass box
                const double nominal_mass = nominal.bodies[sj].mass;
                const double lo = bounds[sj].mass_min / nominal_mass;
                const double hi = bounds[sj].mass_max / nominal_mass;
                const double scale = lo + (hi - lo) * unit(rng);
                set.bodies[sj] = nominal.bodies[sj].scaled(scale);
            }
        }
        const MatX m = mass_matrix(model, q, set);
        Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
        max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
    }
    r.mass_matrix_max_eig = max_eig;
    r.observer_gain = max_eig / min_eig(gains.k_obs);
    return r;
}

}  // namespace smsim
