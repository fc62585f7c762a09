#include "smsim/simulation.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace smsim {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9e", v);
    return buf;
}

double block_norm(const VecX& row, int start, int count) {
    return row.segment(start, count).norm();
}

}  // namespace

int Telemetry::column(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
}

void write_telemetry_csv(const std::string& path, const Telemetry& telemetry) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open telemetry file for writing: " + path);
    }
    for (size_t i = 0; i < telemetry.columns.size(); ++i) {
        if (i) out << ',';
        out << telemetry.columns[i];
    }
    out << '\n';
    for (const VecX& row : telemetry.rows) {
        for (int i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << fmt(row(i));
        }
        out << '\n';
    }
}

Telemetry read_telemetry_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open telemetry file: " + path);
    }
    Telemetry t;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("telemetry file is empty: " + path);
    }
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        VecX row(static_cast<int>(t.columns.size()));
        std::stringstream ss(line);
        int i = 0;
        while (std::getline(ss, cell, ',') && i < row.size()) {
            row(i++) = std::stod(cell);
        }
        if (i != row.size()) {
            throw ConfigError("telemetry row width mismatch in " + path);
        }
        t.rows.push_back(row);
    }
    return t;
}

namespace {
const ScenarioConfig& validated(const ScenarioConfig& cfg) {
    cfg.validate();
    return cfg;
}
}  // namespace

Simulation::Simulation(const ScenarioConfig& cfg)
    : cfg_(validated(cfg)),
      chain_(cfg.model.to_chain()),
      theta_true_(cfg.model.truth_params()),
      egains_(cfg.estimator_gains()),
      cgains_(cfg.controller_gains()),
      bounds_(cfg.param_bounds()),
      adapt_(cfg.adapt_flags()),
      ref_(cfg.build_timeline()),
      actuators_(cfg.actuators.to_actuators(cfg.gains.lambda_min), cfg.n_joints()),
      noise_rng_(cfg.seed) {
    const int n = chain_.n_joints();
    const int nv = chain_.n_vel();
    substeps_ = static_cast<int>(std::llround(cfg_.control_dt_s / cfg_.physics_dt_s));

    const RefSample ref0 = ref_.sample(0.0);
    state_.p_b = ref0.p + cfg_.initial_state.base_position_offset_m;
    const Vec3 att = cfg_.initial_state.base_attitude_offset_xyz_rad;
    state_.R_b = ref0.R * euler_xyz_to_rotation(att(0), att(1), att(2));
    state_.q = ref0.q;
    if (cfg_.initial_state.joint_offsets_rad.size() == n) {
        state_.q += cfg_.initial_state.joint_offsets_rad;
    }
    state_.xdot = VecX::Zero(nv);

    est_.xhat_dot = state_.xdot;
    if (cfg_.estimator.initial_observer_velocity_offset.size() == nv) {
        est_.xhat_dot += cfg_.estimator.initial_observer_velocity_offset;
    }
    est_.theta_hat = cfg_.model.apriori_params();
    est_.lambda_hat = VecX::Ones(nv);

    // telemetry layout, fixed for the whole run
    auto push = [&](const std::string& name) {
        telemetry_.columns.push_back(name);
    };
    push("t");
    for (const char* axis : {"x", "y", "z"}) push(std::string("p_err_") + axis);
    for (const char* axis : {"x", "y", "z"}) push(std::string("sigma_err_") + axis);
    for (const char* axis : {"x", "y", "z"}) push(std::string("euler_err_") + axis);
    for (int i = 1; i <= n; ++i) push("q_err_" + std::to_string(i));
    for (const char* axis : {"x", "y", "z"}) push(std::string("v_err_") + axis);
    for (const char* axis : {"x", "y", "z"}) push(std::string("w_err_") + axis);
    for (int i = 1; i <= n; ++i) push("qd_err_" + std::to_string(i));
    for (int i = 1; i <= nv; ++i) push("obs_err_" + std::to_string(i));
    push("xerr_pos_norm");
    push("xerr_att_norm");
    push("xerr_joint_norm");
    push("xhat_err_norm");
    for (int j = 0; j <= n; ++j) {
        const std::string base = "th_b" + std::to_string(j) + "_";
        const char* names[10] = {"m",  "hx",  "hy",  "hz",  "ixx",
                                 "iyy", "izz", "ixy", "iyz", "izx"};
        for (const char* s : names) push(base + s);
    }
    for (int i = 1; i <= 4; ++i) push("eig_ee_" + std::to_string(i));
    for (int j = 0; j <= n; ++j) push("mineig_b" + std::to_string(j));
    for (int i = 1; i <= nv; ++i) push("lambda_" + std::to_string(i));
    for (int i = 1; i <= nv; ++i) push("u_cmd_" + std::to_string(i));
    for (int i = 1; i <= nv; ++i) push("u_real_" + std::to_string(i));
    push("lyapunov");
    push("sat_rcs");
    push("sat_joint");
}

VecX Simulation::estimator_input_vector(const VecX& u_cmd,
                                        const ActuatorStack::Output& out) const {
    switch (cfg_.estimator_input()) {
        case EstimatorInput::Commanded:
            return u_cmd;
        case EstimatorInput::Realized:
            return out.u_pre;
        case EstimatorInput::ObserverModel: {
            // clip plus RCS deadband, no pulses, no lag
            VecX u = u_cmd;
            const Vec6 cap = actuators_.axis_capability();
            for (int i = 0; i < 6; ++i) {
                const double dead = cap(i) * cfg_.actuators.min_on_time_s /
                                    (2.0 * cfg_.actuators.pwm_window_s);
                if (std::abs(u(i)) < dead) u(i) = 0.0;
                u(i) = std::clamp(u(i), -cap(i), cap(i));
            }
            for (int j = 0; j < chain_.n_joints(); ++j) {
                u(6 + j) = std::clamp(
                    u(6 + j), -cfg_.actuators.joint_torque_limit_newton_meter,
                    cfg_.actuators.joint_torque_limit_newton_meter);
            }
            return u;
        }
    }
    return u_cmd;
}

void Simulation::physics_step(const VecX& u_real, const VecX& u_est) {
    const int n = chain_.n_joints();
    const int nv = chain_.n_vel();
    const int nb = chain_.n_bodies();
    const double dt = cfg_.physics_dt_s;
    const Mat3 r0 = state_.R_b;

    // flat integration state: [p, phi, q, xdot, xhat_dot, theta_hat, lambda_hat]
    const int off_phi = 3;
    const int off_q = 6;
    const int off_xd = 6 + n;
    const int off_oxd = off_xd + nv;
    const int off_th = off_oxd + nv;
    const int off_lam = off_th + 10 * nb;
    const int dim = off_lam + nv;

    VecX y(dim);
    y.head<3>() = state_.p_b;
    y.segment<3>(off_phi).setZero();
    y.segment(off_q, n) = state_.q;
    y.segment(off_xd, nv) = state_.xdot;
    y.segment(off_oxd, nv) = est_.xhat_dot;
    y.segment(off_th, 10 * nb) = est_.theta_hat.to_vector();
    y.segment(off_lam, nv) = est_.lambda_hat;

    auto deriv = [&](const VecX& s) {
        VecX d(dim);
        const VecX q = s.segment(off_q, n);
        const VecX xdot = s.segment(off_xd, nv);
        EstimatorState est;
        est.xhat_dot = s.segment(off_oxd, nv);
        est.theta_hat = ParamSet::from_vector(s.segment(off_th, 10 * nb));
        est.lambda_hat = s.segment(off_lam, nv);

        const KinematicsCache kin = compute_kinematics(chain_, q, xdot);

        // plant
        const MatX m_true = mass_matrix(chain_, kin, theta_true_);
        const MatX c_true = coriolis_matrix(chain_, kin, theta_true_);
        Eigen::LDLT<MatX> ldlt(m_true);
        const VecX xddot = ldlt.solve(u_real - c_true * xdot);

        // observer and adaptation
        const VecX xhat_ddot =
            observer_acceleration(chain_, kin, xdot, est, u_est, egains_);
        const auto th_rates = theta_rates(chain_, kin, xdot, est, xhat_ddot,
                                          egains_, bounds_, adapt_);
        const VecX lam_rate = lambda_rate(u_est, xdot, est, egains_);

        d.head<3>() = r0 * exp_so3(s.segment<3>(off_phi)) * xdot.head<3>();
        d.segment<3>(off_phi) =
            so3_chart_rate(s.segment<3>(off_phi), xdot.segment<3>(3));
        d.segment(off_q, n) = xdot.tail(n);
        d.segment(off_xd, nv) = xddot;
        d.segment(off_oxd, nv) = xhat_ddot;
        for (int j = 0; j < nb; ++j) {
            d.segment<10>(off_th + 10 * j) = th_rates[static_cast<size_t>(j)];
        }
        d.segment(off_lam, nv) = lam_rate;
        return d;
    };

    const VecX k1 = deriv(y);
    const VecX k2 = deriv(y + 0.5 * dt * k1);
    const VecX k3 = deriv(y + 0.5 * dt * k2);
    const VecX k4 = deriv(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    state_.p_b = y.head<3>();
    state_.R_b = r0 * exp_so3(y.segment<3>(off_phi));
    state_.q = y.segment(off_q, n);
    state_.xdot = y.segment(off_xd, nv);
    est_.xhat_dot = y.segment(off_oxd, nv);
    est_.theta_hat = ParamSet::from_vector(y.segment(off_th, 10 * nb));
    est_.lambda_hat = y.segment(off_lam, nv);

    // re-assert the projections after the discrete step
    for (int j = 0; j < nb; ++j) {
        const size_t sj = static_cast<size_t>(j);
        est_.theta_hat.bodies[sj] =
            clamp_to_bounds(est_.theta_hat.bodies[sj], bounds_[sj]);
    }
    est_.lambda_hat =
        est_.lambda_hat.cwiseMax(egains_.lambda_min).cwiseMin(1.0);

    if (!y.allFinite() || state_.xdot.lpNorm<Eigen::Infinity>() > 1e9 ||
        state_.p_b.lpNorm<Eigen::Infinity>() > 1e9 ||
        est_.xhat_dot.lpNorm<Eigen::Infinity>() > 1e9) {
        throw NumericalBlowupError("simulation state left the admissible range",
                                   t_);
    }
}

void Simulation::record_telemetry(const VecX& u_cmd, const VecX& u_real,
                                  bool sat_rcs, bool sat_joint) {
    const int n = chain_.n_joints();
    const int nv = chain_.n_vel();
    const int nb = chain_.n_bodies();
    const RefSample ref = ref_.sample(t_);
    const ErrorBundle err = compute_errors(state_, est_.xhat_dot, ref, cgains_);

    VecX row(static_cast<int>(telemetry_.columns.size()));
    int k = 0;
    row(k++) = t_;
    for (int i = 0; i < 3; ++i) row(k++) = err.p_err(i);
    for (int i = 0; i < 3; ++i) row(k++) = err.sigma_err(i);
    for (int i = 0; i < 3; ++i) row(k++) = err.euler_err(i);
    for (int i = 0; i < n; ++i) row(k++) = err.q_err(i);
    for (int i = 0; i < 3; ++i) row(k++) = err.v_err(i);
    for (int i = 0; i < 3; ++i) row(k++) = err.w_err(i);
    for (int i = 0; i < n; ++i) row(k++) = err.qd_err(i);
    const VecX obs_err = state_.xdot - est_.xhat_dot;
    for (int i = 0; i < nv; ++i) row(k++) = obs_err(i);
    row(k++) = err.xerr_dot.head<3>().norm();
    row(k++) = err.xerr_dot.segment<3>(3).norm();
    row(k++) = err.xerr_dot.tail(n).norm();
    row(k++) = err.xhat_err_dot.norm();
    const VecX theta = est_.theta_hat.to_vector();
    for (int i = 0; i < 10 * nb; ++i) row(k++) = theta(i);
    {
        Eigen::SelfAdjointEigenSolver<Mat4> es(
            to_pseudo_inertia(est_.theta_hat.bodies.back()),
            Eigen::EigenvaluesOnly);
        for (int i = 0; i < 4; ++i) row(k++) = es.eigenvalues()(i);
    }
    for (int j = 0; j < nb; ++j) {
        row(k++) =
            is_consistent(est_.theta_hat.bodies[static_cast<size_t>(j)])
                .min_eigenvalue;
    }
    for (int i = 0; i < nv; ++i) row(k++) = est_.lambda_hat(i);
    for (int i = 0; i < nv; ++i) row(k++) = u_cmd(i);
    for (int i = 0; i < nv; ++i) row(k++) = u_real(i);
    if (cfg_.truth_diagnostics) {
        const KinematicsCache kin =
            compute_kinematics(chain_, state_.q, state_.xdot);
        row(k++) = lyapunov_value(chain_, kin, state_.xdot, theta_true_,
                                  actuators_.efficiency(t_), est_, egains_);
    } else {
        row(k++) = 0.0;
    }
    row(k++) = sat_rcs ? 1.0 : 0.0;
    row(k++) = sat_joint ? 1.0 : 0.0;
    telemetry_.rows.push_back(row);
}

bool Simulation::control_cycle() {
    if (t_ >= cfg_.duration_s - 1e-12) return false;
    const int nv = chain_.n_vel();

    // sampled measurements (ideal by default)
    SystemState measured = state_;
    if (cfg_.noise.enabled) {
        std::normal_distribution<double> dq(0.0, cfg_.noise.std_q_rad);
        std::normal_distribution<double> dv(0.0, cfg_.noise.std_xdot);
        for (int i = 0; i < measured.q.size(); ++i) measured.q(i) += dq(noise_rng_);
        for (int i = 0; i < nv; ++i) measured.xdot(i) += dv(noise_rng_);
    }

    VecX u_cmd = VecX::Zero(nv);
    if (cfg_.control_enabled) {
        const RefSample ref = ref_.sample(t_);
        const KinematicsCache kin =
            compute_kinematics(chain_, measured.q, measured.xdot);
        u_cmd = control_input(chain_, kin, measured, est_, ref, cgains_,
                              egains_.lambda_min);
    }
    actuators_.set_command(u_cmd, t_);

    bool sat_rcs = false;
    bool sat_joint = false;
    bool recorded = false;
    for (int s = 0; s < substeps_; ++s) {
        ActuatorStack::Output out = actuators_.realize(t_, cfg_.physics_dt_s);
        if (t_ >= cfg_.disturbance.t_start_s &&
            cfg_.disturbance.u_offset.size() == nv) {
            out.u_pre += cfg_.disturbance.u_offset;
            out.u_real += actuators_.efficiency(t_).cwiseProduct(
                cfg_.disturbance.u_offset);
        }
        sat_rcs = sat_rcs || out.thruster_saturated || out.wheel_saturated;
        sat_joint = sat_joint || out.joint_saturated;
        if (!recorded) {
            record_telemetry(u_cmd, out.u_real, out.thruster_saturated,
                             out.joint_saturated);
            recorded = true;
        }
        const VecX u_est = estimator_input_vector(u_cmd, out);
        physics_step(out.u_real, u_est);
        t_ += cfg_.physics_dt_s;
    }
    ++cycle_;
    return true;
}

void Simulation::run_to_end() {
    while (control_cycle()) {
    }
}

RunSummary Simulation::summarize() const { return summarize_telemetry(telemetry_); }

RunSummary summarize_telemetry(const Telemetry& telemetry,
                               double window_fraction) {
    RunSummary s;
    if (telemetry.rows.empty()) return s;
    const int n_rows = static_cast<int>(telemetry.rows.size());
    const double t_last = telemetry.rows.back()(0);
    s.duration_s = t_last;
    s.final_window_start_s = t_last * (1.0 - window_fraction);
    s.control_steps = n_rows;

    const int c_p = telemetry.column("p_err_x");
    const int c_sigma = telemetry.column("sigma_err_x");
    const int c_euler = telemetry.column("euler_err_x");
    const int c_q = telemetry.column("q_err_1");
    const int c_v = telemetry.column("v_err_x");
    const int c_w = telemetry.column("w_err_x");
    const int c_qd = telemetry.column("qd_err_1");
    const int c_obs = telemetry.column("obs_err_1");
    const int c_xp = telemetry.column("xerr_pos_norm");
    const int c_xa = telemetry.column("xerr_att_norm");
    const int c_xj = telemetry.column("xerr_joint_norm");
    const int c_xh = telemetry.column("xhat_err_norm");
    const int c_lyap = telemetry.column("lyapunov");
    const int c_srcs = telemetry.column("sat_rcs");
    const int c_sjnt = telemetry.column("sat_joint");

    int n_joints = 0;
    while (telemetry.column("q_err_" + std::to_string(n_joints + 1)) >= 0) {
        ++n_joints;
    }
    int nb = 0;
    while (telemetry.column("mineig_b" + std::to_string(nb)) >= 0) ++nb;
    const int nv = 6 + n_joints;
    const int c_lam = telemetry.column("lambda_1");
    const int c_mineig0 = telemetry.column("mineig_b0");

    s.min_eig_floor.assign(static_cast<size_t>(nb),
                           std::numeric_limits<double>::infinity());
    int window_count = 0;
    double prev_lyap = 0.0;
    for (int r = 0; r < n_rows; ++r) {
        const VecX& row = telemetry.rows[static_cast<size_t>(r)];
        const double t = row(0);
        for (int j = 0; j < nb; ++j) {
            s.min_eig_floor[static_cast<size_t>(j)] = std::min(
                s.min_eig_floor[static_cast<size_t>(j)], row(c_mineig0 + j));
        }
        for (int i = 0; i < nv; ++i) {
            s.lambda_min_seen = std::min(s.lambda_min_seen, row(c_lam + i));
            s.lambda_max_seen = std::max(s.lambda_max_seen, row(c_lam + i));
        }
        if (c_lyap >= 0) {
            const double v = row(c_lyap);
            if (r > 0) {
                s.lyapunov_max_step_increase =
                    std::max(s.lyapunov_max_step_increase,
                             (v - prev_lyap) / (1.0 + prev_lyap));
            }
            prev_lyap = v;
        }
        s.sat_rcs_fraction += row(c_srcs);
        s.sat_joint_fraction += row(c_sjnt);

        if (t >= s.final_window_start_s) {
            s.p_err_asym += block_norm(row, c_p, 3);
            s.sigma_err_asym += block_norm(row, c_sigma, 3);
            s.euler_err_asym += block_norm(row, c_euler, 3);
            s.q_err_asym += block_norm(row, c_q, n_joints);
            s.v_err_asym += block_norm(row, c_v, 3);
            s.w_err_asym += block_norm(row, c_w, 3);
            s.qd_err_asym += block_norm(row, c_qd, n_joints);
            s.obs_err_asym += block_norm(row, c_obs, nv);
            s.xerr_pos_asym += row(c_xp);
            s.xerr_att_asym += row(c_xa);
            s.xerr_joint_asym += row(c_xj);
            s.xhat_err_asym += row(c_xh);
            ++window_count;
        }
    }
    if (window_count > 0) {
        for (double* field :
             {&s.p_err_asym, &s.sigma_err_asym, &s.euler_err_asym, &s.q_err_asym,
              &s.v_err_asym, &s.w_err_asym, &s.qd_err_asym, &s.obs_err_asym,
              &s.xerr_pos_asym, &s.xerr_att_asym, &s.xerr_joint_asym,
              &s.xhat_err_asym}) {
            *field /= window_count;
        }
    }
    s.sat_rcs_fraction /= n_rows;
    s.sat_joint_fraction /= n_rows;

    const VecX& last = telemetry.rows.back();
    s.p_err_final = block_norm(last, c_p, 3);
    s.euler_err_final = block_norm(last, c_euler, 3);
    s.q_err_final = block_norm(last, c_q, n_joints);
    s.lambda_final.resize(nv);
    for (int i = 0; i < nv; ++i) s.lambda_final(i) = last(c_lam + i);
    return s;
}

std::string RunSummary::to_json_string() const {
    Json j;
    j["ok"] = ok;
    j["fail_time_s"] = fail_time_s;
    j["duration_s"] = duration_s;
    j["final_window_start_s"] = final_window_start_s;
    j["control_steps"] = control_steps;
    Json asym;
    asym["p_err"] = p_err_asym;
    asym["sigma_err"] = sigma_err_asym;
    asym["euler_err"] = euler_err_asym;
    asym["q_err"] = q_err_asym;
    asym["v_err"] = v_err_asym;
    asym["w_err"] = w_err_asym;
    asym["qd_err"] = qd_err_asym;
    asym["obs_err"] = obs_err_asym;
    asym["xerr_pos"] = xerr_pos_asym;
    asym["xerr_att"] = xerr_att_asym;
    asym["xerr_joint"] = xerr_joint_asym;
    asym["xhat_err"] = xhat_err_asym;
    j["asymptotic"] = asym;
    Json term;
    term["p_err"] = p_err_final;
    term["euler_err"] = euler_err_final;
    term["q_err"] = q_err_final;
    Json lam = Json::array();
    for (int i = 0; i < lambda_final.size(); ++i) lam.push_back(lambda_final(i));
    term["lambda"] = lam;
    j["terminal"] = term;
    Json floors = Json::array();
    for (double f : min_eig_floor) floors.push_back(f);
    j["min_eig_floor"] = floors;
    j["lambda_range"] = Json::array({lambda_min_seen, lambda_max_seen});
    j["lyapunov_max_step_increase"] = lyapunov_max_step_increase;
    j["saturation_fraction"] =
        Json{{"rcs", sat_rcs_fraction}, {"joint", sat_joint_fraction}};
    Json iss_j;
    iss_j["position_gain"] = iss.position_gain;
    iss_j["attitude_gain"] = iss.attitude_gain;
    iss_j["joint_gain"] = iss.joint_gain;
    iss_j["observer_gain"] = iss.observer_gain;
    iss_j["mass_matrix_max_eig"] = iss.mass_matrix_max_eig;
    j["iss"] = iss_j;
    return j.dump(2) + "\n";
}

RunResult Simulation::run(const ScenarioConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Simulation sim(cfg);
    RunResult result;
    try {
        sim.run_to_end();
    } catch (const NumericalBlowupError& e) {
        result.ok = false;
        result.fail_time_s = e.time;
    }
    result.summary = sim.summarize();
    result.summary.ok = result.ok;
    result.summary.fail_time_s = result.fail_time_s;
    result.summary.iss = iss_bounds(sim.cgains_, sim.chain_,
                                    cfg.model.apriori_params(), sim.bounds_, 64,
                                    static_cast<unsigned>(cfg.seed));
    // projection breaches also fail the run contract
    for (size_t j = 0; j < result.summary.min_eig_floor.size(); ++j) {
        if (result.summary.min_eig_floor[j] < sim.bounds_[j].eps_p - 1e-9) {
            result.ok = false;
            result.summary.ok = false;
        }
    }
    if (result.summary.lambda_min_seen < cfg.gains.lambda_min - 1e-9 ||
        result.summary.lambda_max_seen > 1.0 + 1e-9) {
        result.ok = false;
        result.summary.ok = false;
    }
    write_telemetry_csv(out_dir + "/telemetry.csv", sim.telemetry());
    std::ofstream out(out_dir + "/summary.json", std::ios::binary);
    out << result.summary.to_json_string();
    return result;
}

}  // namespace smsim
