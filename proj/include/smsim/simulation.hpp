#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "smsim/scenario.hpp"

namespace smsim {

/// Scalar statistics of one run, written as summary.json. Everything except
/// the `iss` block is recomputable from the telemetry CSV alone.
struct RunSummary {
    bool ok = true;
    double fail_time_s = -1.0;
    double duration_s = 0.0;
    double final_window_start_s = 0.0;

    // mean norms over the final window
    double p_err_asym = 0.0;
    double euler_err_asym = 0.0;
    double sigma_err_asym = 0.0;
    double q_err_asym = 0.0;
    double v_err_asym = 0.0;
    double w_err_asym = 0.0;
    double qd_err_asym = 0.0;
    double obs_err_asym = 0.0;
    double xerr_pos_asym = 0.0;
    double xerr_att_asym = 0.0;
    double xerr_joint_asym = 0.0;
    double xhat_err_asym = 0.0;

    // terminal values (last record)
    double p_err_final = 0.0;
    double euler_err_final = 0.0;
    double q_err_final = 0.0;
    VecX lambda_final;

    std::vector<double> min_eig_floor;  // per body, min over time
    double lambda_min_seen = 1.0;
    double lambda_max_seen = 1.0;
    double lyapunov_max_step_increase = 0.0;  // max (V_k+1 - V_k) / (1 + V_k)
    double sat_rcs_fraction = 0.0;
    double sat_joint_fraction = 0.0;
    long control_steps = 0;

    // gain-dependent extras, filled by the runner only
    IssReport iss;

    std::string to_json_string() const;
};

/// Column-labelled telemetry of one run, one row per control step.
struct Telemetry {
    std::vector<std::string> columns;
    std::vector<VecX> rows;

    int column(const std::string& name) const;  // -1 when absent
};

void write_telemetry_csv(const std::string& path, const Telemetry& telemetry);
Telemetry read_telemetry_csv(const std::string& path);

/// Summary statistics derived from telemetry alone (no gains, no config).
RunSummary summarize_telemetry(const Telemetry& telemetry,
                               double window_fraction = 0.2);

struct RunResult {
    bool ok = true;
    double fail_time_s = -1.0;
    RunSummary summary;
};

/// One deterministic closed-loop world: plant, actuators, observer,
/// adaptation, reference, telemetry. Single-threaded stepping.
class Simulation {
  public:
    explicit Simulation(const ScenarioConfig& cfg);

    /// One control cycle (controller update + physics substeps).
    /// Returns false once the configured duration is reached.
    bool control_cycle();

    /// Run to the end of the scenario, collecting telemetry.
    /// Throws NumericalBlowupError on divergence.
    void run_to_end();

    double time() const { return t_; }
    const ChainModel& chain() const { return chain_; }
    const SystemState& state() const { return state_; }
    const EstimatorState& estimator_state() const { return est_; }
    const ParamSet& truth() const { return theta_true_; }
    const Telemetry& telemetry() const { return telemetry_; }
    RunSummary summarize() const;

    /// Execute a scenario and persist telemetry.csv + summary.json.
    static RunResult run(const ScenarioConfig& cfg, const std::string& out_dir);

  private:
    void record_telemetry(const VecX& u_cmd, const VecX& u_real, bool sat_rcs,
                          bool sat_joint);
    void physics_step(const VecX& u_real, const VecX& u_est);
    VecX estimator_input_vector(const VecX& u_cmd,
                                const ActuatorStack::Output& out) const;

    ScenarioConfig cfg_;
    ChainModel chain_;
    ParamSet theta_true_;
    EstimatorGains egains_;
    ControllerGains cgains_;
    std::vector<ParamBounds> bounds_;
    std::vector<bool> adapt_;
    ReferenceTimeline ref_;
    ActuatorStack actuators_;
    std::mt19937_64 noise_rng_;

    double t_ = 0.0;
    long cycle_ = 0;
    int substeps_ = 1;
    SystemState state_;
    EstimatorState est_;
    Telemetry telemetry_;
};

}  // namespace smsim
