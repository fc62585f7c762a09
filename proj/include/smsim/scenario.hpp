#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smsim/actuation.hpp"
#include "smsim/controller.hpp"
#include "smsim/estimator.hpp"
#include "smsim/multibody.hpp"
#include "smsim/reference.hpp"

namespace smsim {

enum class EstimatorInput { Commanded, Realized, ObserverModel };

/// One reference phase in the scenario timeline.
struct PhaseConfig {
    std::string type;  // "hold" | "base_translation" | "ee_eight" | "joint_sine"
    double t_end_s = 0.0;
    Vec3 displacement_m = Vec3::Zero();      // base_translation
    double amplitude_m = 0.4;                // ee_eight
    double period_s = 50.0;                  // ee_eight / joint_sine
    Vec3 axis1 = Vec3(0, 1, 0);              // ee_eight
    Vec3 axis2 = Vec3(0, 0, 1);              // ee_eight
    VecX joint_amplitude_rad;                // joint_sine
};

struct BodyConfig {
    double mass_kg = 0.0;
    Vec3 first_moment_kgm = Vec3::Zero();
    Vec6 inertia_kgm2 = Vec6::Zero();  // xx yy zz xy yz zx

    InertialParams to_params() const;
    static BodyConfig from_params(const InertialParams& p);
};

struct ModelConfig {
    std::vector<DhRow> dh_rows;
    Vec3 mount_translation_m = Vec3::Zero();
    Vec3 mount_rotation_xyz_rad = Vec3::Zero();
    Vec3 ee_translation_m = Vec3::Zero();
    Vec3 ee_rotation_xyz_rad = Vec3::Zero();
    BodyConfig base_body;
    std::vector<BodyConfig> link_bodies;  // truth, per link
    BodyConfig object_truth;              // merged into the last link body
    BodyConfig object_apriori;

    ChainModel to_chain() const;
    ParamSet truth_params() const;
    ParamSet apriori_params() const;
};

struct ActuatorsConfig {
    std::string fidelity = "full";  // "full" | "ideal" | "observer_model"
    double thruster_half_extent_m = 0.5;
    double thruster_max_thrust_newton = 10.0;
    double pwm_window_s = 0.1;
    double min_on_time_s = 0.02;
    double wheel_axis_torque_newton_meter = 0.5;
    double joint_torque_limit_newton_meter = 10.0;
    double joint_lag_time_constant_s = 0.005;
    std::vector<FaultEvent> fault_schedule;

    ActuatorConfig to_actuators(double lambda_min) const;
};

struct GainsConfig {
    VecX k_obs_diag;  // (6+n)
    double k_p = 0.2;
    double k_sigma = 0.2;
    double k_q = 0.2;
    double gamma_theta = 20.0;
    double gamma_lambda = 2.0;
    double delta = 1e-3;
    double lambda_min = 0.1;
    double theta_rate_limit = 1e12;  // Riemannian speed cap on the update
    std::string controller_mrp_form = "paper";  // "paper" | "textbook"
};

struct EstimatorConfig {
    std::string input = "commanded";  // "commanded"|"realized"|"observer_model"
    std::vector<bool> adapt_bodies;   // empty = all
    VecX initial_observer_velocity_offset;  // empty = zeros
    double bounds_mass_factor = 10.0;
};

struct InitialStateConfig {
    Vec3 base_position_offset_m = Vec3::Zero();
    Vec3 base_attitude_offset_xyz_rad = Vec3::Zero();
    VecX joint_offsets_rad;  // empty = zeros
};

struct DisturbanceConfig {
    double t_start_s = std::numeric_limits<double>::infinity();
    VecX u_offset;  // added to the realized pre-efficiency force
};

struct NoiseConfig {
    bool enabled = false;
    double std_q_rad = 0.0;
    double std_xdot = 0.0;
};

struct ScenarioConfig {
    int schema_version = 1;
    std::string name = "scenario";
    double duration_s = 10.0;
    double physics_dt_s = 1e-3;
    double control_dt_s = 1e-2;
    uint64_t seed = 0;
    bool truth_diagnostics = true;
    bool control_enabled = true;

    ModelConfig model;
    ActuatorsConfig actuators;
    GainsConfig gains;
    EstimatorConfig estimator;
    VecX reference_home_joints_rad;
    std::vector<PhaseConfig> timeline;
    InitialStateConfig initial_state;
    DisturbanceConfig disturbance;
    NoiseConfig noise;

    int n_joints() const { return static_cast<int>(model.dh_rows.size()); }

    /// Throws ConfigError on any schema violation.
    void validate() const;

    std::string to_json_string() const;
    static ScenarioConfig from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static ScenarioConfig load(const std::string& path);

    EstimatorGains estimator_gains() const;
    ControllerGains controller_gains() const;
    EstimatorInput estimator_input() const;
    std::vector<ParamBounds> param_bounds() const;
    std::vector<bool> adapt_flags() const;
    ReferenceTimeline build_timeline() const;
};

/// Inertial parameters of one DH link modeled as a hollow cylinder running
/// from the link frame origin back to the parent joint.
InertialParams cylinder_link_params(const DhRow& row, double outer_radius_m,
                                    double thickness_m, double density_kgpm3);

/// Full-fidelity reproduction scenario: chaser satellite, seven-link arm with
/// hollow aluminum links and a grasped object whose a-priori data is wrong,
/// RCS/RW/joint actuators with the efficiency fault at t = 120 s.
ScenarioConfig build_paper_scenario();

/// Two-joint reduction with light bodies for fast property runs; same code
/// paths, ideal actuators, persistent excitation over the first 30 s.
ScenarioConfig build_reduced_scenario();

}  // namespace smsim
