#pragma once

#include <vector>

#include "smsim/types.hpp"

namespace smsim {

/// Bounded-variable least squares: minimize |A x - b| with lo <= x <= hi,
/// by cyclic coordinate descent. Deterministic; converges for any A.
VecX bounded_least_squares(const MatX& a, const VecX& b, const VecX& lo,
                           const VecX& hi, int max_sweeps = 3000,
                           double tol = 1e-15);

struct Thruster {
    Vec3 position = Vec3::Zero();   // m, frame B
    Vec3 direction = Vec3::UnitX();  // unit, frame B
    double max_thrust = 10.0;       // N
};

/// One-sided on/off jet thrusters plus their pulse-modulation settings.
struct ThrusterBank {
    std::vector<Thruster> thrusters;
    double pwm_window = 0.1;    // s
    double min_on_time = 0.02;  // s

    /// 24 thrusters, three per corner of a box, sized so each axis reaches
    /// 40 N of force and 40 Nm of torque.
    static ThrusterBank default_bank(double half_extent = 0.5,
                                     double max_thrust = 10.0);

    /// Columns map duty in [0,1] to the produced wrench [f; tau].
    MatX geometry_matrix() const;

    int size() const { return static_cast<int>(thrusters.size()); }
};

struct ReactionWheelSet {
    MatX axes;         // 3 x m, unit columns
    VecX torque_limit;  // Nm per wheel
    VecX momentum;      // Nms per wheel (integrated by the owner)

    /// Four-wheel pyramid with equal per-body-axis torque capability.
    static ReactionWheelSet pyramid(double per_axis_torque = 0.5);

    int size() const { return static_cast<int>(axes.cols()); }
};

struct JointMotorSet {
    double torque_limit = 10.0;   // Nm
    double time_constant = 0.005;  // s, first-order lag
};

/// Scheduled efficiency change: channel index into the (6+n) generalized
/// force vector, applied from `time_s` on.
struct FaultEvent {
    double time_s = 0.0;
    int channel = 0;
    double efficiency = 1.0;
};

/// Ground-truth efficiency vector at time t (identity when no fault fired).
VecX efficiency_at(const std::vector<FaultEvent>& schedule, double t,
                   int n_channels);

/// Componentwise diag(lambda) * u. Throws EfficiencyRangeError when an entry
/// leaves [lambda_min, 1].
VecX apply_efficiency(const VecX& u, const VecX& lambda, double lambda_min);

struct Allocation {
    VecX duties;         // per thruster, [0, 1]
    VecX wheel_torques;  // per wheel
    Vec6 realized;       // mean wrench produced by duties + wheels
    bool saturated = false;
};

/// Map a base wrench command onto wheels (torque first, up to their limits)
/// and thruster duties. Infeasible commands are scaled back along the command
/// direction to the feasibility boundary and flagged.
/// Throws AllocationGeometryError when the bank cannot span +/- all six axes.
Allocation allocate_base_wrench(const ThrusterBank& bank,
                                const ReactionWheelSet& wheels,
                                const Vec3& f_cmd, const Vec3& tau_cmd);

/// Single pulse at the start of a PWM window. Commanded widths under half the
/// minimum on-time are dropped; widths between half and one minimum on-time
/// are stretched to the minimum impulse bit.
struct PulseSchedule {
    double on_duration = 0.0;
    bool is_on(double t_in_window) const { return t_in_window < on_duration; }
};
PulseSchedule pwm_modulate(double duty, double window, double min_on);

enum class ActuatorFidelity {
    Ideal,          // per-channel clip, no modulation, no lag
    ObserverModel,  // clip + deadband, continuous thrust
    Full,           // allocation, pulse modulation, wheel limits, joint lag
};

struct ActuatorConfig {
    ThrusterBank bank = ThrusterBank::default_bank();
    ReactionWheelSet wheels = ReactionWheelSet::pyramid();
    JointMotorSet joints;
    std::vector<FaultEvent> faults;
    ActuatorFidelity fidelity = ActuatorFidelity::Full;
    double lambda_min = 0.1;
};

/// Owns the actuator state of one simulation run: latched PWM windows, wheel
/// momentum, joint torque lag. Not shared across runs.
class ActuatorStack {
  public:
    ActuatorStack(ActuatorConfig cfg, int n_joints);

    /// Latch a new generalized command. Thruster duties only take effect at
    /// the next window boundary; wheels and joints update immediately.
    void set_command(const VecX& u_cmd, double t);

    struct Output {
        VecX u_pre;           // realized force before efficiency scaling
        VecX u_real;          // diag(lambda(t)) * u_pre, hits the plant
        VecX thruster_force;  // instantaneous per-thruster magnitude
        bool thruster_saturated = false;
        bool wheel_saturated = false;
        bool joint_saturated = false;
    };

    /// Realized force over [t, t + dt); advances lag and momentum states.
    Output realize(double t, double dt);

    /// Efficiency truth at time t.
    VecX efficiency(double t) const;

    const ActuatorConfig& config() const { return cfg_; }
    const VecX& wheel_momentum() const { return cfg_.wheels.momentum; }

    /// Per-axis pure-force / pure-torque capability of the bank (+ wheels).
    const Vec6& axis_capability() const { return axis_capability_; }

  private:
    ActuatorConfig cfg_;
    int n_joints_;
    VecX u_cmd_;
    VecX joint_torque_state_;
    Allocation window_alloc_;   // active over the current PWM window
    Allocation pending_alloc_;  // from the latest command
    double window_start_ = 0.0;
    bool window_valid_ = false;
    Vec6 axis_capability_ = Vec6::Zero();
};

}  // namespace smsim
