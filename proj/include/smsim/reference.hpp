#pragma once

#include <memory>
#include <vector>

#include "smsim/controller.hpp"
#include "smsim/multibody.hpp"

namespace smsim {

/// Body Jacobian of the end-effector frame, 6 x (6+n).
MatX ee_jacobian(const ChainModel& model, const KinematicsCache& kin);

/// Quintic rest-to-rest profile s: [0,1] -> [0,1] with zero boundary
/// velocity and acceleration; returns (s, sdot, sddot) at normalized tau.
struct QuinticEval {
    double s, sd, sdd;
};
QuinticEval quintic(double tau);

/// Uniformly sampled joint-space trajectory with derivatives.
struct JointTable {
    double t0 = 0.0;
    double dt = 0.01;
    MatX q, qd, qdd;  // n x m

    int samples() const { return static_cast<int>(q.cols()); }
};

struct EightShapeParams {
    double amplitude_m = 0.4;  // extent of the long axis
    double period_s = 50.0;
    double duration_s = 100.0;
    Vec3 axis1 = Vec3(0, 1, 0);  // long axis, inertial frame
    Vec3 axis2 = Vec3(0, 0, 1);
    double sample_dt_s = 0.01;
    double ik_damping = 0.05;
    double ik_tolerance_m = 1e-6;   // per-sample solve target
    double verify_tolerance_m = 1e-4;  // divergence gate
};

/// Figure-eight Cartesian path for the end effector converted to joint space
/// by damped-least-squares IK at a fixed base. The path passes through the
/// pose at q_home with a velocity step at both ends.
/// Throws IkDivergenceError when any sample misses the path beyond tolerance.
JointTable eight_shape_ik(const ChainModel& model, const Iso3& base_pose,
                          const VecX& q_home, const EightShapeParams& params);

/// Piecewise reference over [0, duration]: base pose and joint profiles with
/// two derivatives, plus the declared velocity-jump instants.
class ReferenceTimeline {
    struct Phase {
        enum class Kind { Hold, BaseQuintic, JointSine, JointTable } kind;
        double t0, t1;
        Vec3 p0;
        Mat3 r0;
        VecX q0;
        Vec3 displacement = Vec3::Zero();
        VecX amplitude;
        double period = 1.0;
        JointTable table;
    };

  public:
    RefSample sample(double t) const;
    const std::vector<double>& jump_times() const { return jumps_; }
    double duration() const;

    /// Phase constructors; phases must be appended in time order and chain
    /// their end states.
    class Builder {
      public:
        Builder(const Vec3& p0, const Mat3& r0, const VecX& q0);
        Builder& hold_until(double t_end);
        Builder& base_translation(double t_end, const Vec3& displacement);
        Builder& joint_sine(double t_end, const VecX& amplitude,
                            double period_s);
        /// joint table phase (velocity jumps at both ends are declared)
        Builder& joint_table(const JointTable& table);
        ReferenceTimeline build() &&;

      private:
        std::vector<Phase> phases_;
        std::vector<double> jumps_;
        double t_cursor_ = 0.0;
        Vec3 p_;
        Mat3 r_;
        VecX q_;
    };

  private:
    ReferenceTimeline() = default;
    friend class Builder;

    std::vector<Phase> phases_;
    std::vector<double> jumps_;
};

}  // namespace smsim
