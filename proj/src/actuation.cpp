#include "smsim/actuation.hpp"

#include <cmath>

namespace smsim {

VecX bounded_least_squares(const MatX& a, const VecX& b, const VecX& lo,
                           const VecX& hi, int max_sweeps, double tol) {
    const int n = static_cast<int>(a.cols());
    VecX x = VecX::Zero(n);
    for (int i = 0; i < n; ++i) x(i) = std::clamp(0.0, lo(i), hi(i));
    VecX residual = a * x - b;
    VecX col_sq(n);
    for (int i = 0; i < n; ++i) col_sq(i) = a.col(i).squaredNorm();

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (int i = 0; i < n; ++i) {
            if (col_sq(i) < 1e-30) continue;
            const double step = a.col(i).dot(residual) / col_sq(i);
            const double xi = std::clamp(x(i) - step, lo(i), hi(i));
            const double change = xi - x(i);
            if (change != 0.0) {
                residual += change * a.col(i);
                x(i) = xi;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        if (max_change < tol) break;
    }
    return x;
}

ThrusterBank ThrusterBank::default_bank(double half_extent, double max_thrust) {
    ThrusterBank bank;
    for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
            for (int sz : {-1, 1}) {
                const Vec3 corner = half_extent * Vec3(sx, sy, sz);
                const int signs[3] = {sx, sy, sz};
                for (int axis = 0; axis < 3; ++axis) {
                    Thruster t;
                    t.position = corner;
                    t.direction = Vec3::Zero();
                    t.direction(axis) = -signs[axis];
                    t.max_thrust = max_thrust;
                    bank.thrusters.push_back(t);
                }
            }
        }
    }
    return bank;
}

MatX ThrusterBank::geometry_matrix() const {
    MatX a(6, size());
    for (int i = 0; i < size(); ++i) {
        const Thruster& t = thrusters[static_cast<size_t>(i)];
        const Vec3 f = t.max_thrust * t.direction;
        a.col(i).head<3>() = f;
        a.col(i).tail<3>() = t.position.cross(f);
    }
    return a;
}

ReactionWheelSet ReactionWheelSet::pyramid(double per_axis_torque) {
    // cant angle with tan(beta) = 2 equalizes the x/y and z capabilities
    const double beta = std::atan(2.0);
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    ReactionWheelSet rw;
    rw.axes.resize(3, 4);
    for (int k = 0; k < 4; ++k) {
        const double az = k * M_PI / 2.0;
        rw.axes.col(k) = Vec3(sb * std::cos(az), sb * std::sin(az), cb);
    }
    const double per_wheel = per_axis_torque / (4.0 * cb);
    rw.torque_limit = VecX::Constant(4, per_wheel);
    rw.momentum = VecX::Zero(4);
    return rw;
}

VecX efficiency_at(const std::vector<FaultEvent>& schedule, double t,
                   int n_channels) {
    VecX lambda = VecX::Ones(n_channels);
    for (const FaultEvent& e : schedule) {
        if (t >= e.time_s && e.channel >= 0 && e.channel < n_channels) {
            lambda(e.channel) = e.efficiency;
        }
    }
    return lambda;
}

VecX apply_efficiency(const VecX& u, const VecX& lambda, double lambda_min) {
    for (int i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < lambda_min - 1e-12 || lambda(i) > 1.0 + 1e-12) {
            throw EfficiencyRangeError(
                "apply_efficiency: entry outside [lambda_min, 1]");
        }
    }
    return lambda.cwiseProduct(u);
}

namespace {

struct BankSolve {
    VecX duties;
    double residual;
};

BankSolve solve_duties(const MatX& geometry, const Vec6& wrench) {
    const int n = static_cast<int>(geometry.cols());
    BankSolve s;
    s.duties = bounded_least_squares(geometry, wrench, VecX::Zero(n),
                                     VecX::Ones(n));
    s.residual = (geometry * s.duties - wrench).norm();
    return s;
}

VecX solve_wheels(const ReactionWheelSet& rw, const Vec3& tau) {
    return bounded_least_squares(rw.axes, tau, -rw.torque_limit,
                                 rw.torque_limit);
}

}  // namespace

Allocation allocate_base_wrench(const ThrusterBank& bank,
                                const ReactionWheelSet& wheels,
                                const Vec3& f_cmd, const Vec3& tau_cmd) {
    const MatX geometry = bank.geometry_matrix();

    // spanning check: every signed axis must be reachable
    for (int axis = 0; axis < 6; ++axis) {
        for (double sign : {-1.0, 1.0}) {
            Vec6 probe = Vec6::Zero();
            probe(axis) = sign * 1e-3;
            if (solve_duties(geometry, probe).residual > 1e-9) {
                throw AllocationGeometryError(
                    "allocate_base_wrench: bank cannot span all wrench axes");
            }
        }
    }

    auto attempt = [&](double scale, Allocation& out) {
        const Vec3 f = scale * f_cmd;
        const Vec3 tau = scale * tau_cmd;
        out.wheel_torques = solve_wheels(wheels, tau);
        Vec6 remaining;
        remaining.head<3>() = f;
        remaining.tail<3>() = tau - wheels.axes * out.wheel_torques;
        const BankSolve s = solve_duties(geometry, remaining);
        out.duties = s.duties;
        out.realized.head<3>() = (geometry * s.duties).head<3>();
        out.realized.tail<3>() =
            (geometry * s.duties).tail<3>() + wheels.axes * out.wheel_torques;
        const double cmd_norm = std::sqrt(f.squaredNorm() + tau.squaredNorm());
        return s.residual <= 1e-9 * (1.0 + cmd_norm) + 1e-12;
    };

    Allocation alloc;
    if (attempt(1.0, alloc)) {
        alloc.saturated = false;
        return alloc;
    }

    // scale back along the command direction to the feasibility boundary
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        Allocation trial;
        if (attempt(mid, trial)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    attempt(lo, alloc);
    alloc.saturated = true;
    return alloc;
}

PulseSchedule pwm_modulate(double duty, double window, double min_on) {
    duty = std::clamp(duty, 0.0, 1.0);
    const double width = duty * window;
    PulseSchedule p;
    if (width >= min_on) {
        p.on_duration = width;
    } else if (width >= 0.5 * min_on) {
        p.on_duration = min_on;  // minimum impulse bit
    } else {
        p.on_duration = 0.0;
    }
    return p;
}

ActuatorStack::ActuatorStack(ActuatorConfig cfg, int n_joints)
    : cfg_(std::move(cfg)), n_joints_(n_joints) {
    u_cmd_ = VecX::Zero(6 + n_joints_);
    joint_torque_state_ = VecX::Zero(n_joints_);
    for (const Thruster& t : cfg_.bank.thrusters) {
        if (std::abs(t.direction.norm() - 1.0) > 1e-9) {
            throw AllocationGeometryError(
                "ActuatorStack: thruster directions must be unit vectors");
        }
    }
    for (const FaultEvent& e : cfg_.faults) {
        if (e.efficiency < cfg_.lambda_min || e.efficiency > 1.0) {
            throw EfficiencyRangeError(
                "ActuatorStack: fault efficiency outside [lambda_min, 1]");
        }
    }
    // capability probe per signed axis (thrusters only for force, with wheel
    // help for torque); bisection against the allocator
    const MatX geometry = cfg_.bank.geometry_matrix();
    for (int axis = 0; axis < 6; ++axis) {
        Vec6 dir = Vec6::Zero();
        dir(axis) = 1.0;
        auto feasible = [&](double mag) {
            const Vec6 probe = mag * dir;
            const VecX d = bounded_least_squares(
                geometry, probe, VecX::Zero(geometry.cols()),
                VecX::Ones(geometry.cols()));
            return (geometry * d - probe).norm() <= 1e-6 * (1.0 + mag);
        };
        double lo = 0.0;
        double hi = geometry.cwiseAbs().rowwise().sum()(axis) + 1.0;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (feasible(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        axis_capability_(axis) = lo;
    }
    // wheels add their per-axis torque on top of the jets
    for (int axis = 3; axis < 6; ++axis) {
        if (cfg_.wheels.size() > 0) {
            axis_capability_(axis) +=
                cfg_.wheels.axes.row(axis - 3).cwiseAbs().dot(
                    cfg_.wheels.torque_limit.transpose());
        }
    }
}

void ActuatorStack::set_command(const VecX& u_cmd, double t) {
    u_cmd_ = u_cmd;
    if (cfg_.fidelity != ActuatorFidelity::Full) {
        return;
    }
    pending_alloc_ = allocate_base_wrench(cfg_.bank, cfg_.wheels,
                                          u_cmd.head<3>(), u_cmd.segment<3>(3));
    if (!window_valid_) {
        window_alloc_ = pending_alloc_;
        window_start_ = t;
        window_valid_ = true;
    }
}

VecX ActuatorStack::efficiency(double t) const {
    return efficiency_at(cfg_.faults, t, 6 + n_joints_);
}

ActuatorStack::Output ActuatorStack::realize(double t, double dt) {
    Output out;
    out.u_pre = VecX::Zero(6 + n_joints_);
    out.thruster_force = VecX::Zero(cfg_.bank.size());

    const VecX lambda = efficiency(t);

    if (cfg_.fidelity == ActuatorFidelity::Ideal ||
        cfg_.fidelity == ActuatorFidelity::ObserverModel) {
        VecX u = u_cmd_;
        for (int i = 0; i < 6; ++i) {
            const double cap = axis_capability_(i);
            if (cfg_.fidelity == ActuatorFidelity::ObserverModel) {
                // RCS deadband: commands below the minimum impulse average
                // produce nothing
                const double dead =
                    cap * cfg_.bank.min_on_time / (2.0 * cfg_.bank.pwm_window);
                if (std::abs(u(i)) < dead) u(i) = 0.0;
            }
            const double before = u(i);
            u(i) = std::clamp(u(i), -cap, cap);
            if (u(i) != before) out.thruster_saturated = true;
        }
        for (int j = 0; j < n_joints_; ++j) {
            const double before = u(6 + j);
            u(6 + j) = std::clamp(u(6 + j), -cfg_.joints.torque_limit,
                                  cfg_.joints.torque_limit);
            if (u(6 + j) != before) out.joint_saturated = true;
        }
        out.u_pre = u;
        out.u_real = apply_efficiency(out.u_pre, lambda, cfg_.lambda_min);
        return out;
    }

    // full fidelity: latched PWM windows over the thruster allocation
    if (!window_valid_) {
        window_alloc_.duties = VecX::Zero(cfg_.bank.size());
        window_alloc_.wheel_torques = VecX::Zero(cfg_.wheels.size());
        window_alloc_.realized = Vec6::Zero();
        window_alloc_.saturated = false;
        window_start_ = t;
        window_valid_ = true;
        pending_alloc_ = window_alloc_;
    }
    const double window = cfg_.bank.pwm_window;
    if (t - window_start_ >= window - 1e-12) {
        window_start_ += window * std::floor((t - window_start_) / window + 1e-9);
        window_alloc_ = pending_alloc_;
    }
    const double phase = t - window_start_;

    Vec6 wrench = Vec6::Zero();
    for (int i = 0; i < cfg_.bank.size(); ++i) {
        const PulseSchedule pulse =
            pwm_modulate(window_alloc_.duties(i), window, cfg_.bank.min_on_time);
        if (pulse.is_on(phase)) {
            const Thruster& th = cfg_.bank.thrusters[static_cast<size_t>(i)];
            const Vec3 f = th.max_thrust * th.direction;
            wrench.head<3>() += f;
            wrench.tail<3>() += th.position.cross(f);
            out.thruster_force(i) = th.max_thrust;
        }
    }
    out.thruster_saturated = window_alloc_.saturated;

    // wheels track the latest allocation continuously
    wrench.tail<3>() += cfg_.wheels.axes * pending_alloc_.wheel_torques;
    for (int k = 0; k < cfg_.wheels.size(); ++k) {
        if (std::abs(pending_alloc_.wheel_torques(k)) >=
            cfg_.wheels.torque_limit(k) - 1e-12) {
            out.wheel_saturated = true;
        }
    }
    cfg_.wheels.momentum += dt * pending_alloc_.wheel_torques;

    // joint motors: first-order lag, then the gearbox torque limit
    for (int j = 0; j < n_joints_; ++j) {
        const double target = u_cmd_(6 + j);
        const double alpha = 1.0 - std::exp(-dt / cfg_.joints.time_constant);
        joint_torque_state_(j) += alpha * (target - joint_torque_state_(j));
        double tau = joint_torque_state_(j);
        const double before = tau;
        tau = std::clamp(tau, -cfg_.joints.torque_limit, cfg_.joints.torque_limit);
        if (tau != before) out.joint_saturated = true;
        out.u_pre(6 + j) = tau;
    }

    out.u_pre.head<6>() = wrench;
    out.u_real = apply_efficiency(out.u_pre, lambda, cfg_.lambda_min);
    return out;
}

}  // namespace smsim
