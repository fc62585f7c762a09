#include "smsim/reference.hpp"

#include <cmath>

namespace smsim {

MatX ee_jacobian(const ChainModel& model, const KinematicsCache& kin) {
    // E is rigid on the last body: pull its Jacobian through the fixed offset
    Mat6 x = Mat6::Zero();
    const Mat3 rt = model.ee.linear().transpose();
    x.topLeftCorner<3, 3>() = rt;
    x.topRightCorner<3, 3>() = -rt * skew(model.ee.translation());
    x.bottomRightCorner<3, 3>() = rt;
    return x * kin.jac.back();
}

QuinticEval quintic(double tau) {
    tau = std::clamp(tau, 0.0, 1.0);
    QuinticEval e;
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    e.s = t3 * (10.0 - 15.0 * tau + 6.0 * t2);
    e.sd = 30.0 * t2 * (1.0 - 2.0 * tau + t2);
    e.sdd = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2);
    return e;
}

JointTable eight_shape_ik(const ChainModel& model, const Iso3& base_pose,
                          const VecX& q_home, const EightShapeParams& params) {
    const int n = model.n_joints();
    const int m = static_cast<int>(std::llround(params.duration_s /
                                                params.sample_dt_s)) + 1;
    JointTable table;
    table.dt = params.sample_dt_s;
    table.q.resize(n, m);
    table.qd.resize(n, m);
    table.qdd.resize(n, m);

    const Vec3 e1 = params.axis1.normalized();
    const Vec3 e2 = params.axis2.normalized();
    const double omega = 2.0 * M_PI / params.period_s;

    // path anchored at the home pose of the end effector
    const KinematicsCache kin0 =
        compute_kinematics(model, q_home, VecX::Zero(model.n_vel()));
    const Vec3 center = (base_pose * kin0.ee_in_base).translation();

    auto path = [&](double t) {
        const double phi = omega * t;
        return Vec3(center + params.amplitude_m * std::sin(phi) * e1 +
                    0.5 * params.amplitude_m * std::sin(2.0 * phi) * e2);
    };
    auto path_vel = [&](double t) {
        const double phi = omega * t;
        return Vec3(params.amplitude_m * omega * std::cos(phi) * e1 +
                    params.amplitude_m * omega * std::cos(2.0 * phi) * e2);
    };

    VecX q = q_home;
    const double mu2 = params.ik_damping * params.ik_damping;
    for (int k = 0; k < m; ++k) {
        const double t = k * params.sample_dt_s;
        const Vec3 target = path(t);
        Vec3 residual = Vec3::Zero();
        for (int it = 0; it < 100; ++it) {
            const KinematicsCache kin =
                compute_kinematics(model, q, VecX::Zero(model.n_vel()));
            const Iso3 ee = base_pose * kin.ee_in_base;
            residual = target - ee.translation();
            if (residual.norm() < params.ik_tolerance_m) break;
            // inertial-frame position Jacobian of the joint columns
            const MatX jac_body = ee_jacobian(model, kin);
            const MatX jac =
                ee.linear() * jac_body.block(0, 6, 3, n);
            const Mat3 jjt = jac * jac.transpose() + mu2 * Mat3::Identity();
            q += jac.transpose() * jjt.ldlt().solve(residual);
        }
        if (residual.norm() > params.verify_tolerance_m) {
            throw IkDivergenceError(
                "eight_shape_ik: residual above tolerance at t = " +
                std::to_string(t));
        }
        table.q.col(k) = q;

        // joint velocity from the damped task-space inverse along the path
        const KinematicsCache kin =
            compute_kinematics(model, q, VecX::Zero(model.n_vel()));
        const Iso3 ee = base_pose * kin.ee_in_base;
        const MatX jac = ee.linear() * ee_jacobian(model, kin).block(0, 6, 3, n);
        const Mat3 jjt = jac * jac.transpose() + mu2 * Mat3::Identity();
        table.qd.col(k) = jac.transpose() * jjt.ldlt().solve(path_vel(t));
    }
    // accelerations by central differences of the consistent velocities
    for (int k = 0; k < m; ++k) {
        const int ka = std::max(0, k - 1);
        const int kb = std::min(m - 1, k + 1);
        table.qdd.col(k) =
            (table.qd.col(kb) - table.qd.col(ka)) / ((kb - ka) * table.dt);
    }
    return table;
}

ReferenceTimeline::Builder::Builder(const Vec3& p0, const Mat3& r0,
                                    const VecX& q0)
    : p_(p0), r_(r0), q_(q0) {}

ReferenceTimeline::Builder& ReferenceTimeline::Builder::hold_until(
    double t_end) {
    Phase ph;
    ph.kind = Phase::Kind::Hold;
    ph.t0 = t_cursor_;
    ph.t1 = t_end;
    ph.p0 = p_;
    ph.r0 = r_;
    ph.q0 = q_;
    phases_.push_back(ph);
    t_cursor_ = t_end;
    return *this;
}

ReferenceTimeline::Builder& ReferenceTimeline::Builder::base_translation(
    double t_end, const Vec3& displacement) {
    Phase ph;
    ph.kind = Phase::Kind::BaseQuintic;
    ph.t0 = t_cursor_;
    ph.t1 = t_end;
    ph.p0 = p_;
    ph.r0 = r_;
    ph.q0 = q_;
    ph.displacement = displacement;
    phases_.push_back(ph);
    p_ += displacement;
    t_cursor_ = t_end;
    return *this;
}

ReferenceTimeline::Builder& ReferenceTimeline::Builder::joint_sine(
    double t_end, const VecX& amplitude, double period_s) {
    Phase ph;
    ph.kind = Phase::Kind::JointSine;
    ph.t0 = t_cursor_;
    ph.t1 = t_end;
    ph.p0 = p_;
    ph.r0 = r_;
    ph.q0 = q_;
    ph.amplitude = amplitude;
    ph.period = period_s;
    phases_.push_back(ph);
    t_cursor_ = t_end;
    return *this;
}

ReferenceTimeline::Builder& ReferenceTimeline::Builder::joint_table(
    const JointTable& table) {
    Phase ph;
    ph.kind = Phase::Kind::JointTable;
    ph.t0 = t_cursor_;
    ph.t1 = t_cursor_ + (table.samples() - 1) * table.dt;
    ph.p0 = p_;
    ph.r0 = r_;
    ph.q0 = q_;
    ph.table = table;
    jumps_.push_back(ph.t0);
    jumps_.push_back(ph.t1);
    phases_.push_back(ph);
    q_ = table.q.col(table.samples() - 1);
    t_cursor_ = ph.t1;
    return *this;
}

ReferenceTimeline ReferenceTimeline::Builder::build() && {
    ReferenceTimeline timeline;
    timeline.phases_ = std::move(phases_);
    timeline.jumps_ = std::move(jumps_);
    return timeline;
}

double ReferenceTimeline::duration() const {
    return phases_.empty() ? 0.0 : phases_.back().t1;
}

RefSample ReferenceTimeline::sample(double t) const {
    const Phase* active = &phases_.back();
    for (const Phase& ph : phases_) {
        if (t < ph.t1) {
            active = &ph;
            break;
        }
    }
    const Phase& ph = *active;
    RefSample s;
    s.p = ph.p0;
    s.R = ph.r0;
    s.q = ph.q0;
    s.qd = VecX::Zero(ph.q0.size());
    s.qdd = VecX::Zero(ph.q0.size());

    switch (ph.kind) {
        case Phase::Kind::Hold:
            break;
        case Phase::Kind::BaseQuintic: {
            const double span = ph.t1 - ph.t0;
            const QuinticEval e = quintic((t - ph.t0) / span);
            s.p = ph.p0 + e.s * ph.displacement;
            s.pd = (e.sd / span) * ph.displacement;
            s.pdd = (e.sdd / (span * span)) * ph.displacement;
            break;
        }
        case Phase::Kind::JointSine: {
            const double w = 2.0 * M_PI / ph.period;
            const double tau = std::clamp(t - ph.t0, 0.0, ph.t1 - ph.t0);
            // sin^2 envelope keeps start and end smooth
            const double envelope_t = (ph.t1 - ph.t0);
            const double arg = w * tau;
            for (int i = 0; i < s.q.size(); ++i) {
                const double a = ph.amplitude(i);
                const double phase = 0.4 * i;
                const double win = std::pow(std::sin(M_PI * tau / envelope_t), 2);
                const double dwin = 2.0 * std::sin(M_PI * tau / envelope_t) *
                                    std::cos(M_PI * tau / envelope_t) * M_PI /
                                    envelope_t;
                const double ddwin =
                    2.0 * (M_PI / envelope_t) * (M_PI / envelope_t) *
                    std::cos(2.0 * M_PI * tau / envelope_t);
                const double f = std::sin(arg + phase) - std::sin(phase);
                const double fd = w * std::cos(arg + phase);
                const double fdd = -w * w * std::sin(arg + phase);
                s.q(i) = ph.q0(i) + a * win * f;
                s.qd(i) = a * (dwin * f + win * fd);
                s.qdd(i) = a * (ddwin * f + 2.0 * dwin * fd + win * fdd);
            }
            break;
        }
        case Phase::Kind::JointTable: {
            const JointTable& tb = ph.table;
            const double local = std::clamp(t - ph.t0, 0.0,
                                            (tb.samples() - 1) * tb.dt);
            const int k = std::min(static_cast<int>(local / tb.dt),
                                   tb.samples() - 2);
            const double a = (local - k * tb.dt) / tb.dt;
            s.q = (1.0 - a) * tb.q.col(k) + a * tb.q.col(k + 1);
            s.qd = (1.0 - a) * tb.qd.col(k) + a * tb.qd.col(k + 1);
            s.qdd = (1.0 - a) * tb.qdd.col(k) + a * tb.qdd.col(k + 1);
            break;
        }
    }
    return s;
}

}  // namespace smsim
