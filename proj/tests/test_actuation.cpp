#include <doctest.h>

#include <cmath>

#include "smsim/actuation.hpp"
#include "test_helpers.hpp"

using namespace smsim;

TEST_CASE("default bank spans all axes at the quoted capability") {
    const ThrusterBank bank = ThrusterBank::default_bank();
    CHECK(bank.size() == 24);
    const ReactionWheelSet rw = ReactionWheelSet::pyramid();
    ActuatorConfig cfg;
    ActuatorStack stack(cfg, 7);
    // 40 N and 40 Nm per axis from the jets, 0.5 Nm extra from the wheels
    for (int axis = 0; axis < 3; ++axis) {
        CHECK(stack.axis_capability()(axis) == doctest::Approx(40.0).epsilon(1e-3));
        CHECK(stack.axis_capability()(3 + axis) ==
              doctest::Approx(40.5).epsilon(1e-3));
    }
    (void)rw;
}

TEST_CASE("degenerate bank is rejected") {
    ThrusterBank bad;
    for (int i = 0; i < 6; ++i) {
        Thruster t;
        t.position = Vec3::Zero();
        t.direction = Vec3::UnitX();
        bad.thrusters.push_back(t);
    }
    const ReactionWheelSet rw = ReactionWheelSet::pyramid();
    CHECK_THROWS_AS(allocate_base_wrench(bad, rw, Vec3(1, 0, 0), Vec3::Zero()),
                    AllocationGeometryError);
}

TEST_CASE("allocation meets feasible commands exactly") {
    const ThrusterBank bank = ThrusterBank::default_bank();
    const ReactionWheelSet rw = ReactionWheelSet::pyramid();

    const Allocation zero = allocate_base_wrench(bank, rw, Vec3::Zero(), Vec3::Zero());
    CHECK(zero.duties.norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zero.wheel_torques.norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(zero.saturated);

    const Allocation a = allocate_base_wrench(bank, rw, Vec3(10, 0, 0), Vec3::Zero());
    CHECK_FALSE(a.saturated);
    CHECK((a.duties.array() >= -1e-15).all());
    CHECK((a.duties.array() <= 1.0 + 1e-15).all());
    Vec6 cmd;
    cmd << 10, 0, 0, 0, 0, 0;
    CHECK((a.realized - cmd).norm() < 1e-9);
}

TEST_CASE("small torques go to the wheels first") {
    const ThrusterBank bank = ThrusterBank::default_bank();
    const ReactionWheelSet rw = ReactionWheelSet::pyramid();
    const Allocation a =
        allocate_base_wrench(bank, rw, Vec3::Zero(), Vec3(0.3, 0, 0));
    CHECK((rw.axes * a.wheel_torques - Vec3(0.3, 0, 0)).norm() < 1e-9);
    CHECK(a.duties.lpNorm<Eigen::Infinity>() < 1e-9);

    // beyond the wheel budget the jets make up the remainder
    const Allocation b =
        allocate_base_wrench(bank, rw, Vec3::Zero(), Vec3(5.0, 0, 0));
    CHECK((rw.axes * b.wheel_torques).x() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(b.realized.tail<3>().x() == doctest::Approx(5.0).epsilon(1e-9));
    CHECK_FALSE(b.saturated);
}

TEST_CASE("infeasible commands saturate along the command direction") {
    const ThrusterBank bank = ThrusterBank::default_bank();
    const ReactionWheelSet rw = ReactionWheelSet::pyramid();
    const Allocation a =
        allocate_base_wrench(bank, rw, Vec3(50, 0, 0), Vec3::Zero());
    CHECK(a.saturated);
    CHECK(a.realized(0) == doctest::Approx(40.0).epsilon(1e-6));
    CHECK(a.realized.tail<5>().norm() < 1e-6);
}

TEST_CASE("pwm pulse rules") {
    CHECK(pwm_modulate(0.0, 0.1, 0.02).on_duration == 0.0);
    CHECK(pwm_modulate(1.0, 0.1, 0.02).on_duration == doctest::Approx(0.1));
    // below half the minimum impulse: dropped
    CHECK(pwm_modulate(0.05, 0.1, 0.02).on_duration == 0.0);
    // between half and one minimum impulse: stretched
    CHECK(pwm_modulate(0.15, 0.1, 0.02).on_duration == doctest::Approx(0.02));
    // above: exact width
    CHECK(pwm_modulate(0.25, 0.1, 0.02).on_duration == doctest::Approx(0.025));

    // average thrust error within one minimum impulse per window
    for (double duty = 0.0; duty <= 1.0; duty += 0.01) {
        const PulseSchedule p = pwm_modulate(duty, 0.1, 0.02);
        CHECK(std::abs(p.on_duration - duty * 0.1) <= 0.02 + 1e-12);
    }
}

TEST_CASE("pwm averaging error shrinks with the minimum on-time") {
    // worst-case |realized - commanded| impulse per window is min_on / 2
    auto max_abs_error = [](double min_on) {
        double err = 0.0;
        for (double duty = 0.0; duty <= 0.3; duty += 1e-4) {
            const PulseSchedule p = pwm_modulate(duty, 0.1, min_on);
            err = std::max(err, std::abs(p.on_duration - duty * 0.1));
        }
        return err;
    };
    const double e1 = max_abs_error(0.02);
    const double e2 = max_abs_error(0.01);
    const double e3 = max_abs_error(0.005);
    CHECK(e1 == doctest::Approx(0.01).epsilon(0.02));
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));
    CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("apply efficiency") {
    VecX u = VecX::LinSpaced(13, 1.0, 13.0);
    VecX lambda = VecX::Ones(13);
    CHECK((apply_efficiency(u, lambda, 0.1) - u).norm() == 0.0);

    lambda(6) = 0.7;  // first joint channel
    const VecX scaled = apply_efficiency(u, lambda, 0.1);
    CHECK(scaled(6) == doctest::Approx(0.7 * u(6)));
    CHECK((scaled - u).cwiseAbs().sum() == doctest::Approx(0.3 * u(6)));

    lambda(6) = 0.1;
    CHECK_NOTHROW(apply_efficiency(u, lambda, 0.1));
    lambda(6) = 0.05;
    CHECK_THROWS_AS(apply_efficiency(u, lambda, 0.1), EfficiencyRangeError);
    lambda(6) = 1.2;
    CHECK_THROWS_AS(apply_efficiency(u, lambda, 0.1), EfficiencyRangeError);
}

TEST_CASE("efficiency schedule") {
    std::vector<FaultEvent> schedule{{120.0, 6, 0.7}, {120.0, 9, 0.8}};
    CHECK((efficiency_at(schedule, 119.9, 13) - VecX::Ones(13)).norm() == 0.0);
    const VecX after = efficiency_at(schedule, 120.0, 13);
    CHECK(after(6) == doctest::Approx(0.7));
    CHECK(after(9) == doctest::Approx(0.8));
    CHECK((efficiency_at({}, 1e9, 13) - VecX::Ones(13)).norm() == 0.0);
}

TEST_CASE("ideal actuators pass through within limits") {
    ActuatorConfig cfg;
    cfg.fidelity = ActuatorFidelity::Ideal;
    ActuatorStack stack(cfg, 7);
    VecX u = VecX::Zero(13);
    u << 5, -3, 2, 1, -1, 0.5, 1, 2, 3, -2, 1, 0.5, -0.5;
    stack.set_command(u, 0.0);
    const auto out = stack.realize(0.0, 1e-3);
    CHECK((out.u_real - u).norm() < 1e-12);
    CHECK_FALSE(out.joint_saturated);

    // joint torque clips at 10 Nm
    u(6) = 15.0;
    stack.set_command(u, 0.0);
    const auto clipped = stack.realize(0.0, 1e-3);
    CHECK(clipped.u_real(6) == doctest::Approx(10.0));
    CHECK(clipped.joint_saturated);
}

TEST_CASE("fault schedule scales realized torques from the fault time") {
    ActuatorConfig cfg;
    cfg.fidelity = ActuatorFidelity::Ideal;
    cfg.faults = {{120.0, 6, 0.7}, {120.0, 9, 0.8}};
    ActuatorStack stack(cfg, 7);
    VecX u = VecX::Zero(13);
    u(6) = 2.0;
    u(9) = 2.0;
    stack.set_command(u, 119.99);
    CHECK(stack.realize(119.99, 1e-3).u_real(6) == doctest::Approx(2.0));
    stack.set_command(u, 120.0);
    const auto out = stack.realize(120.0, 1e-3);
    CHECK(out.u_real(6) == doctest::Approx(1.4));
    CHECK(out.u_real(9) == doctest::Approx(1.6));
}

TEST_CASE("full fidelity thrusters are strictly on/off") {
    ActuatorConfig cfg;
    cfg.fidelity = ActuatorFidelity::Full;
    ActuatorStack stack(cfg, 2);
    VecX u = VecX::Zero(8);
    u << 7.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.3, -0.2;
    stack.set_command(u, 0.0);
    for (int k = 0; k < 200; ++k) {
        const double t = k * 1e-3;
        const auto out = stack.realize(t, 1e-3);
        for (int i = 0; i < out.thruster_force.size(); ++i) {
            const double f = out.thruster_force(i);
            CHECK((f == 0.0 || f == doctest::Approx(10.0)));
        }
    }
}

TEST_CASE("pwm time-average approaches the commanded wrench") {
    std::vector<double> errs;
    for (double min_on : {0.02, 0.01, 0.005}) {
        ActuatorConfig cfg;
        cfg.fidelity = ActuatorFidelity::Full;
        cfg.bank.min_on_time = min_on;
        ActuatorStack stack(cfg, 0);
        VecX u(6);
        u << 3.7, -1.3, 0.9, 0.2, -0.4, 0.15;
        const double dt = 1e-4;
        VecX mean = VecX::Zero(6);
        int steps = 0;
        stack.set_command(u, 0.0);
        for (double t = 0.0; t < 2.0; t += dt) {
            mean += stack.realize(t, dt).u_real;
            ++steps;
        }
        mean /= steps;
        // quantization error scales with the minimum impulse
        const double err = (mean - u).norm();
        CHECK(err < 250.0 * min_on);
        errs.push_back(err);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
}

TEST_CASE("joint lag responds within a few time constants") {
    ActuatorConfig cfg;
    cfg.fidelity = ActuatorFidelity::Full;
    ActuatorStack stack(cfg, 1);
    VecX u = VecX::Zero(7);
    u(6) = 4.0;
    stack.set_command(u, 0.0);
    double tau = 0.0;
    for (int k = 0; k < 50; ++k) {  // 50 ms = 10 time constants
        tau = stack.realize(k * 1e-3, 1e-3).u_real(6);
    }
    CHECK(tau == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("wheel momentum integrates the applied torque") {
    ActuatorConfig cfg;
    cfg.fidelity = ActuatorFidelity::Full;
    ActuatorStack stack(cfg, 0);
    VecX u = VecX::Zero(6);
    u(5) = 0.2;  // torque z within the wheel budget
    const double dt = 1e-3;
    for (double t = 0.0; t < 1.0; t += dt) {
        stack.set_command(u, t);
        stack.realize(t, dt);
    }
    const Vec3 h = stack.config().wheels.axes * stack.wheel_momentum();
    CHECK(h.z() == doctest::Approx(0.2).epsilon(1e-2));
}
