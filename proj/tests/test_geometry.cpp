#include <doctest.h>

#include "smsim/geometry.hpp"
#include "test_helpers.hpp"

using namespace smsim;

TEST_CASE("skew matrix basics") {
    Mat3 s = skew(Vec3(1, 0, 0));
    Mat3 expected;
    expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
    CHECK((s - expected).norm() == doctest::Approx(0.0));

    auto g = test::rng(1);
    for (int i = 0; i < 50; ++i) {
        const Vec3 a = test::random_vec3(g, 5.0);
        const Vec3 b = test::random_vec3(g, 5.0);
        CHECK((skew(a) + skew(a).transpose()).norm() == 0.0);
        CHECK((skew(a) * a).norm() == doctest::Approx(0.0));
        CHECK((skew(a) * b - a.cross(b)).norm() < 1e-14);
        CHECK((skew(a) * b + skew(b) * a).norm() < 1e-14);
    }
}

TEST_CASE("exp/log round trip") {
    auto g = test::rng(2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 w = test::random_vec3(g, 2.5);
        const Mat3 r = exp_so3(w);
        CHECK(is_rotation(r, 1e-12));
        const Vec3 back = log_so3(r);
        CHECK((exp_so3(back) - r).norm() < 1e-10);
    }
}

TEST_CASE("mrp from rotation: identity and quarter turn") {
    CHECK(mrp_from_rotation(Mat3::Identity()).norm() == doctest::Approx(0.0));

    const Mat3 r = exp_so3(Vec3(0, 0, M_PI / 2));
    const Vec3 sigma = mrp_from_rotation(r);
    CHECK(sigma.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sigma.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sigma.z() == doctest::Approx(std::tan(M_PI / 8)).epsilon(1e-12));
    CHECK(sigma.z() == doctest::Approx(0.414214).epsilon(1e-5));
}

TEST_CASE("mrp round trip over random rotations") {
    auto g = test::rng(3);
    for (int i = 0; i < 1000; ++i) {
        const Mat3 r = test::random_rotation(g);
        const Vec3 sigma = mrp_from_rotation(r);
        CHECK(sigma.norm() <= 1.0 + 1e-12);  // canonical set
        CHECK((rotation_from_mrp(sigma) - r).norm() < 1e-10);
    }
}

TEST_CASE("mrp shadow set represents the same rotation") {
    auto g = test::rng(4);
    for (int i = 0; i < 100; ++i) {
        Vec3 sigma = test::random_vec3(g, 0.9);
        if (sigma.norm() < 1e-3) continue;
        if (sigma.norm() >= 0.95) sigma *= 0.9 / sigma.norm();
        const Vec3 shadow = mrp_shadow(sigma);
        CHECK((rotation_from_mrp(sigma) - rotation_from_mrp(shadow)).norm() < 1e-10);
        CHECK((mrp_canonicalize(shadow) - sigma).norm() < 1e-12);
    }
}

TEST_CASE("mrp kinematics matrix at reference points") {
    const Mat3 g0 = mrp_kinematics_matrix(Vec3::Zero(), MrpKinematicsForm::PaperLiteral);
    CHECK((g0 - 0.5 * Mat3::Identity()).norm() < 1e-15);
    // at sigma = 0 both forms coincide and sigma_dot = w / 4
    const Vec3 rate = mrp_rate(Vec3::Zero(), Vec3(0, 0, 0.1),
                               MrpKinematicsForm::PaperLiteral);
    CHECK((rate - Vec3(0, 0, 0.025)).norm() < 1e-15);

    // identity coefficient vanishes at |sigma| = 1
    const Vec3 s(0, 0, 1);
    const Mat3 gp = mrp_kinematics_matrix(s, MrpKinematicsForm::PaperLiteral);
    const Mat3 expect = skew(s) + skew(s) * skew(s);
    CHECK((gp - expect).norm() < 1e-15);
}

TEST_CASE("textbook mrp kinematics integrates to the exponential") {
    auto g = test::rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat3 r0 = test::random_rotation(g);
        const Vec3 w = test::random_vec3(g, 0.6);
        const double t_end = 1.2;
        const int steps = 2000;
        const double dt = t_end / steps;

        Vec3 sigma = mrp_from_rotation(r0);
        auto f = [&](const Vec3& s) {
            return mrp_rate(s, w, MrpKinematicsForm::Textbook);
        };
        for (int k = 0; k < steps; ++k) {
            const Vec3 k1 = f(sigma);
            const Vec3 k2 = f(sigma + 0.5 * dt * k1);
            const Vec3 k3 = f(sigma + 0.5 * dt * k2);
            const Vec3 k4 = f(sigma + dt * k3);
            sigma += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            sigma = mrp_canonicalize(sigma);
        }
        const Mat3 expected = r0 * exp_so3(w * t_end);
        CHECK((rotation_from_mrp(sigma) - expected).norm() < 1e-7);
    }
}

TEST_CASE("paper and textbook kinematics differ away from zero") {
    const Vec3 s(0.2, -0.1, 0.3);
    const Mat3 diff = mrp_kinematics_matrix(s, MrpKinematicsForm::PaperLiteral) -
                      mrp_kinematics_matrix(s, MrpKinematicsForm::Textbook);
    // [s]x^2 - s s' = -(s's) I
    CHECK((diff + s.squaredNorm() * Mat3::Identity()).norm() < 1e-15);
}

TEST_CASE("so3 chart rate matches finite differences") {
    auto g = test::rng(6);
    for (int i = 0; i < 20; ++i) {
        const Vec3 phi = test::random_vec3(g, 0.8);
        const Vec3 w = test::random_vec3(g, 1.0);
        // R(t) = R0 exp(phi(t)); check exp(phi + phidot h) tracks R exp(w h)
        const double h = 1e-6;
        const Vec3 rate = so3_chart_rate(phi, w);
        const Mat3 lhs = exp_so3(phi + rate * h);
        const Mat3 rhs = exp_so3(phi) * exp_so3(w * h);
        CHECK((lhs - rhs).norm() < 1e-10);
    }
}

TEST_CASE("euler xyz round trip") {
    auto g = test::rng(7);
    for (int i = 0; i < 100; ++i) {
        const double a = test::uniform(g, -1.5, 1.5);
        const double b = test::uniform(g, -1.4, 1.4);
        const double c = test::uniform(g, -1.5, 1.5);
        const Mat3 r = euler_xyz_to_rotation(a, b, c);
        const Vec3 back = rotation_to_euler_xyz(r);
        CHECK((euler_xyz_to_rotation(back(0), back(1), back(2)) - r).norm() < 1e-10);
    }
}
