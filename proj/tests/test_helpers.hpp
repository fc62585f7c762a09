#pragma once

#include <random>

#include "smsim/geometry.hpp"
#include "smsim/inertial.hpp"
#include "smsim/multibody.hpp"

namespace smsim::test {

inline std::mt19937_64 rng(uint64_t seed = 42) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Vec3 random_vec3(std::mt19937_64& g, double scale = 1.0) {
    return Vec3(uniform(g, -scale, scale), uniform(g, -scale, scale),
                uniform(g, -scale, scale));
}

inline VecX random_vecx(std::mt19937_64& g, int n, double scale = 1.0) {
    VecX v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(g, -scale, scale);
    return v;
}

inline Mat3 random_rotation(std::mt19937_64& g) {
    return exp_so3(random_vec3(g, 2.0));
}

/// Random physically consistent parameters: P = L L' + margin I.
inline InertialParams random_consistent_params(std::mt19937_64& g,
                                               double scale = 1.0,
                                               double margin = 1e-3) {
    Mat4 l = Mat4::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            l(i, j) = uniform(g, -scale, scale);
        }
        l(i, i) = uniform(g, 0.2 * scale, scale);
    }
    const Mat4 p = l * l.transpose() + margin * Mat4::Identity();
    return from_pseudo_inertia(p);
}

/// Random consistent parameter set for every body of a chain.
inline ParamSet random_param_set(std::mt19937_64& g, int n_bodies,
                                 double scale = 1.0) {
    ParamSet set;
    for (int j = 0; j < n_bodies; ++j) {
        set.bodies.push_back(random_consistent_params(g, scale));
    }
    return set;
}

/// Simple serial chain with n joints and mildly irregular DH rows.
inline ChainModel test_chain(int n) {
    ChainModel m;
    for (int i = 0; i < n; ++i) {
        DhRow row;
        row.a = 0.2 + 0.1 * (i % 3);
        row.alpha = (i % 2 == 0) ? M_PI / 2 : -M_PI / 2;
        row.d = 0.15 + 0.05 * (i % 2);
        m.dh.push_back(row);
    }
    Iso3 mount = Iso3::Identity();
    mount.translation() = Vec3(0.1, 0.3, 0.2);
    mount.linear() = exp_so3(Vec3(-M_PI / 2, 0, 0));
    m.mount = mount;
    Iso3 ee = Iso3::Identity();
    ee.translation() = Vec3(0, 0, 0.1);
    m.ee = ee;
    return m;
}

/// Independent inverse-dynamics oracle: velocity/acceleration recursion down
/// the chain plus wrench back-propagation, never touching the Jacobian-based
/// matrix assembly. Returns the generalized force for (q, xdot, xddot).
VecX rne_inverse_dynamics(const ChainModel& model, const VecX& q,
                          const VecX& xdot, const VecX& xddot,
                          const ParamSet& params);

}  // namespace smsim::test
