#pragma once

#include <vector>

#include "smsim/types.hpp"

namespace smsim {

/// The ten inertial parameters of one rigid body, expressed about the origin
/// of its body frame: mass m, first mass moment h = m * com, and the rotational
/// inertia about the frame origin. Raw estimates may be physically inconsistent;
/// consistency is a queried property, not a type invariant.
struct InertialParams {
    double mass = 0.0;
    Vec3 h = Vec3::Zero();        // kg m
    Mat3 inertia = Mat3::Zero();  // kg m^2, symmetric, about the frame origin

    /// Layout [m, hx, hy, hz, Ixx, Iyy, Izz, Ixy, Iyz, Izx].
    Vec10 to_vector() const;
    static InertialParams from_vector(const Vec10& v);

    /// Parameters of two bodies rigidly attached in the same frame add.
    InertialParams operator+(const InertialParams& o) const;
    InertialParams scaled(double a) const;
};

/// Pseudo-inertia map: P = [[tr(I)/2 I3 - I, h], [h', m]]. Linear bijection.
Mat4 to_pseudo_inertia(const InertialParams& p);
InertialParams from_pseudo_inertia(const Mat4& pseudo);

/// Pseudo-inertia image of the k-th canonical parameter direction.
const Mat4& pseudo_inertia_basis(int k);

struct ConsistencyReport {
    bool consistent = false;
    double min_eigenvalue = 0.0;
};

/// Physically consistent iff the smallest eigenvalue of the pseudo-inertia
/// exceeds the margin.
ConsistencyReport is_consistent(const InertialParams& p, double margin = 0.0);

/// Affine-invariant Riemannian distance between consistent parameter vectors:
/// Frobenius norm of log(P1^-1 P2). Throws InconsistentParamsError.
double riemannian_distance(const InertialParams& a, const InertialParams& b);

/// Bregman divergence of -log det on the pseudo-inertia cone,
///   D(est || true) = log(det P1 / det P2) + tr(P1^-1 P2) - 4,
/// with P1 = f(est), P2 = f(true). Asymmetric pseudo-distance; approximates
/// d^2/2 to second order near coincidence.
double bregman_divergence(const InertialParams& est, const InertialParams& truth);

/// Pullback of the affine-invariant metric to parameter space:
/// g_ij = tr(P^-1 F_i P^-1 F_j) / 2 over the canonical basis F_k.
Mat10 pullback_metric(const InertialParams& p);

/// Natural-gradient update direction -gamma * g(p)^-1 * grad.
/// Throws InconsistentParamsError when the metric solve is unreliable.
Vec10 natural_gradient_rate(const InertialParams& p, const Vec10& grad, double gamma);

/// Compact feasible set for one body's parameter estimate: a box/ball around
/// nominal values intersected with the consistency cone {min eig f >= eps_p}.
struct ParamBounds {
    double mass_min = 1e-3;
    double mass_max = 1e6;
    double h_norm_max = 1e6;
    Vec6 inertia_abs_max = Vec6::Constant(1e9);  // |Ixx|,..,|Izx| caps
    double eps_p = 1e-9;                         // consistency margin on f(theta)

    /// Generous defaults around a nominal body: mass in [1/f, f] x nominal,
    /// |h| and inertia entries within f x nominal + 1, eps_p scaled to the
    /// pseudo-inertia diagonal. The factor keeps the boxes inactive in
    /// ordinary runs.
    static ParamBounds around_nominal(const InertialParams& nominal,
                                      double factor = 10.0);
};

/// Signed distance to the closest face of the feasible set (positive inside)
/// together with the outward normal of that face in parameter coordinates.
struct BoundaryMargin {
    double margin = 0.0;
    Vec10 outward_normal = Vec10::Zero();
};
BoundaryMargin closest_constraint(const InertialParams& p, const ParamBounds& b);

/// Smooth projection of a raw parameter rate: unchanged in the interior,
/// continuously attenuates the outward-normal component inside a boundary
/// layer of width delta so the flow never leaves the feasible set.
/// Throws InfeasibleStateError when already outside beyond tolerance.
Vec10 smooth_project(const InertialParams& p, const Vec10& rate,
                     const ParamBounds& b, double delta);

/// Pull a parameter vector back into the feasible set (post-integration
/// re-assertion): eigenvalue floor on the pseudo-inertia, then box clamps.
InertialParams clamp_to_bounds(const InertialParams& p, const ParamBounds& b);

}  // namespace smsim
