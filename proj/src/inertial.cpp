#include "smsim/inertial.hpp"

#include <array>
#include <cmath>

namespace smsim {

Vec10 InertialParams::to_vector() const {
    Vec10 v;
    v << mass, h.x(), h.y(), h.z(),
        inertia(0, 0), inertia(1, 1), inertia(2, 2),
        inertia(0, 1), inertia(1, 2), inertia(2, 0);
    return v;
}

InertialParams InertialParams::from_vector(const Vec10& v) {
    InertialParams p;
    p.mass = v(0);
    p.h = v.segment<3>(1);
    p.inertia << v(4), v(7), v(9),
                 v(7), v(5), v(8),
                 v(9), v(8), v(6);
    return p;
}

InertialParams InertialParams::operator+(const InertialParams& o) const {
    InertialParams p;
    p.mass = mass + o.mass;
    p.h = h + o.h;
    p.inertia = inertia + o.inertia;
    return p;
}

InertialParams InertialParams::scaled(double a) const {
    InertialParams p;
    p.mass = a * mass;
    p.h = a * h;
    p.inertia = a * inertia;
    return p;
}

Mat4 to_pseudo_inertia(const InertialParams& p) {
    Mat4 out;
    const Mat3 sigma = 0.5 * p.inertia.trace() * Mat3::Identity() - p.inertia;
    out.topLeftCorner<3, 3>() = sigma;
    out.topRightCorner<3, 1>() = p.h;
    out.bottomLeftCorner<1, 3>() = p.h.transpose();
    out(3, 3) = p.mass;
    return out;
}

InertialParams from_pseudo_inertia(const Mat4& pseudo) {
    InertialParams p;
    p.mass = pseudo(3, 3);
    p.h = pseudo.topRightCorner<3, 1>();
    const Mat3 sigma = pseudo.topLeftCorner<3, 3>();
    p.inertia = sigma.trace() * Mat3::Identity() - sigma;
    return p;
}

const Mat4& pseudo_inertia_basis(int k) {
    static const std::array<Mat4, 10> basis = [] {
        std::array<Mat4, 10> b;
        for (int i = 0; i < 10; ++i) {
            Vec10 e = Vec10::Zero();
            e(i) = 1.0;
            b[i] = to_pseudo_inertia(InertialParams::from_vector(e));
        }
        return b;
    }();
    return basis[k];
}

ConsistencyReport is_consistent(const InertialParams& p, double margin) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(to_pseudo_inertia(p),
                                           Eigen::EigenvaluesOnly);
    ConsistencyReport r;
    r.min_eigenvalue = es.eigenvalues()(0);
    r.consistent = r.min_eigenvalue > margin;
    return r;
}

namespace {

void require_consistent(const InertialParams& p, const char* who) {
    if (!is_consistent(p).consistent) {
        throw InconsistentParamsError(std::string(who) +
                                      ": physically inconsistent parameters");
    }
}

// Eigenvalues of P1^-1 P2 via the similar symmetric matrix
// P1^-1/2 P2 P1^-1/2 (all positive for consistent inputs).
Vec4 relative_eigenvalues(const Mat4& p1, const Mat4& p2) {
    Eigen::SelfAdjointEigenSolver<Mat4> es1(p1);
    const Vec4 lam = es1.eigenvalues();
    const Mat4 inv_sqrt = es1.eigenvectors() *
                          lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                          es1.eigenvectors().transpose();
    Mat4 b = inv_sqrt * p2 * inv_sqrt;
    b = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Mat4> es2(b, Eigen::EigenvaluesOnly);
    return es2.eigenvalues();
}

}  // namespace

double riemannian_distance(const InertialParams& a, const InertialParams& b) {
    require_consistent(a, "riemannian_distance");
    require_consistent(b, "riemannian_distance");
    const Vec4 lam = relative_eigenvalues(to_pseudo_inertia(a), to_pseudo_inertia(b));
    return lam.array().log().matrix().norm();
}

double bregman_divergence(const InertialParams& est, const InertialParams& truth) {
    require_consistent(est, "bregman_divergence");
    require_consistent(truth, "bregman_divergence");
    const Vec4 lam =
        relative_eigenvalues(to_pseudo_inertia(est), to_pseudo_inertia(truth));
    double d = 0.0;
    for (int i = 0; i < 4; ++i) {
        d += lam(i) - 1.0 - std::log(lam(i));
    }
    return d;
}

Mat10 pullback_metric(const InertialParams& p) {
    require_consistent(p, "pullback_metric");
    const Mat4 pinv = to_pseudo_inertia(p).inverse();
    std::array<Mat4, 10> q;
    for (int i = 0; i < 10; ++i) {
        q[i] = pinv * pseudo_inertia_basis(i);
    }
    Mat10 g;
    for (int i = 0; i < 10; ++i) {
        for (int j = i; j < 10; ++j) {
            const double v = 0.5 * (q[i] * q[j]).trace();
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

Vec10 natural_gradient_rate(const InertialParams& p, const Vec10& grad,
                            double gamma) {
    const Mat10 g = pullback_metric(p);
    Eigen::LDLT<Mat10> ldlt(g);
    const VecX d = ldlt.vectorD();
    const double dmin = d.minCoeff();
    const double dmax = d.maxCoeff();
    if (ldlt.info() != Eigen::Success || dmin <= 0.0 || dmax / dmin > 1e10) {
        throw InconsistentParamsError(
            "natural_gradient_rate: pullback metric ill-conditioned; "
            "raise the consistency margin eps_p");
    }
    return -gamma * ldlt.solve(grad);
}

ParamBounds ParamBounds::around_nominal(const InertialParams& nominal,
                                        double factor) {
    ParamBounds b;
    b.mass_min = nominal.mass / factor;
    b.mass_max = factor * nominal.mass;
    b.h_norm_max = factor * nominal.h.norm() + 1.0;
    const Vec10 v = nominal.to_vector();
    for (int k = 0; k < 6; ++k) {
        b.inertia_abs_max(k) = factor * std::abs(v(4 + k)) + 1.0;
    }
    // margin scaled to the pseudo-inertia diagonal so g and M stay invertible
    b.eps_p = 1e-6 * std::max(1.0, to_pseudo_inertia(nominal).diagonal().mean());
    return b;
}

BoundaryMargin closest_constraint(const InertialParams& p, const ParamBounds& b) {
    BoundaryMargin best;
    best.margin = std::numeric_limits<double>::infinity();

    auto consider = [&](double margin, const Vec10& outward) {
        if (margin < best.margin) {
            best.margin = margin;
            best.outward_normal = outward.normalized();
        }
    };

    Vec10 n = Vec10::Zero();
    n(0) = -1.0;
    consider(p.mass - b.mass_min, n);
    n(0) = 1.0;
    consider(b.mass_max - p.mass, n);

    const double hn = p.h.norm();
    if (hn > 1e-12) {
        n.setZero();
        n.segment<3>(1) = p.h / hn;
        consider(b.h_norm_max - hn, n);
    }

    const Vec10 v = p.to_vector();
    for (int k = 0; k < 6; ++k) {
        n.setZero();
        n(4 + k) = v(4 + k) >= 0.0 ? 1.0 : -1.0;
        consider(b.inertia_abs_max(k) - std::abs(v(4 + k)), n);
    }

    // consistency face: gradient of min-eig f(theta) is v' F_k v
    Eigen::SelfAdjointEigenSolver<Mat4> es(to_pseudo_inertia(p));
    const Vec4 evec = es.eigenvectors().col(0);
    Vec10 grad;
    for (int k = 0; k < 10; ++k) {
        grad(k) = evec.dot(pseudo_inertia_basis(k) * evec);
    }
    consider(es.eigenvalues()(0) - b.eps_p, -grad);

    return best;
}

Vec10 smooth_project(const InertialParams& p, const Vec10& rate,
                     const ParamBounds& b, double delta) {
    const BoundaryMargin face = closest_constraint(p, b);
    // transient overshoot is tolerated (integrator stages can poke past a
    // face before the post-step clamp); a breach beyond a fraction of the
    // parameter scale means the state was never re-projected
    const double tol =
        std::max(100.0 * delta, 0.02 * (1.0 + p.to_vector().norm()));
    if (face.margin < -tol) {
        throw InfeasibleStateError(
            "smooth_project: estimate outside its feasible set");
    }
    if (face.margin >= delta) {
        return rate;
    }
    const double outward = rate.dot(face.outward_normal);
    if (outward <= 0.0) {
        return rate;  // flowing inward, nothing to do
    }
    const double keep = std::clamp(face.margin / delta, 0.0, 1.0);
    return rate - (1.0 - keep) * outward * face.outward_normal;
}

InertialParams clamp_to_bounds(const InertialParams& p, const ParamBounds& b) {
    InertialParams out = p;
    for (int pass = 0; pass < 50; ++pass) {
        out.mass = std::clamp(out.mass, b.mass_min, b.mass_max);
        const double hn = out.h.norm();
        if (hn > b.h_norm_max) {
            out.h *= b.h_norm_max / hn;
        }
        Vec10 v = out.to_vector();
        for (int k = 0; k < 6; ++k) {
            v(4 + k) =
                std::clamp(v(4 + k), -b.inertia_abs_max(k), b.inertia_abs_max(k));
        }
        out = InertialParams::from_vector(v);

        Eigen::SelfAdjointEigenSolver<Mat4> es(to_pseudo_inertia(out));
        if (es.eigenvalues()(0) >= b.eps_p * (1.0 - 1e-12)) {
            return out;
        }
        const Vec4 floored = es.eigenvalues().cwiseMax(b.eps_p);
        const Mat4 fixed = es.eigenvectors() * floored.asDiagonal() *
                           es.eigenvectors().transpose();
        out = from_pseudo_inertia(0.5 * (fixed + fixed.transpose()));
        if (pass >= 5) {
            // eigenvalue floor and box caps keep fighting: the first moment is
            // the only free direction left, shrink it until both fit
            out.h *= 0.9;
        }
    }
    return out;
}

}  // namespace smsim
