#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace smsim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat10 = Eigen::Matrix<double, 10, 10>;
using MatX = Eigen::MatrixXd;
using Iso3 = Eigen::Isometry3d;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Orientation within tolerance of the 2*pi MRP singularity.
struct SingularOrientationError : Error {
    using Error::Error;
};

/// Inertial parameters fail the physical-consistency check.
struct InconsistentParamsError : Error {
    using Error::Error;
};

/// Mass matrix is singular or too ill-conditioned to invert.
struct SingularMassMatrixError : Error {
    using Error::Error;
};

/// A projected state already violates its feasible set beyond tolerance.
struct InfeasibleStateError : Error {
    using Error::Error;
};

/// Thruster bank cannot span all +/- wrench directions.
struct AllocationGeometryError : Error {
    using Error::Error;
};

/// Efficiency entry outside [lambda_min, 1].
struct EfficiencyRangeError : Error {
    using Error::Error;
};

/// Scenario configuration failed schema validation.
struct ConfigError : Error {
    using Error::Error;
};

/// Inverse-kinematics residual did not converge below tolerance.
struct IkDivergenceError : Error {
    using Error::Error;
};

/// A simulated state left the admissible numeric range.
struct NumericalBlowupError : Error {
    NumericalBlowupError(const std::string& what, double t)
        : Error(what), time(t) {}
    double time;
};

}  // namespace smsim
