#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "rmt/errors.hpp"

namespace rmt {

/// Raw parameter map as read from configuration. Scalar entries under their
/// coefficient names; the 2x2 damping matrix under "Ddamp" (row-major, 4 values).
struct RawParams {
    std::map<std::string, double> scalars;
    Eigen::Matrix2d ddamp = Eigen::Matrix2d::Zero();
    bool has_ddamp = false;
};

/// All physical coefficients of the damped plate system.
///
/// Naming: the model uses the letter D both for the flexural rigidity inside
/// the stiffness matrix and for the angle-damping matrix; here they are split
/// into dflex and ddamp.
struct PlateParams {
    double rho1 = 1.0;   // bending inertia
    double rho2 = 1.0;   // angle inertia
    double rho3 = 1.0;   // thermal capacity
    double tau0 = 1.0;   // thermal relaxation time
    double K = 1.0;      // shear correction modulus
    double kappa = 1.0;  // heat-conduction coupling
    double delta = 1.0;  // heat-flux damping
    double gamma = 1.0;  // thermoelastic coupling
    double beta = 0.0;   // zeroth-order thermal-moment coefficient, >= 0
    double d = 0.0;      // bending friction, >= 0
    Eigen::Matrix2d ddamp = Eigen::Matrix2d::Zero();  // angle damping, SPSD
    double dflex = 1.0;  // flexural rigidity
    double mu = 0.3;     // Poisson-type ratio, in (-1, 1)
};

/// 3x3 stiffness matrix S = dflex * [[1, mu, 0], [mu, 1, 0], [0, 0, (1-mu)/2]].
struct StiffnessS {
    Eigen::Matrix3d entries;
};

/// Validate a raw map into a PlateParams, or throw naming the offending field.
/// Missing entries keep the defaults above. Idempotent on valid input.
PlateParams validate_params(const RawParams& raw);

/// Build the stiffness matrix from validated parameters.
StiffnessS build_stiffness_S(const PlateParams& p);

/// Smallest eigenvalue of the (symmetric PSD) angle-damping matrix,
/// from the closed-form 2x2 spectrum.
double min_damping_eigenvalue(const PlateParams& p);

/// Closed-form spectrum of S: { dflex(1-mu)/2, dflex(1-mu), dflex(1+mu) }.
Eigen::Vector3d stiffness_spectrum(const PlateParams& p);

/// True when mu lies in the physically plausible range (0, 1/2); outside it
/// the system is still mathematically well defined, callers may warn.
bool mu_physically_plausible(const PlateParams& p);

} // namespace rmt
