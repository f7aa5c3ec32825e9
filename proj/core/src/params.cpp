#include "rmt/params.hpp"

#include <cmath>

namespace rmt {

namespace {

double fetch(const RawParams& raw, const std::string& name, double fallback) {
    auto it = raw.scalars.find(name);
    return it == raw.scalars.end() ? fallback : it->second;
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw NonPositiveCoefficient(name);
}

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw NonPositiveCoefficient(name);
}

} // namespace

PlateParams validate_params(const RawParams& raw) {
    PlateParams defaults;
    PlateParams p;
    p.rho1 = fetch(raw, "rho1", defaults.rho1);
    p.rho2 = fetch(raw, "rho2", defaults.rho2);
    p.rho3 = fetch(raw, "rho3", defaults.rho3);
    p.tau0 = fetch(raw, "tau0", defaults.tau0);
    p.K = fetch(raw, "K", defaults.K);
    p.kappa = fetch(raw, "kappa", defaults.kappa);
    p.delta = fetch(raw, "delta", defaults.delta);
    p.gamma = fetch(raw, "gamma", defaults.gamma);
    p.beta = fetch(raw, "beta", defaults.beta);
    p.d = fetch(raw, "d", defaults.d);
    p.dflex = fetch(raw, "Dflex", defaults.dflex);
    p.mu = fetch(raw, "mu", defaults.mu);
    if (raw.has_ddamp) p.ddamp = raw.ddamp;

    require_positive(p.rho1, "rho1");
    require_positive(p.rho2, "rho2");
    require_positive(p.rho3, "rho3");
    require_positive(p.tau0, "tau0");
    require_positive(p.K, "K");
    require_positive(p.kappa, "kappa");
    require_positive(p.delta, "delta");
    require_positive(p.gamma, "gamma");
    require_nonnegative(p.beta, "beta");
    require_nonnegative(p.d, "d");
    require_positive(p.dflex, "Dflex");

    if (!(p.mu > -1.0 && p.mu < 1.0)) throw MuOutOfRange();

    // Symmetry to machine precision, then PSD via the closed-form 2x2 spectrum.
    const Eigen::Matrix2d& D = p.ddamp;
    double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
    if (std::abs(D(0, 1) - D(1, 0)) > 1e-14 * scale) throw DampNotPSD();
    if (min_damping_eigenvalue(p) < -1e-12 * scale) throw DampNotPSD();

    return p;
}

StiffnessS build_stiffness_S(const PlateParams& p) {
    StiffnessS s;
    s.entries << 1.0, p.mu, 0.0,
                 p.mu, 1.0, 0.0,
                 0.0, 0.0, 0.5 * (1.0 - p.mu);
    s.entries *= p.dflex;
    return s;
}

double min_damping_eigenvalue(const PlateParams& p) {
    const Eigen::Matrix2d& D = p.ddamp;
    double tr = D(0, 0) + D(1, 1);
    double off = 0.5 * (D(0, 1) + D(1, 0));
    double disc = std::sqrt(0.25 * (D(0, 0) - D(1, 1)) * (D(0, 0) - D(1, 1)) + off * off);
    return 0.5 * tr - disc;
}

Eigen::Vector3d stiffness_spectrum(const PlateParams& p) {
    return Eigen::Vector3d(p.dflex * 0.5 * (1.0 - p.mu),
                           p.dflex * (1.0 - p.mu),
                           p.dflex * (1.0 + p.mu));
}

bool mu_physically_plausible(const PlateParams& p) {
    return p.mu > 0.0 && p.mu < 0.5;
}

} // namespace rmt
