#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <rmt/dynamics.hpp>
#include <rmt/initial_data.hpp>

using namespace rmt;

namespace {

struct Lab {
    Mesh m;
    AssembledOperators ops;
    Lab(double h, const PlateParams& p) : m(mesh_disk(1.0, h)), ops(assemble(m, build_stiffness_S(p))) {}
};

PlateParams conservative_params() {
    PlateParams p;
    p.mu = 0.3;
    p.delta = 0.0;
    p.gamma = 0.0;
    return p;  // d, Ddamp, beta already zero
}

State gaussian_state(const Mesh& m) {
    InitialPreset ic;
    ic.kind = PresetKind::RadialGaussian;
    return build_initial(ic, m, nullptr);
}

double state_distance(const State& a, const State& b) {
    double d = 0;
    d = std::max(d, (a.w - b.w).cwiseAbs().maxCoeff());
    d = std::max(d, (a.wt - b.wt).cwiseAbs().maxCoeff());
    d = std::max(d, (a.v - b.v).cwiseAbs().maxCoeff());
    d = std::max(d, (a.vt - b.vt).cwiseAbs().maxCoeff());
    d = std::max(d, (a.theta - b.theta).cwiseAbs().maxCoeff());
    d = std::max(d, (a.q - b.q).cwiseAbs().maxCoeff());
    return d;
}

} // namespace

TEST_CASE("zero state evolves to the zero series") {
    PlateParams p;
    Lab lab(0.2, p);
    State s0 = State::zero(lab.ops.n);
    auto reps = simulate(lab.ops, p, s0, 0.05, 0.5);
    for (const auto& r : reps) {
        CHECK(r.state.max_abs() == 0.0);
        CHECK(r.energy_parts.total() == 0.0);
    }
}

TEST_CASE("rhs block structure: q-only state with gamma = 0") {
    PlateParams p = conservative_params();
    p.delta = 0.7;
    Lab lab(0.2, p);
    int n = lab.ops.n;
    State s = State::zero(n);
    for (int i = 0; i < 2 * n; ++i) s.q[i] = std::sin(0.3 * i);
    State r = rhs_apply(lab.ops, p, s);
    CHECK(r.w.norm() == 0.0);
    CHECK(r.wt.norm() == 0.0);
    CHECK(r.v.norm() == 0.0);
    CHECK(r.vt.norm() == 0.0);
    // theta row carries kappa * weak divergence of q, q row its own damping
    Vec expect_theta = p.kappa * (lab.ops.G.transpose() * s.q);
    Vec expect_q = -p.delta * (lab.ops.M2 * s.q);
    CHECK((r.theta - expect_theta).norm() < 1e-14);
    CHECK((r.q - expect_q).norm() < 1e-14);
}

TEST_CASE("gamma = 0 decouples the elastic rows from (theta, q)") {
    PlateParams p;
    p.gamma = 0.0;
    p.mu = 0.3;
    Lab lab(0.2, p);
    State s = gaussian_state(lab.m);
    State s_thermal = s;
    s_thermal.theta.setRandom();
    s_thermal.q.setRandom();
    State r1 = rhs_apply(lab.ops, p, s);
    State r2 = rhs_apply(lab.ops, p, s_thermal);
    CHECK((r1.w - r2.w).norm() == 0.0);
    CHECK((r1.wt - r2.wt).norm() == 0.0);
    CHECK((r1.v - r2.v).norm() == 0.0);
    CHECK((r1.vt - r2.vt).norm() == 0.0);
}

TEST_CASE("conservative limit holds energy over 500 steps") {
    PlateParams p = conservative_params();
    Lab lab(0.15, p);
    State s0 = gaussian_state(lab.m);
    double e0 = -1, drift = 0;
    simulate(lab.ops, p, s0, 0.01, 500 * 0.01, ThermalBC::Neumann,
             [&](const StepReport& r) {
                 double e = r.energy_parts.total();
                 if (e0 < 0) e0 = e;
                 drift = std::max(drift, std::abs(e - e0));
             });
    CHECK(drift <= 1e-8 * e0);
}

TEST_CASE("discrete dissipation identity is exact per step") {
    PlateParams p;
    p.mu = 0.3;
    p.d = 1.0;
    p.beta = 1.0;
    p.ddamp = Eigen::Matrix2d::Identity();
    Lab lab(0.15, p);
    State s = gaussian_state(lab.m);
    MidpointStepper stepper(lab.ops, p, ThermalBC::Neumann, 0.02);
    double e_prev = energy(lab.ops, p, s).total();
    double e0 = e_prev;
    for (int k = 0; k < 50; ++k) {
        StepReport rep = stepper.step(s, k * 0.02);
        double e = rep.energy_parts.total();
        double defect = std::abs(e - e_prev + 0.02 * rep.dissipation_parts.total());
        CHECK(defect <= 1e-10 * e0);
        e_prev = e;
    }
}

TEST_CASE("full damping gives monotone nonincreasing energy") {
    PlateParams p;
    p.mu = 0.3;
    p.d = 1.0;
    p.beta = 1.0;
    p.ddamp = Eigen::Matrix2d::Identity();
    Lab lab(0.15, p);
    State s0 = gaussian_state(lab.m);
    double prev = std::numeric_limits<double>::infinity();
    simulate(lab.ops, p, s0, 0.02, 2.0, ThermalBC::Neumann, [&](const StepReport& r) {
        CHECK(r.energy_parts.total() <= prev * (1.0 + 1e-13));
        prev = r.energy_parts.total();
    });
    CHECK(prev < energy(lab.ops, p, s0).total());
}

TEST_CASE("theta mean is conserved with natural flux conditions and beta = 0") {
    PlateParams p;
    p.mu = 0.3;
    p.d = 1.0;
    Lab lab(0.15, p);
    State s0 = gaussian_state(lab.m);
    double mean0 = lab.ops.lumped.dot(s0.theta) / lab.ops.domain_area;
    double drift = 0;
    simulate(lab.ops, p, s0, 0.02, 2.0, ThermalBC::Neumann, [&](const StepReport& r) {
        double mean = lab.ops.lumped.dot(r.state.theta) / lab.ops.domain_area;
        drift = std::max(drift, std::abs(mean - mean0));
    });
    CHECK(drift <= 1e-10);
}

TEST_CASE("radial data keeps the rotation norm small") {
    PlateParams p;
    p.mu = 0.3;
    p.d = 1.0;
    Lab lab(0.1, p);
    State s0 = gaussian_state(lab.m);
    double rot0 = std::sqrt(s0.v.dot(lab.ops.A_rr * s0.v));
    double rot_max = rot0;
    simulate(lab.ops, p, s0, 0.02, 2.0, ThermalBC::Neumann, [&](const StepReport& r) {
        rot_max = std::max(rot_max,
                           std::sqrt(std::max(0.0, r.state.v.dot(lab.ops.A_rr * r.state.v))));
    });
    CHECK(rot_max <= rot0 + 10.0 * lab.m.h);
}

TEST_CASE("midpoint scheme is second order against a fine-dt oracle") {
    PlateParams p;
    p.mu = 0.3;
    p.d = 0.5;
    p.beta = 0.5;
    Lab lab(0.25, p);
    State s0 = gaussian_state(lab.m);
    double T = 0.4;
    auto final_state = [&](double dt) {
        State s = s0;
        MidpointStepper st(lab.ops, p, ThermalBC::Neumann, dt);
        int steps = int(std::round(T / dt));
        for (int k = 0; k < steps; ++k) st.step(s, k * dt);
        return s;
    };
    State ref = final_state(T / 400.0);  // dt/100 of the coarse run
    double e1 = state_distance(final_state(T / 4.0), ref);
    double e2 = state_distance(final_state(T / 8.0), ref);
    CHECK(e1 / e2 > 3.0);  // ~4 for order 2
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("time reversibility in the conservative limit") {
    PlateParams p = conservative_params();
    Lab lab(0.2, p);
    State s0 = gaussian_state(lab.m);
    State s = s0;
    double dt = 0.02;
    MidpointStepper fwd(lab.ops, p, ThermalBC::Neumann, dt);
    MidpointStepper bwd(lab.ops, p, ThermalBC::Neumann, -dt);
    for (int k = 0; k < 20; ++k) fwd.step(s, k * dt);
    for (int k = 0; k < 20; ++k) bwd.step(s, (20 - k) * dt);
    CHECK(state_distance(s, s0) <= 1e-9 * s0.max_abs());
}

TEST_CASE("energy is quadratic in the state scale") {
    PlateParams p;
    Lab lab(0.25, p);
    State s = gaussian_state(lab.m);
    double e1 = energy(lab.ops, p, s).total();
    State s2 = s;
    s2 *= 3.0;
    CHECK(energy(lab.ops, p, s2).total() == doctest::Approx(9.0 * e1).epsilon(1e-12));
    EnergyParts parts = energy(lab.ops, p, s);
    for (double part : {parts.kin_w, parts.kin_v, parts.bend, parts.shear,
                        parts.thermal, parts.flux})
        CHECK(part >= -1e-14);
}

TEST_CASE("default_dt follows the fastest-wave formula") {
    PlateParams p;
    p.K = 4.0;  // bending wave speed 2 dominates
    double h = 0.1;
    CHECK(default_dt(p, h) == doctest::Approx(0.5 * h / 2.0).epsilon(1e-12));
    p.K = 1.0;
    p.kappa = 3.0;  // thermal speed 3 dominates
    CHECK(default_dt(p, h) == doctest::Approx(0.5 * h / 3.0).epsilon(1e-12));
}
