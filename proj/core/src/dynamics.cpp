#include "rmt/dynamics.hpp"

#include <cmath>
#include <limits>

namespace rmt {

State State::zero(int n) {
    State s;
    s.w = Vec::Zero(n);
    s.wt = Vec::Zero(n);
    s.v = Vec::Zero(2 * n);
    s.vt = Vec::Zero(2 * n);
    s.theta = Vec::Zero(n);
    s.q = Vec::Zero(2 * n);
    return s;
}

State& State::operator+=(const State& o) {
    w += o.w; wt += o.wt; v += o.v; vt += o.vt; theta += o.theta; q += o.q;
    return *this;
}

State& State::operator*=(double c) {
    w *= c; wt *= c; v *= c; vt *= c; theta *= c; q *= c;
    return *this;
}

double State::max_abs() const {
    double m = 0;
    for (const Vec* f : {&w, &wt, &v, &vt, &theta, &q})
        if (f->size() > 0) m = std::max(m, f->cwiseAbs().maxCoeff());
    return m;
}

SpMat angle_damping_matrix(const AssembledOperators& ops, const Eigen::Matrix2d& D) {
    int n = ops.n;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * ops.M.nonZeros());
    for (int k = 0; k < ops.M.outerSize(); ++k)
        for (SpMat::InnerIterator it(ops.M, k); it; ++it)
            for (int ci = 0; ci < 2; ++ci)
                for (int cj = 0; cj < 2; ++cj)
                    if (D(ci, cj) != 0.0)
                        trips.emplace_back(ci * n + it.row(), cj * n + it.col(),
                                           D(ci, cj) * it.value());
    SpMat out(2 * n, 2 * n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

EnergyParts energy(const AssembledOperators& ops, const PlateParams& p, const State& s) {
    EnergyParts e;
    e.kin_w = 0.5 * p.rho1 * s.wt.dot(ops.M * s.wt);
    e.kin_v = 0.5 * p.rho2 * s.vt.dot(ops.M2 * s.vt);
    e.bend = 0.5 * s.v.dot(ops.A_korn * s.v);
    e.shear = 0.5 * p.K * (s.w.dot(ops.A_lap * s.w)
                           + 2.0 * s.v.dot(ops.G * s.w)
                           + s.v.dot(ops.M2 * s.v));
    e.thermal = 0.5 * p.rho3 * s.theta.dot(ops.M * s.theta);
    e.flux = 0.5 * p.tau0 * s.q.dot(ops.M2 * s.q);
    return e;
}

DissipationParts dissipation(const AssembledOperators& ops, const PlateParams& p,
                             const State& s) {
    DissipationParts d;
    d.w = p.d * s.wt.dot(ops.M * s.wt);
    d.v = s.vt.dot(angle_damping_matrix(ops, p.ddamp) * s.vt);
    d.theta = p.beta * s.theta.dot(ops.M * s.theta);
    d.q = p.delta * s.q.dot(ops.M2 * s.q);
    return d;
}

namespace {

void zero_constrained(Vec& x, const std::vector<char>& mask, int n) {
    for (int c = 0; c * n < x.size(); ++c)
        for (int i = 0; i < n; ++i)
            if (mask[i]) x[c * n + i] = 0.0;
}

} // namespace

State rhs_apply(const AssembledOperators& ops, const PlateParams& p, const State& s,
                ThermalBC bc) {
    const SpMat& M = ops.M;
    const SpMat& M2 = ops.M2;
    SpMat MD = angle_damping_matrix(ops, p.ddamp);

    State r;
    r.w = M * s.wt;
    r.v = M2 * s.vt;
    r.wt = -p.K * (ops.A_lap * s.w + ops.G.transpose() * s.v) - p.d * (M * s.wt);
    r.vt = -(ops.A_korn * s.v) - p.K * (M2 * s.v + ops.G * s.w)
           - p.gamma * (ops.G * s.theta) - MD * s.vt;
    r.theta = -p.beta * (M * s.theta) + p.gamma * (ops.G.transpose() * s.vt)
              + p.kappa * (ops.G.transpose() * s.q);
    r.q = -p.delta * (M2 * s.q) - p.kappa * (ops.G * s.theta);

    int n = ops.n;
    zero_constrained(r.w, ops.dirichlet_mask, n);
    zero_constrained(r.wt, ops.dirichlet_mask, n);
    zero_constrained(r.v, ops.dirichlet_mask, n);
    zero_constrained(r.vt, ops.dirichlet_mask, n);
    if (bc == ThermalBC::Dirichlet) zero_constrained(r.theta, ops.dirichlet_mask, n);
    return r;
}

double default_dt(const PlateParams& p, double h) {
    double s_norm = p.dflex * (1.0 + std::abs(p.mu));
    double speed = std::max({std::sqrt(p.K / p.rho1), std::sqrt(s_norm / p.rho2),
                             p.kappa / std::sqrt(p.rho3 * p.tau0)});
    return 0.5 * h / speed;
}

MidpointStepper::MidpointStepper(const AssembledOperators& ops, const PlateParams& p,
                                 ThermalBC bc, double dt, double tol)
    : ops_(ops), p_(p), bc_(bc), dt_(dt), tol_(tol) {
    int n = ops.n;
    map_w_ = make_dof_map(n, ops.dirichlet_mask);
    map_v_ = vector_dof_map(map_w_, n);
    map_th_ = (bc == ThermalBC::Dirichlet) ? map_w_ : identity_dof_map(n);
    map_q_ = identity_dof_map(2 * n);

    int sizes[6] = {map_w_.n_reduced, map_v_.n_reduced, map_w_.n_reduced,
                    map_v_.n_reduced, map_th_.n_reduced, 2 * n};
    total_ = 0;
    for (int b = 0; b < 6; ++b) {
        off_[b] = total_;
        total_ += sizes[b];
    }

    SpMat Mw = restrict_matrix(ops.M, map_w_, map_w_);
    SpMat Mv = restrict_matrix(ops.M2, map_v_, map_v_);
    SpMat Mth = restrict_matrix(ops.M, map_th_, map_th_);
    SpMat Aw = restrict_matrix(ops.A_lap, map_w_, map_w_);
    SpMat Ak = restrict_matrix(ops.A_korn, map_v_, map_v_);
    SpMat Gvw = restrict_matrix(ops.G, map_v_, map_w_);
    SpMat Gvth = restrict_matrix(ops.G, map_v_, map_th_);
    SpMat Gqth = restrict_matrix(ops.G, map_q_, map_th_);
    MD_full_ = angle_damping_matrix(ops, p.ddamp);
    SpMat MD = restrict_matrix(MD_full_, map_v_, map_v_);

    auto add_block = [&](std::vector<Eigen::Triplet<double>>& t, int br, int bc2,
                         const SpMat& A, double scale) {
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it)
                t.emplace_back(off_[br] + static_cast<int>(it.row()),
                               off_[bc2] + static_cast<int>(it.col()),
                               scale * it.value());
    };
    auto add_block_t = [&](std::vector<Eigen::Triplet<double>>& t, int br, int bc2,
                           const SpMat& A, double scale) {
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it)
                t.emplace_back(off_[br] + static_cast<int>(it.col()),
                               off_[bc2] + static_cast<int>(it.row()),
                               scale * it.value());
    };

    std::vector<Eigen::Triplet<double>> tM, tK;
    add_block(tM, 0, 0, Mw, 1.0);
    add_block(tM, 1, 1, Mv, 1.0);
    add_block(tM, 2, 2, Mw, p.rho1);
    add_block(tM, 3, 3, Mv, p.rho2);
    add_block(tM, 4, 4, Mth, p.rho3);
    add_block(tM, 5, 5, ops.M2, p.tau0);
    Mbig_ = SpMat(total_, total_);
    Mbig_.setFromTriplets(tM.begin(), tM.end());

    add_block(tK, 0, 2, Mw, 1.0);
    add_block(tK, 1, 3, Mv, 1.0);
    add_block(tK, 2, 0, Aw, -p.K);
    add_block_t(tK, 2, 1, Gvw, -p.K);  // G' restricted: rows w, cols v
    add_block(tK, 2, 2, Mw, -p.d);
    add_block(tK, 3, 0, Gvw, -p.K);
    add_block(tK, 3, 1, Ak, -1.0);
    add_block(tK, 3, 1, Mv, -p.K);
    add_block(tK, 3, 3, MD, -1.0);
    add_block(tK, 3, 4, Gvth, -p.gamma);
    add_block_t(tK, 4, 3, Gvth, p.gamma);
    add_block(tK, 4, 4, Mth, -p.beta);
    add_block_t(tK, 4, 5, Gqth, p.kappa);
    add_block(tK, 5, 4, Gqth, -p.kappa);
    add_block(tK, 5, 5, ops.M2, -p.delta);
    Kbig_ = SpMat(total_, total_);
    Kbig_.setFromTriplets(tK.begin(), tK.end());

    Astep_ = Mbig_ - (0.5 * dt_) * Kbig_;
    Astep_.makeCompressed();
    lu_.compute(Astep_);
    if (lu_.info() != Eigen::Success)
        throw NoConvergence(0, std::numeric_limits<double>::infinity());
}

Vec MidpointStepper::pack(const State& s) const {
    Vec y(total_);
    y.segment(off_[0], map_w_.n_reduced) = restrict_vector(s.w, map_w_);
    y.segment(off_[1], map_v_.n_reduced) = restrict_vector(s.v, map_v_);
    y.segment(off_[2], map_w_.n_reduced) = restrict_vector(s.wt, map_w_);
    y.segment(off_[3], map_v_.n_reduced) = restrict_vector(s.vt, map_v_);
    y.segment(off_[4], map_th_.n_reduced) = restrict_vector(s.theta, map_th_);
    y.segment(off_[5], 2 * ops_.n) = s.q;
    return y;
}

State MidpointStepper::unpack(const Vec& y) const {
    State s;
    s.w = expand_vector(y.segment(off_[0], map_w_.n_reduced), map_w_);
    s.v = expand_vector(y.segment(off_[1], map_v_.n_reduced), map_v_);
    s.wt = expand_vector(y.segment(off_[2], map_w_.n_reduced), map_w_);
    s.vt = expand_vector(y.segment(off_[3], map_v_.n_reduced), map_v_);
    s.theta = expand_vector(y.segment(off_[4], map_th_.n_reduced), map_th_);
    s.q = y.segment(off_[5], 2 * ops_.n);
    return s;
}

EnergyParts MidpointStepper::energy(const State& s) const {
    return rmt::energy(ops_, p_, s);
}

DissipationParts MidpointStepper::dissipation(const State& s) const {
    DissipationParts d;
    d.w = p_.d * s.wt.dot(ops_.M * s.wt);
    d.v = s.vt.dot(MD_full_ * s.vt);
    d.theta = p_.beta * s.theta.dot(ops_.M * s.theta);
    d.q = p_.delta * s.q.dot(ops_.M2 * s.q);
    return d;
}

StepReport MidpointStepper::step(State& s, double t) {
    Vec y = pack(s);
    Vec rhs = 2.0 * (Mbig_ * y) - Astep_ * y;  // (M + dt/2 K) y
    Vec yp = lu_.solve(rhs);
    double rhs_norm = rhs.norm();
    int refinements = 0;
    for (int pass = 0; pass < 3; ++pass) {
        Vec r = rhs - Astep_ * yp;
        double rn = r.norm();
        if (rhs_norm > 0 && rn <= tol_ * rhs_norm) break;
        yp += lu_.solve(r);
        ++refinements;
    }
    double residual = rhs_norm > 0 ? (rhs - Astep_ * yp).norm() / rhs_norm : 0.0;
    if (!(residual <= std::max(tol_ * 100.0, 1e-9))) throw NoConvergence(refinements, residual);

    Vec ymid = 0.5 * (y + yp);
    State mid = unpack(ymid);
    s = unpack(yp);

    StepReport rep;
    rep.t = t + dt_;
    rep.state = s;
    rep.energy_parts = energy(s);
    rep.dissipation_parts = dissipation(mid);
    rep.solver_iterations = refinements;
    rep.step_residual = residual;
    return rep;
}

StepReport step_midpoint(const AssembledOperators& ops, const PlateParams& p,
                         const State& s, double dt, double tol, ThermalBC bc) {
    MidpointStepper stepper(ops, p, bc, dt, tol);
    State s2 = s;
    return stepper.step(s2, 0.0);
}

std::vector<StepReport> simulate(const AssembledOperators& ops, const PlateParams& p,
                                 const State& s0, double dt, double t_end,
                                 ThermalBC bc, const StepSink& sink) {
    MidpointStepper stepper(ops, p, bc, dt);
    long n_steps = std::max<long>(1, static_cast<long>(std::ceil(t_end / dt - 1e-12)));

    std::vector<StepReport> out;
    out.reserve(n_steps + 1);

    State s = s0;
    StepReport first;
    first.t = 0.0;
    first.state = s;
    first.energy_parts = stepper.energy(s);
    first.dissipation_parts = stepper.dissipation(s);
    out.push_back(first);
    if (sink) sink(first);

    for (long i = 0; i < n_steps; ++i) {
        StepReport rep = stepper.step(s, i * dt);
        out.push_back(rep);
        if (sink) sink(out.back());
    }
    return out;
}

} // namespace rmt
