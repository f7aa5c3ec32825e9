#include "rmt/bogovskii.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace rmt {

namespace {

// Pins the constant kernel of each scalar potential solve. The solves are
// performed sequentially (phi from the divergence row, then psi from the
// rotation row): the fully coupled form has a large near-kernel of harmonic
// conjugate pairs grad phi = -rot' psi, which the sequential sweep, working
// on the cross-orthogonal quotient, never excites.
constexpr double kSigmaReg = 1e-8;

/// Directed boundary edges (a, b) with the domain to the left.
std::vector<std::array<int, 2>> boundary_edges(const Mesh& m) {
    std::map<std::pair<int, int>, int> undirected;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            undirected[{std::min(a, b), std::max(a, b)}]++;
        }
    std::vector<std::array<int, 2>> out;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (undirected[{std::min(a, b), std::max(a, b)}] == 1) out.push_back({a, b});
        }
    return out;
}

} // namespace

std::vector<std::array<double, 2>> boundary_normals(const Mesh& m) {
    std::vector<std::array<double, 2>> nrm(m.num_vertices(), {0.0, 0.0});
    for (const auto& e : boundary_edges(m)) {
        double dx = m.vertices[e[1]][0] - m.vertices[e[0]][0];
        double dy = m.vertices[e[1]][1] - m.vertices[e[0]][1];
        // CCW triangle to the left, outward normal points right of the edge
        for (int v : {e[0], e[1]}) {
            nrm[v][0] += 0.5 * dy;
            nrm[v][1] -= 0.5 * dx;
        }
    }
    for (auto& v : nrm) {
        double len = std::hypot(v[0], v[1]);
        if (len > 0) {
            v[0] /= len;
            v[1] /= len;
        }
    }
    return nrm;
}

double boundary_trace_norm(const Mesh& m, const Vec& u) {
    int n = m.num_vertices();
    double acc = 0.0;
    for (const auto& e : boundary_edges(m)) {
        double dx = m.vertices[e[1]][0] - m.vertices[e[0]][0];
        double dy = m.vertices[e[1]][1] - m.vertices[e[0]][1];
        double len = std::hypot(dx, dy);
        double sa = u[e[0]] * u[e[0]] + u[n + e[0]] * u[n + e[0]];
        double sb = u[e[1]] * u[e[1]] + u[n + e[1]] * u[n + e[1]];
        acc += len * 0.5 * (sa + sb);
    }
    return std::sqrt(acc);
}

struct BogovskiiOperator::Impl {
    const AssembledOperators& ops;
    const Mesh& m;
    SpMat C;  // cross form int grad(phi_i) . rot'(phi_j)
    Eigen::SimplicialLDLT<SpMat> sys;
    Eigen::SimplicialLDLT<SpMat> mass1;
    Eigen::SimplicialLDLT<SpMat> mass2;
    Eigen::SimplicialLDLT<SpMat> h1_dual;  // A_lap + M, for dual-norm residuals

    Impl(const AssembledOperators& o, const Mesh& mesh) : ops(o), m(mesh) {
        int n = ops.n;
        std::vector<Eigen::Triplet<double>> tc;
        for (const auto& g : ops.elems)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    tc.emplace_back(g.v[i], g.v[j],
                                    g.area * (g.grad[i][0] * g.grad[j][1]
                                              - g.grad[i][1] * g.grad[j][0]));
        C = SpMat(n, n);
        C.setFromTriplets(tc.begin(), tc.end());

        sys.compute(SpMat(ops.A_lap + kSigmaReg * ops.M));
        if (sys.info() != Eigen::Success)
            throw NoConvergence(0, std::numeric_limits<double>::infinity());
        mass1.compute(ops.M);
        if (mass1.info() != Eigen::Success)
            throw NoConvergence(0, std::numeric_limits<double>::infinity());
        h1_dual.compute(SpMat(ops.A_lap + ops.M));
        if (h1_dual.info() != Eigen::Success)
            throw NoConvergence(0, std::numeric_limits<double>::infinity());
        mass2.compute(ops.M2);
        if (mass2.info() != Eigen::Success)
            throw NoConvergence(0, std::numeric_limits<double>::infinity());
    }

    double mean(const Vec& f) const { return ops.lumped.dot(f) / ops.domain_area; }

    void subtract_mean(Vec& f) const { f.array() -= mean(f); }

    /// Solve for potentials and project u = -(grad phi + rot' psi) to nodes.
    void solve(const Vec& f, Vec& phi, Vec& psi, Vec& u) const {
        int n = ops.n;
        phi = sys.solve(ops.M * f);
        subtract_mean(phi);
        psi = sys.solve(Vec(-C.transpose() * phi));
        subtract_mean(psi);

        Vec load = Vec::Zero(2 * n);
        for (const auto& g : ops.elems) {
            double ux = 0, uy = 0;
            for (int i = 0; i < 3; ++i) {
                ux += phi[g.v[i]] * g.grad[i][0] + psi[g.v[i]] * g.grad[i][1];
                uy += phi[g.v[i]] * g.grad[i][1] - psi[g.v[i]] * g.grad[i][0];
            }
            double third = g.area / 3.0;
            for (int i = 0; i < 3; ++i) {
                load[g.v[i]] -= third * ux;
                load[n + g.v[i]] -= third * uy;
            }
        }
        u = mass2.solve(load);
    }
};

BogovskiiOperator::BogovskiiOperator(const AssembledOperators& ops, const Mesh& m)
    : impl_(std::make_unique<Impl>(ops, m)) {}
BogovskiiOperator::~BogovskiiOperator() = default;
BogovskiiOperator::BogovskiiOperator(BogovskiiOperator&&) noexcept = default;

double BogovskiiOperator::lumped_mean(const Vec& f) const { return impl_->mean(f); }

Vec BogovskiiOperator::apply_field(const Vec& f) const {
    double fnorm = mass_norm(impl_->ops.M, f);
    double mean = impl_->mean(f);
    if (std::abs(mean) * std::sqrt(impl_->ops.domain_area) > 1e-10 * std::max(fnorm, 1e-300))
        throw NonZeroMean(mean);
    Vec phi, psi, u;
    impl_->solve(f, phi, psi, u);
    return u;
}

BogovskiiSolve BogovskiiOperator::apply(const Vec& f) const {
    const AssembledOperators& ops = impl_->ops;
    int n = ops.n;
    double fnorm = mass_norm(ops.M, f);
    double mean = impl_->mean(f);
    if (std::abs(mean) * std::sqrt(ops.domain_area) > 1e-10 * std::max(fnorm, 1e-300))
        throw NonZeroMean(mean);

    BogovskiiSolve out;
    impl_->solve(f, out.phi, out.psi, out.u);

    // weak-form defects measured in the discrete H^-1 norm, the natural norm
    // for distributional divergence and rotation of the projected field
    Vec rd = ops.B_div * out.u - ops.M * f;
    Vec rr = ops.R_rot * out.u;
    out.residual_div = std::sqrt(std::max(0.0, rd.dot(impl_->h1_dual.solve(rd))));
    out.residual_rot = std::sqrt(std::max(0.0, rr.dot(impl_->h1_dual.solve(rr))));
    out.boundary_norm = boundary_trace_norm(impl_->m, out.u);
    out.cross_energy = std::abs(out.phi.dot(impl_->C * out.psi));
    double h1 = std::sqrt(out.u.dot(ops.M2 * out.u) + out.u.dot(ops.A_gg * out.u));
    out.continuity = fnorm > 0 ? h1 / fnorm : 0.0;
    return out;
}

BogovskiiSolve bogovskii_apply(const AssembledOperators& ops, const Mesh& m, const Vec& f) {
    return BogovskiiOperator(ops, m).apply(f);
}

double bogovskii_div_estimate_check(const BogovskiiOperator& bog,
                                    const AssembledOperators& ops, const Mesh& m,
                                    const Vec& u) {
    int n = ops.n;
    Vec u2 = u;
    auto normals = boundary_normals(m);
    for (int i = 0; i < n; ++i) {
        if (!m.is_boundary[i]) continue;
        double un = u2[i] * normals[i][0] + u2[n + i] * normals[i][1];
        u2[i] -= un * normals[i][0];
        u2[n + i] -= un * normals[i][1];
    }
    Vec f = solve_spd(ops.M, ops.B_div * u2).x;  // L2 projection of div u
    f.array() -= bog.lumped_mean(f);
    Vec ub = bog.apply_field(f);
    double un2 = mass_norm(ops.M2, u2);
    return un2 > 0 ? mass_norm(ops.M2, ub) / un2 : 0.0;
}

double gradient_identity_defect(const AssembledOperators& ops, const Vec& u) {
    return std::abs(u.dot(ops.A_gg * u) - u.dot(ops.A_dd * u) - u.dot(ops.A_rr * u));
}

} // namespace rmt
