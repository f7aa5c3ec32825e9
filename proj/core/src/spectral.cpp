#include "rmt/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>

namespace rmt {

namespace {

// div-constraint penalty epsilon, scaled by h^2 so the roundoff floor of the
// penalized stiffness stays resolution independent
constexpr double kDivPenaltyCoeff = 1e-6;

EigenResult iterate(const Eigen::SimplicialLDLT<SpMat>& solve_with, const SpMat& A,
                    const SpMat& B, bool inverse, const GenEigOptions& opt) {
    int n = static_cast<int>(A.rows());
    Vec x = Vec::Ones(n);
    for (int i = 0; i < n; i += 2) x[i] += 0.5 * std::sin(0.7 * i);  // break symmetry
    double bn = std::sqrt(x.dot(B * x));
    x /= bn;

    EigenResult res;
    double lambda_prev = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < opt.max_iter; ++it) {
        Vec y = inverse ? solve_with.solve(B * x).eval() : solve_with.solve(A * x).eval();
        double yn = std::sqrt(y.dot(B * y));
        if (!(yn > 0)) throw NoConvergence(it, std::numeric_limits<double>::infinity());
        x = y / yn;
        double lambda = x.dot(A * x);
        Vec r = A * x - lambda * (B * x);
        res.lambda = lambda;
        res.residual = r.norm() / x.norm();
        res.iterations = it + 1;
        bool rq_ok = std::isfinite(lambda_prev)
                     && std::abs(lambda - lambda_prev) <= opt.rq_tol * std::abs(lambda);
        if (rq_ok && res.residual <= opt.residual_tol) {
            res.field = x;
            return res;
        }
        lambda_prev = lambda;
    }
    throw NoConvergence(opt.max_iter, res.residual);
}

} // namespace

EigenResult gen_eig_smallest(const SpMat& A, const SpMat& B, const GenEigOptions& opt) {
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw NoConvergence(0, std::numeric_limits<double>::infinity());
    return iterate(ldlt, A, B, true, opt);
}

EigenResult gen_eig_largest(const SpMat& A, const SpMat& B, const GenEigOptions& opt) {
    Eigen::SimplicialLDLT<SpMat> ldlt(B);
    if (ldlt.info() != Eigen::Success)
        throw NoConvergence(0, std::numeric_limits<double>::infinity());
    return iterate(ldlt, A, B, false, opt);
}

EigenResult laplace_eigenmode(const AssembledOperators& ops, const Mesh& m) {
    DofMap map = make_dof_map(ops.n, ops.dirichlet_mask);
    SpMat A = restrict_matrix(ops.A_lap, map, map);
    SpMat B = restrict_matrix(ops.M, map, map);
    EigenResult res = gen_eig_smallest(A, B);
    res.field = expand_vector(res.field, map);
    res.h = m.h;
    return res;
}

EigenResult solenoidal_eigenmode(const AssembledOperators& ops, const Mesh& m) {
    DofMap smap = make_dof_map(ops.n, ops.dirichlet_mask);
    DofMap vmap = vector_dof_map(smap, ops.n);
    // penalize the weak divergence (all P1 test functions); the pointwise
    // elementwise form would over-constrain P1 and lock
    SpMat D = restrict_matrix(ops.B_div, identity_dof_map(ops.n), vmap);
    double eps = kDivPenaltyCoeff * m.h * m.h;
    SpMat A = restrict_matrix(ops.A_gg, vmap, vmap)
              + (1.0 / eps) * SpMat(D.transpose() * D);
    SpMat B = restrict_matrix(ops.M2, vmap, vmap);
    GenEigOptions opt;
    opt.residual_tol = 1e-8;  // penalty stiffness bounds the attainable residual
    EigenResult res = gen_eig_smallest(A, B, opt);
    res.field = expand_vector(res.field, vmap);
    res.h = m.h;
    return res;
}

EigenResult elastic_eigenmode(const AssembledOperators& ops, const Mesh& m,
                              const PlateParams& p, const EigenResult* seed) {
    DofMap smap = make_dof_map(ops.n, ops.dirichlet_mask);
    DofMap vmap = vector_dof_map(smap, ops.n);
    SpMat A = restrict_matrix(ops.A_korn, vmap, vmap)
              + p.K * restrict_matrix(ops.M2, vmap, vmap);
    SpMat B = restrict_matrix(ops.M2, vmap, vmap);

    EigenResult res;
    if (seed) {
        Vec x = restrict_vector(seed->field, vmap);
        double sigma = x.dot(A * x) / x.dot(B * x);
        Eigen::SparseLU<SpMat> lu(SpMat(A - sigma * B));
        if (lu.info() != Eigen::Success)
            throw NoConvergence(0, std::numeric_limits<double>::infinity());
        for (int it = 0; it < 50; ++it) {
            Vec y = lu.solve(B * x);
            double yn = std::sqrt(y.dot(B * y));
            if (!(yn > 0)) throw NoConvergence(it, std::numeric_limits<double>::infinity());
            x = y / yn;
            res.lambda = x.dot(A * x) / x.dot(B * x);
            res.residual = (A * x - res.lambda * (B * x)).norm() / x.norm();
            res.iterations = it + 1;
            if (res.residual <= 1e-12) break;
        }
        if (res.residual > 1e-9) throw NoConvergence(res.iterations, res.residual);
        res.field = x;
    } else {
        GenEigOptions opt;
        opt.residual_tol = 1e-8;  // near-degenerate ground pair limits the floor
        res = gen_eig_smallest(A, B, opt);
    }
    res.field = expand_vector(res.field, vmap);
    res.h = m.h;
    return res;
}

KornEstimates korn_constants(const AssembledOperators& ops, const Mesh& m,
                             const StiffnessS& S) {
    (void)S;  // ops.A_korn already carries S
    DofMap smap = make_dof_map(ops.n, ops.dirichlet_mask);
    DofMap vmap = vector_dof_map(smap, ops.n);

    SpMat Ak = restrict_matrix(ops.A_korn, vmap, vmap);
    SpMat H2 = restrict_matrix(ops.M2, vmap, vmap) + restrict_matrix(ops.A_gg, vmap, vmap);

    KornEstimates k;
    k.c_k1 = gen_eig_smallest(Ak, H2).lambda;
    // the top of this pencil's spectrum is clustered: the Rayleigh quotient
    // stagnates at the right value long before the eigenvector settles, so
    // gate on stagnation alone
    GenEigOptions top;
    top.rq_tol = 1e-6;
    top.residual_tol = std::numeric_limits<double>::infinity();
    top.max_iter = 10000;
    k.c_k2 = gen_eig_largest(Ak, H2, top).lambda;

    // coupled form: K |grad w + v|^2 + <S D v, D v> over (w, v)
    int nw = smap.n_reduced, nv = vmap.n_reduced;
    double K = 1.0;  // shear weight fixed at 1 for the constant estimate
    SpMat Aw = restrict_matrix(ops.A_lap, smap, smap);
    SpMat Gr = restrict_matrix(ops.G, vmap, smap);
    SpMat Mv = restrict_matrix(ops.M2, vmap, vmap);
    std::vector<Eigen::Triplet<double>> tq, tb;
    auto add = [](std::vector<Eigen::Triplet<double>>& t, const SpMat& A, int ro, int co,
                  double s, bool transpose) {
        for (int kk = 0; kk < A.outerSize(); ++kk)
            for (SpMat::InnerIterator it(A, kk); it; ++it) {
                int r = transpose ? static_cast<int>(it.col()) : static_cast<int>(it.row());
                int c = transpose ? static_cast<int>(it.row()) : static_cast<int>(it.col());
                t.emplace_back(ro + r, co + c, s * it.value());
            }
    };
    add(tq, Aw, 0, 0, K, false);
    add(tq, Gr, 0, nw, K, true);   // int grad(w) . v
    add(tq, Gr, nw, 0, K, false);
    add(tq, Mv, nw, nw, K, false);
    add(tq, Ak, nw, nw, 1.0, false);
    SpMat Q(nw + nv, nw + nv);
    Q.setFromTriplets(tq.begin(), tq.end());

    SpMat Hw = restrict_matrix(ops.M, smap, smap) + Aw;
    add(tb, Hw, 0, 0, 1.0, false);
    add(tb, H2, nw, nw, 1.0, false);
    SpMat Bm(nw + nv, nw + nv);
    Bm.setFromTriplets(tb.begin(), tb.end());

    // the bottom of the coupled pencil is clustered as well (shear-free
    // fields v ~ -grad w pile up near the infimum); gate on the value
    k.c_k = gen_eig_smallest(Q, Bm, top).lambda;

    k.c_p = 1.0 / laplace_eigenmode(ops, m).lambda;
    return k;
}

State nondecay_initial_data(const EigenResult& eig, const PlateParams& p, int n) {
    (void)p;
    State s = State::zero(n);
    if (eig.field.size() != 2 * n) throw MissingEigenmode();
    s.v = eig.field;
    return s;
}

double nondecay_frequency(const EigenResult& eig, const PlateParams& p) {
    double stiff = eig.lambda * p.dflex * 0.5 * (1.0 - p.mu) + p.K;
    return std::sqrt(stiff / p.rho2);
}

double richardson_extrapolate(double v_h, double v_h2, double v_h4) {
    double d1 = v_h - v_h2, d2 = v_h2 - v_h4;
    if (d2 == 0.0 || d1 / d2 <= 1.0) return v_h4;  // already converged or no rate
    double ratio = d1 / d2;  // 2^p
    return v_h4 - d2 / (ratio - 1.0);
}

} // namespace rmt
