#include "rmt/fem.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rmt {

namespace {

using Trip = Eigen::Triplet<double>;

ElemGeom element_geometry(const Mesh& m, int t) {
    ElemGeom g;
    g.v = m.triangles[t];
    const auto& p0 = m.vertices[g.v[0]];
    const auto& p1 = m.vertices[g.v[1]];
    const auto& p2 = m.vertices[g.v[2]];
    double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    g.area = 0.5 * det;
    // grad(phi_i) = rot of the opposite edge / (2 area)
    g.grad[0][0] = (p1[1] - p2[1]) / det;
    g.grad[0][1] = (p2[0] - p1[0]) / det;
    g.grad[1][0] = (p2[1] - p0[1]) / det;
    g.grad[1][1] = (p0[0] - p2[0]) / det;
    g.grad[2][0] = (p0[1] - p1[1]) / det;
    g.grad[2][1] = (p1[0] - p0[0]) / det;
    return g;
}

} // namespace

AssembledOperators assemble(const Mesh& m, const StiffnessS& S) {
    AssembledOperators ops;
    int n = m.num_vertices();
    ops.n = n;
    ops.dirichlet_mask = m.is_boundary;
    ops.elems.reserve(m.num_triangles());

    std::vector<Trip> tM, tM2, tL, tDD, tRR, tK, tG, tB, tR;
    size_t nt = m.num_triangles();
    tM.reserve(9 * nt);
    tL.reserve(9 * nt);

    for (int t = 0; t < m.num_triangles(); ++t) {
        ElemGeom g = element_geometry(m, t);
        if (!(g.area > 0.0)) throw GeometryMismatch("non-positive triangle area");
        ops.elems.push_back(g);
        ops.domain_area += g.area;
        double a = g.area;

        for (int i = 0; i < 3; ++i) {
            int gi = g.v[i];
            for (int j = 0; j < 3; ++j) {
                int gj = g.v[j];
                double mass = a / 12.0 * (i == j ? 2.0 : 1.0);
                tM.emplace_back(gi, gj, mass);
                tM2.emplace_back(gi, gj, mass);
                tM2.emplace_back(n + gi, n + gj, mass);

                double lap = a * (g.grad[i][0] * g.grad[j][0] + g.grad[i][1] * g.grad[j][1]);
                tL.emplace_back(gi, gj, lap);

                // div-div: (d1 u1 + d2 u2)(d1 w1 + d2 w2)
                for (int ci = 0; ci < 2; ++ci)
                    for (int cj = 0; cj < 2; ++cj)
                        tDD.emplace_back(ci * n + gi, cj * n + gj,
                                         a * g.grad[i][ci] * g.grad[j][cj]);

                // rot-rot: rot u = d1 u2 - d2 u1; sign (-1)^{1-c} per component
                for (int ci = 0; ci < 2; ++ci)
                    for (int cj = 0; cj < 2; ++cj) {
                        double si = (ci == 0) ? -1.0 : 1.0;
                        double sj = (cj == 0) ? -1.0 : 1.0;
                        tRR.emplace_back(ci * n + gi, cj * n + gj,
                                         a * si * sj * g.grad[i][1 - ci] * g.grad[j][1 - cj]);
                    }

                // generalized-gradient stiffness: columns of D phi for
                // component c of node i, strains (e11, e22, 2 e12 engineering
                // convention folded into the (1-mu)/2 shear entry).
                // D(phi e_1) = (d1 phi, 0, d2 phi), D(phi e_2) = (0, d2 phi, d1 phi).
                double Bi[2][3] = {{g.grad[i][0], 0.0, g.grad[i][1]},
                                   {0.0, g.grad[i][1], g.grad[i][0]}};
                double Bj[2][3] = {{g.grad[j][0], 0.0, g.grad[j][1]},
                                   {0.0, g.grad[j][1], g.grad[j][0]}};
                for (int ci = 0; ci < 2; ++ci)
                    for (int cj = 0; cj < 2; ++cj) {
                        double val = 0.0;
                        for (int r = 0; r < 3; ++r)
                            for (int s = 0; s < 3; ++s)
                                val += Bi[ci][r] * S.entries(r, s) * Bj[cj][s];
                        tK.emplace_back(ci * n + gi, cj * n + gj, a * val);
                    }

                // couplings: int (d_c phi_j) phi_i = area/3 * d_c phi_j
                for (int c = 0; c < 2; ++c) {
                    double val = a / 3.0 * g.grad[j][c];
                    tG.emplace_back(c * n + gi, gj, val);
                    tB.emplace_back(gi, c * n + gj, val);
                }
                tR.emplace_back(gi, 1 * n + gj, a / 3.0 * g.grad[j][0]);
                tR.emplace_back(gi, 0 * n + gj, -a / 3.0 * g.grad[j][1]);
            }
        }
    }

    auto build = [](int rows, int cols, std::vector<Trip>& trips) {
        SpMat A(rows, cols);
        A.setFromTriplets(trips.begin(), trips.end());
        A.makeCompressed();
        return A;
    };
    ops.M = build(n, n, tM);
    ops.M2 = build(2 * n, 2 * n, tM2);
    ops.A_lap = build(n, n, tL);
    ops.A_dd = build(2 * n, 2 * n, tDD);
    ops.A_rr = build(2 * n, 2 * n, tRR);
    ops.A_korn = build(2 * n, 2 * n, tK);
    ops.G = build(2 * n, n, tG);
    ops.B_div = build(n, 2 * n, tB);
    ops.R_rot = build(n, 2 * n, tR);

    // block-diagonal vector stiffness from the scalar one
    std::vector<Trip> tGG;
    tGG.reserve(2 * ops.A_lap.nonZeros());
    for (int k = 0; k < ops.A_lap.outerSize(); ++k)
        for (SpMat::InnerIterator it(ops.A_lap, k); it; ++it) {
            tGG.emplace_back(it.row(), it.col(), it.value());
            tGG.emplace_back(n + it.row(), n + it.col(), it.value());
        }
    ops.A_gg = build(2 * n, 2 * n, tGG);

    ops.lumped = ops.M * Vec::Ones(n);
    return ops;
}

PcgResult solve_spd(const SpMat& A, const Vec& b, double tol, int max_iter, const Vec* x0) {
    int n = static_cast<int>(A.rows());
    if (max_iter < 0) max_iter = 20 * n;

    Vec dinv(n);
    for (int i = 0; i < n; ++i) {
        double d = A.coeff(i, i);
        dinv[i] = (d > 0.0) ? 1.0 / d : 1.0;
    }

    PcgResult res;
    res.x = x0 ? *x0 : Vec::Zero(n);
    Vec r = b - A * res.x;
    double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x.setZero();
        return res;
    }
    Vec z = dinv.asDiagonal() * r;
    Vec p = z;
    double rz = r.dot(z);
    res.residual = r.norm() / bnorm;
    for (int it = 0; it < max_iter && res.residual > tol; ++it) {
        Vec Ap = A * p;
        double alpha = rz / p.dot(Ap);
        res.x += alpha * p;
        r -= alpha * Ap;
        res.residual = r.norm() / bnorm;
        res.iterations = it + 1;
        if (res.residual <= tol) break;
        z = dinv.asDiagonal() * r;
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    if (res.residual > tol) throw NoConvergence(res.iterations, res.residual);
    return res;
}

Vec project_l2(const Mesh& m, const std::function<double(double, double)>& f) {
    Vec out(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i)
        out[i] = f(m.vertices[i][0], m.vertices[i][1]);
    return out;
}

DofMap make_dof_map(int n_full, const std::vector<char>& constrained) {
    DofMap map;
    map.reduced_of_full.assign(n_full, -1);
    for (int i = 0; i < n_full; ++i) {
        if (!constrained[i]) {
            map.reduced_of_full[i] = map.n_reduced++;
            map.full_of_reduced.push_back(i);
        }
    }
    return map;
}

DofMap identity_dof_map(int n_full) {
    DofMap map;
    map.n_reduced = n_full;
    map.full_of_reduced.resize(n_full);
    map.reduced_of_full.resize(n_full);
    for (int i = 0; i < n_full; ++i) {
        map.full_of_reduced[i] = i;
        map.reduced_of_full[i] = i;
    }
    return map;
}

DofMap vector_dof_map(const DofMap& scalar_map, int n_full) {
    DofMap map;
    map.reduced_of_full.assign(2 * n_full, -1);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < n_full; ++i) {
            if (scalar_map.reduced_of_full[i] >= 0) {
                map.reduced_of_full[c * n_full + i] = map.n_reduced++;
                map.full_of_reduced.push_back(c * n_full + i);
            }
        }
    return map;
}

SpMat restrict_matrix(const SpMat& A, const DofMap& rows, const DofMap& cols) {
    std::vector<Trip> trips;
    trips.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            int r = rows.reduced_of_full[it.row()];
            int c = cols.reduced_of_full[it.col()];
            if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
        }
    SpMat out(rows.n_reduced, cols.n_reduced);
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

Vec restrict_vector(const Vec& x, const DofMap& map) {
    Vec out(map.n_reduced);
    for (int r = 0; r < map.n_reduced; ++r) out[r] = x[map.full_of_reduced[r]];
    return out;
}

Vec expand_vector(const Vec& xr, const DofMap& map) {
    Vec out = Vec::Zero(map.reduced_of_full.size());
    for (int r = 0; r < map.n_reduced; ++r) out[map.full_of_reduced[r]] = xr[r];
    return out;
}

double quad_form(const SpMat& A, const Vec& x) { return x.dot(A * x); }

double mass_norm(const SpMat& M, const Vec& x) {
    return std::sqrt(std::max(0.0, x.dot(M * x)));
}

void dump_coordinate(const SpMat& A, std::ostream& os) {
    char buf[96];
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n",
                          static_cast<long>(it.row()), static_cast<long>(it.col()), it.value());
            os << buf;
        }
}

} // namespace rmt
