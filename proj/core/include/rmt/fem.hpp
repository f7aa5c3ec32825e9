#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "rmt/mesh.hpp"
#include "rmt/params.hpp"

namespace rmt {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Per-element geometry of the P1 basis: constant gradients and area.
struct ElemGeom {
    std::array<int, 3> v;
    double area;
    double grad[3][2];  // grad[local node][component]
};

/// Sparse realizations of every bilinear form of the weak formulation.
///
/// Scalar fields use one dof per vertex; vector fields stack the two
/// components, dof (c, i) -> c*n + i.
///
/// Couplings are load-style: (G w)_{(c,i)} = int (d_c w_h) phi_i,
/// (B v)_i = int (div v_h) phi_i, (R v)_i = int (rot v_h) phi_i.
struct AssembledOperators {
    int n = 0;            // vertex count
    SpMat M;              // scalar mass
    SpMat M2;             // vector mass, blkdiag(M, M)
    SpMat A_lap;          // <grad, grad> scalar stiffness
    SpMat A_gg;           // vector full-gradient stiffness, blkdiag(A_lap, A_lap)
    SpMat A_dd;           // <div, div>
    SpMat A_rr;           // <rot, rot>
    SpMat A_korn;         // <S D v, D w> with the generalized gradient D
    SpMat G;              // (2n x n) gradient coupling
    SpMat B_div;          // (n x 2n) divergence coupling
    SpMat R_rot;          // (n x 2n) rotation coupling
    Vec lumped;           // row sums of M (vertex areas)
    std::vector<char> dirichlet_mask;  // boundary vertices (clamped fields)
    std::vector<ElemGeom> elems;
    double domain_area = 0.0;
};

AssembledOperators assemble(const Mesh& m, const StiffnessS& S);

/// Jacobi-preconditioned conjugate gradient for SPD systems.
/// Iteration cap 20*n unless max_iter is given; throws NoConvergence.
struct PcgResult {
    Vec x;
    int iterations = 0;
    double residual = 0.0;
};
PcgResult solve_spd(const SpMat& A, const Vec& b, double tol = 1e-10,
                    int max_iter = -1, const Vec* x0 = nullptr);

/// P1 nodal interpolation of a pointwise function.
Vec project_l2(const Mesh& m, const std::function<double(double, double)>& f);

/// Index maps between full nodal vectors and a reduced (unconstrained) set.
struct DofMap {
    std::vector<int> full_of_reduced;  // reduced index -> full index
    std::vector<int> reduced_of_full;  // full index -> reduced index or -1
    int n_reduced = 0;
};
DofMap make_dof_map(int n_full, const std::vector<char>& constrained);

/// Row/column restriction of a sparse matrix to reduced index sets.
SpMat restrict_matrix(const SpMat& A, const DofMap& rows, const DofMap& cols);
Vec restrict_vector(const Vec& x, const DofMap& map);
Vec expand_vector(const Vec& xr, const DofMap& map);

/// Unconstrained map (identity) for fields without Dirichlet conditions.
DofMap identity_dof_map(int n_full);
/// Vector-field map from a scalar constraint mask (applied to both components).
DofMap vector_dof_map(const DofMap& scalar_map, int n_full);

/// Energy-style quadratic form x' A x.
double quad_form(const SpMat& A, const Vec& x);
/// L2 norm induced by a mass matrix.
double mass_norm(const SpMat& M, const Vec& x);

/// Coordinate-format dump, one "i j value" line per entry.
void dump_coordinate(const SpMat& A, std::ostream& os);

} // namespace rmt
