#pragma once

#include "rmt/dynamics.hpp"
#include "rmt/fem.hpp"

namespace rmt {

struct EigenResult {
    double lambda = 0;
    Vec field;          // full nodal vector (constrained entries zero)
    double residual = 0;  // ||A x - lambda B x|| / ||x|| on the reduced system
    double h = 0;
    int iterations = 0;
};

struct KornEstimates {
    double c_k1 = 0;  // min of <S D v, D v> against the vector H1 norm
    double c_k2 = 0;  // max of the same quotient
    double c_k = 0;   // coupled constant, bending + shear vs H1 x H1
    double c_p = 0;   // Poincare constant 1 / lambda_1(Dirichlet Laplacian)
};

/// Smallest generalized eigenpair A x = lambda B x (both SPD on the reduced
/// space) by inverse power iteration with a cached factorization.
struct GenEigOptions {
    double rq_tol = 1e-10;       // relative Rayleigh-quotient stagnation
    double residual_tol = 1e-9;  // on ||A x - lambda B x|| / ||x||
    int max_iter = 2000;
};
EigenResult gen_eig_smallest(const SpMat& A, const SpMat& B,
                             const GenEigOptions& opt = {});
EigenResult gen_eig_largest(const SpMat& A, const SpMat& B,
                            const GenEigOptions& opt = {});

/// Smallest Dirichlet Laplacian eigenpair on the scalar clamped space.
EigenResult laplace_eigenmode(const AssembledOperators& ops, const Mesh& m);

/// Smallest eigenpair of the vector Dirichlet Laplacian restricted to the
/// discretely divergence-free clamped subspace, via penalty on div.
EigenResult solenoidal_eigenmode(const AssembledOperators& ops, const Mesh& m);

KornEstimates korn_constants(const AssembledOperators& ops, const Mesh& m,
                             const StiffnessS& S);

/// Eigenpair of the clamped elastic operator <S D v, D v> + K |v|^2 against
/// the vector mass. Without a seed this is the ground mode. With a seed the
/// nearby eigenpair is located by shift-inverted iteration at the seed's
/// Rayleigh quotient; seeding with the solenoidal mode yields the exact
/// invariant mode of the undamped discrete v-dynamics.
EigenResult elastic_eigenmode(const AssembledOperators& ops, const Mesh& m,
                              const PlateParams& p,
                              const EigenResult* seed = nullptr);

/// The non-decaying datum: v carries the solenoidal eigenmode, all else zero.
State nondecay_initial_data(const EigenResult& eig, const PlateParams& p, int n);

/// Angular frequency of the reduced oscillator for the solenoidal mode.
double nondecay_frequency(const EigenResult& eig, const PlateParams& p);

/// Richardson extrapolation of eigenvalues at h, h/2, h/4 toward h -> 0.
double richardson_extrapolate(double v_h, double v_h2, double v_h4);

} // namespace rmt
