#pragma once

#include <Eigen/SparseCholesky>
#include <memory>

#include "rmt/fem.hpp"

namespace rmt {

/// Result of one divergence-inversion solve. u is the nodal field with
/// div u = f weakly; phi and psi are the zero-mean potentials,
/// u = -(grad phi + rot' psi) with rot' = (d2, -d1)'.
struct BogovskiiSolve {
    Vec phi, psi;        // size n, zero lumped mean
    Vec u;               // size 2n, nodal projection
    double residual_div = 0;    // || div u - f ||, elementwise L2
    double residual_rot = 0;    // || rot u ||
    double boundary_norm = 0;   // discrete trace norm of u on the boundary
    double cross_energy = 0;    // | int grad(phi) . rot'(psi) |, diagnostic
    double continuity = 0;      // ||u||_H1-discrete / ||f||_L2
};

/// Right inverse of the divergence on zero-mean data, producing irrotational
/// fields with vanishing boundary trace in the limit. The coupled potential
/// system is factored once; repeated applies are backsolves.
class BogovskiiOperator {
public:
    BogovskiiOperator(const AssembledOperators& ops, const Mesh& m);
    ~BogovskiiOperator();
    BogovskiiOperator(BogovskiiOperator&&) noexcept;

    /// f must have zero lumped mean (tolerance 1e-10 * ||f||); throws NonZeroMean.
    BogovskiiSolve apply(const Vec& f) const;

    /// Apply without the residual bookkeeping; returns just the nodal u.
    Vec apply_field(const Vec& f) const;

    double lumped_mean(const Vec& f) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

BogovskiiSolve bogovskii_apply(const AssembledOperators& ops, const Mesh& m, const Vec& f);

/// || Bog(div u) || / || u || in L2, after zeroing the boundary-normal
/// components of u and removing the residual mean of div u.
double bogovskii_div_estimate_check(const BogovskiiOperator& bog,
                                    const AssembledOperators& ops, const Mesh& m,
                                    const Vec& u);

/// | ||grad u||^2 - ||div u||^2 - ||rot u||^2 | via the assembled forms.
double gradient_identity_defect(const AssembledOperators& ops, const Vec& u);

/// Outward unit normals at boundary vertices (angle-weighted edge average);
/// zero rows for interior vertices.
std::vector<std::array<double, 2>> boundary_normals(const Mesh& m);

/// Discrete trace norm: sqrt( sum over boundary edges |e| * avg |u|^2 ).
double boundary_trace_norm(const Mesh& m, const Vec& u);

} // namespace rmt
