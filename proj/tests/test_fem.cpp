#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <rmt/fem.hpp>
#include <rmt/spectral.hpp>

using namespace rmt;

namespace {

Mesh reference_triangle() {
    Mesh m;
    m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    m.triangles = {{0, 1, 2}};
    m.boundary_vertices = {0, 1, 2};
    m.is_boundary = {1, 1, 1};
    m.h = std::sqrt(2.0);
    return m;
}

StiffnessS identity_S() {
    StiffnessS S;
    S.entries = Eigen::Matrix3d::Identity();
    return S;
}

Vec random_clamped_vector(const Mesh& m, std::uint64_t seed) {
    int n = m.num_vertices();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(2 * n);
    for (int i = 0; i < 2 * n; ++i) v[i] = u(rng);
    for (int i = 0; i < n; ++i)
        if (m.is_boundary[i]) v[i] = v[n + i] = 0.0;
    return v;
}

} // namespace

TEST_CASE("reference-triangle element matrix, hand-integrated oracle") {
    // P1 gradients on (0,0),(1,0),(0,1): g1=(-1,-1), g2=(1,0), g3=(0,1),
    // area 1/2. With S = I the generalized-gradient form gives blocks
    //   XX_ij = area*(g_i . g_j), YY = XX, XY_ij = area*g_i2*g_j1.
    Mesh m = reference_triangle();
    AssembledOperators ops = assemble(m, identity_S());
    double g[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
    Eigen::MatrixXd expect(6, 6);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double dot = g[i][0] * g[j][0] + g[i][1] * g[j][1];
            expect(i, j) = 0.5 * dot;
            expect(3 + i, 3 + j) = 0.5 * dot;
            expect(i, 3 + j) = 0.5 * g[i][1] * g[j][0];
            expect(3 + i, j) = 0.5 * g[i][0] * g[j][1];
        }
    Eigen::MatrixXd got = Eigen::MatrixXd(ops.A_korn);
    CHECK((got - expect).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("rigid translations are annihilated by the Korn form") {
    Mesh m = mesh_disk(1.0, 0.2);
    PlateParams p;
    p.mu = 0.3;
    AssembledOperators ops = assemble(m, build_stiffness_S(p));
    int n = ops.n;
    Vec ex = Vec::Zero(2 * n), ey = Vec::Zero(2 * n);
    ex.head(n).setOnes();
    ey.tail(n).setOnes();
    CHECK((ops.A_korn * ex).norm() < 1e-12);
    CHECK((ops.A_korn * ey).norm() < 1e-12);
}

TEST_CASE("mass matrix row sums are the lumped vertex areas") {
    Mesh m = mesh_disk(1.0, 0.2);
    AssembledOperators ops = assemble(m, identity_S());
    Vec rowsum = ops.M * Vec::Ones(ops.n);
    CHECK((rowsum - ops.lumped).norm() < 1e-12);
    CHECK(ops.lumped.sum() == doctest::Approx(total_area(m)).epsilon(1e-12));
}

TEST_CASE("discrete integration by parts: <B_div v, w> + <v, G w> = 0") {
    Mesh m = mesh_disk(1.0, 0.15);
    AssembledOperators ops = assemble(m, identity_S());
    int n = ops.n;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Vec v(2 * n), w(n);
        for (int i = 0; i < 2 * n; ++i) v[i] = u(rng);
        for (int i = 0; i < n; ++i) w[i] = m.is_boundary[i] ? 0.0 : u(rng);
        double duality = (ops.B_div * v).dot(w) + v.dot(ops.G * w);
        CHECK(std::abs(duality) < 1e-12);
    }
}

TEST_CASE("unit-square Dirichlet eigenvalue near the separation oracle") {
    Mesh m = mesh_rectangle(1.0, 1.0, 0.05);
    AssembledOperators ops = assemble(m, identity_S());
    EigenResult res = laplace_eigenmode(ops, m);
    double oracle = 2.0 * std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(res.lambda - oracle) < 0.05 * oracle);
}

TEST_CASE("solve_spd basics") {
    int n = 20;
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    SpMat I(n, n);
    I.setFromTriplets(t.begin(), t.end());
    Vec b = Vec::LinSpaced(n, 1.0, 2.0);
    CHECK((solve_spd(I, b).x - b).norm() < 1e-12);

    t.clear();
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, double(i + 1));
    SpMat D(n, n);
    D.setFromTriplets(t.begin(), t.end());
    Vec x = solve_spd(D, Vec::Ones(n)).x;
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(1.0 / (i + 1)).epsilon(1e-10));
}

TEST_CASE("solve_spd reports no convergence at an impossible cap") {
    Mesh m = mesh_disk(1.0, 0.2);
    AssembledOperators ops = assemble(m, identity_S());
    DofMap map = make_dof_map(ops.n, ops.dirichlet_mask);
    SpMat A = restrict_matrix(ops.A_lap, map, map);
    Vec b = Vec::Ones(A.rows());
    CHECK_THROWS_AS(solve_spd(A, b, 1e-14, 1), NoConvergence);
}

TEST_CASE("manufactured Poisson solution converges at second order") {
    auto exact = [](double x, double y) {
        return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
    };
    auto rhs = [&](double x, double y) {
        return 2.0 * std::numbers::pi * std::numbers::pi * exact(x, y);
    };
    double err[2];
    double hs[2] = {0.1, 0.05};
    for (int k = 0; k < 2; ++k) {
        Mesh m = mesh_rectangle(1.0, 1.0, hs[k]);
        AssembledOperators ops = assemble(m, identity_S());
        DofMap map = make_dof_map(ops.n, ops.dirichlet_mask);
        Vec load = ops.M * project_l2(m, rhs);
        Vec u = expand_vector(
            solve_spd(restrict_matrix(ops.A_lap, map, map), restrict_vector(load, map)).x,
            map);
        Vec diff = u - project_l2(m, exact);
        err[k] = mass_norm(ops.M, diff);
    }
    CHECK(err[1] < err[0]);
    CHECK(err[0] / err[1] > 3.0);  // rate ~ 2 means a factor ~ 4
}

TEST_CASE("project_l2 nodal interpolation") {
    Mesh m = mesh_rectangle(1.0, 1.0, 0.25);
    Vec z = project_l2(m, [](double, double) { return 0.0; });
    CHECK(z.norm() == 0.0);
    Vec ones = project_l2(m, [](double, double) { return 1.0; });
    CHECK((ones - Vec::Ones(m.num_vertices())).norm() == 0.0);
    Vec xs = project_l2(m, [](double x, double) { return x; });
    for (int i = 0; i < m.num_vertices(); ++i) CHECK(xs[i] == m.vertices[i][0]);
}

TEST_CASE("Korn form decomposes exactly into gradient and divergence forms") {
    // null-Lagrangian identity on clamped fields:
    // <S D v, D v> = Dflex(1-mu)/2 * ||grad v||^2 + Dflex(1+mu)/2 * ||div v||^2
    Mesh m = mesh_disk(1.0, 0.15);
    for (double mu : {0.0, 0.3, -0.4}) {
        PlateParams p;
        p.mu = mu;
        p.dflex = 1.7;
        AssembledOperators ops = assemble(m, build_stiffness_S(p));
        double c1 = p.dflex * (1.0 - mu) / 2.0;
        double c2 = p.dflex * (1.0 + mu) / 2.0;
        for (std::uint64_t s : {1u, 2u, 3u}) {
            Vec v = random_clamped_vector(m, s);
            double lhs = quad_form(ops.A_korn, v);
            double rhs2 = c1 * quad_form(ops.A_gg, v) + c2 * quad_form(ops.A_dd, v);
            CHECK(lhs == doctest::Approx(rhs2).epsilon(1e-12));
        }
    }
}

TEST_CASE("Korn quadratic form positive on the clamped space") {
    Mesh m = mesh_disk(1.0, 0.2);
    PlateParams p;
    AssembledOperators ops = assemble(m, build_stiffness_S(p));
    for (std::uint64_t s = 1; s <= 20; ++s) {
        Vec v = random_clamped_vector(m, s);
        CHECK(quad_form(ops.A_korn, v) > 0.0);
    }
}

TEST_CASE("dof map round trip") {
    std::vector<char> mask = {1, 0, 0, 1, 0};
    DofMap map = make_dof_map(5, mask);
    CHECK(map.n_reduced == 3);
    Vec full(5);
    full << 0, 1, 2, 0, 3;
    Vec red = restrict_vector(full, map);
    CHECK(red.size() == 3);
    CHECK((expand_vector(red, map) - full).norm() == 0.0);
}
