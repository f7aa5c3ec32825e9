#include "rmt/initial_data.hpp"

#include <cmath>
#include <random>

namespace rmt {

Vec lumped_areas(const Mesh& m) {
    Vec areas = Vec::Zero(m.num_vertices());
    for (int t = 0; t < m.num_triangles(); ++t) {
        double third = triangle_area(m, t) / 3.0;
        for (int v : m.triangles[t]) areas[v] += third;
    }
    return areas;
}

Vec mean_zero_project(const Vec& theta, const Mesh& m) {
    Vec areas = lumped_areas(m);
    double mean = areas.dot(theta) / areas.sum();
    return theta.array() - mean;
}

namespace {

State radial_gaussian(const InitialPreset& preset, const Mesh& m) {
    if (m.geometry.kind != GeometryKind::Disk)
        throw GeometryMismatch("radial preset needs a disk mesh");
    int n = m.num_vertices();
    double R = m.geometry.radius;
    double a = preset.amplitude;
    double s2 = preset.width * preset.width;

    State st = State::zero(n);
    for (int i = 0; i < n; ++i) {
        double x = m.vertices[i][0] - m.geometry.cx;
        double y = m.vertices[i][1] - m.geometry.cy;
        double r2 = x * x + y * y;
        double bump = std::exp(-0.5 * r2 / s2);
        double clamp = 1.0 - r2 / (R * R);
        // w radial bump vanishing on the boundary
        st.w[i] = a * bump * clamp;
        // v, q radial fields g(r) e_r = g(r)/r (x, y): irrotational, clamped
        double g = a * bump * clamp;
        st.v[i] = g * x;
        st.v[n + i] = g * y;
        st.q[i] = g * x;
        st.q[n + i] = g * y;
        st.theta[i] = a * bump;
    }
    for (int i = 0; i < n; ++i)
        if (m.is_boundary[i]) {
            st.w[i] = 0.0;
            st.v[i] = st.v[n + i] = 0.0;
        }
    st.theta = mean_zero_project(st.theta, m);
    return st;
}

State random_clamped(const InitialPreset& preset, const Mesh& m) {
    int n = m.num_vertices();
    std::mt19937_64 rng(preset.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto fill = [&](Vec& x, bool clamped) {
        for (int i = 0; i < x.size(); ++i) x[i] = preset.amplitude * uni(rng);
        if (clamped)
            for (int c = 0; c * n < x.size(); ++c)
                for (int i = 0; i < n; ++i)
                    if (m.is_boundary[i]) x[c * n + i] = 0.0;
    };
    State st = State::zero(n);
    fill(st.w, true);
    fill(st.wt, true);
    fill(st.v, true);
    fill(st.vt, true);
    fill(st.theta, false);
    fill(st.q, false);
    st.theta = mean_zero_project(st.theta, m);
    return st;
}

} // namespace

State build_initial(const InitialPreset& preset, const Mesh& m, const EigenResult* eig) {
    int n = m.num_vertices();
    switch (preset.kind) {
        case PresetKind::Zero:
            return State::zero(n);
        case PresetKind::RadialGaussian:
            return radial_gaussian(preset, m);
        case PresetKind::RandomClamped:
            return random_clamped(preset, m);
        case PresetKind::SolenoidalEigenmode: {
            if (!eig || eig->field.size() == 0) throw MissingEigenmode();
            if (eig->field.size() != 2 * n)
                throw GeometryMismatch("eigenmode does not match the mesh");
            State st = State::zero(n);
            st.v = preset.amplitude * eig->field;
            return st;
        }
    }
    throw Error("unknown preset kind");
}

} // namespace rmt
