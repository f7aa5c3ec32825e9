#include "rmt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

namespace rmt {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void push_ccw(Mesh& m, int a, int b, int c) {
    if (signed_area(m.vertices[a], m.vertices[b], m.vertices[c]) < 0.0) std::swap(b, c);
    m.triangles.push_back({a, b, c});
}

/// Edge-incidence scan: boundary vertices, boundary flags and the true h.
void finalize(Mesh& m) {
    std::map<std::pair<int, int>, int> edge_count;
    double hmax = 0.0;
    for (const auto& t : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
            double dx = m.vertices[a][0] - m.vertices[b][0];
            double dy = m.vertices[a][1] - m.vertices[b][1];
            hmax = std::max(hmax, std::hypot(dx, dy));
        }
    }
    m.h = hmax;
    m.is_boundary.assign(m.vertices.size(), 0);
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) {
            m.is_boundary[edge.first] = 1;
            m.is_boundary[edge.second] = 1;
        }
    }
    m.boundary_vertices.clear();
    for (int i = 0; i < m.num_vertices(); ++i)
        if (m.is_boundary[i]) m.boundary_vertices.push_back(i);
}

} // namespace

Mesh mesh_disk(double radius, double h_target) {
    if (!(radius > 0.0)) throw DegenerateResolution("disk radius must be positive");
    if (!(h_target > 0.0) || h_target >= radius)
        throw DegenerateResolution("h_target must lie in (0, radius)");

    // stitch diagonals between misaligned rings run up to ~1.7 ring spacings,
    // so rings are packed a bit tighter than h_target to keep h <= 1.5 h_target
    int n_r = static_cast<int>(std::ceil(radius / (0.8 * h_target)));
    double dr = radius / n_r;

    Mesh m;
    m.geometry.kind = GeometryKind::Disk;
    m.geometry.radius = radius;
    m.geometry.cx = 0.0;
    m.geometry.cy = 0.0;

    // Ring k has round(2*pi*k) vertices, so both radial spacing and arc
    // spacing stay close to dr.
    std::vector<int> ring_start(n_r + 1), ring_count(n_r + 1);
    m.vertices.push_back({0.0, 0.0});
    ring_start[0] = 0;
    ring_count[0] = 1;
    for (int k = 1; k <= n_r; ++k) {
        int mk = std::max(3, static_cast<int>(std::lround(two_pi * k)));
        ring_start[k] = m.num_vertices();
        ring_count[k] = mk;
        double rk = k * dr;
        for (int j = 0; j < mk; ++j) {
            double a = two_pi * j / mk;
            m.vertices.push_back({rk * std::cos(a), rk * std::sin(a)});
        }
    }
    if (ring_count[n_r] < 3) throw DegenerateResolution("fewer than 3 boundary vertices");

    // Center fan.
    for (int j = 0; j < ring_count[1]; ++j)
        push_ccw(m, 0, ring_start[1] + j, ring_start[1] + (j + 1) % ring_count[1]);

    // Stitch consecutive rings by merging the two angular sequences.
    for (int k = 2; k <= n_r; ++k) {
        int mi = ring_count[k - 1], mo = ring_count[k];
        int bi = ring_start[k - 1], bo = ring_start[k];
        int i = 0, j = 0;
        while (i < mi || j < mo) {
            double next_inner = two_pi * (i + 1) / mi;
            double next_outer = two_pi * (j + 1) / mo;
            bool advance_outer = (j < mo) && (i == mi || next_outer <= next_inner);
            if (advance_outer) {
                push_ccw(m, bi + i % mi, bo + j % mo, bo + (j + 1) % mo);
                ++j;
            } else {
                push_ccw(m, bi + i % mi, bo + j % mo, bi + (i + 1) % mi);
                ++i;
            }
        }
    }

    finalize(m);
    return m;
}

Mesh mesh_rectangle(double lx, double ly, double h_target) {
    if (!(lx > 0.0) || !(ly > 0.0))
        throw DegenerateResolution("rectangle sides must be positive");
    if (!(h_target > 0.0)) throw DegenerateResolution("h_target must be positive");

    int nx = std::max(1, static_cast<int>(std::ceil(lx / h_target)));
    int ny = std::max(1, static_cast<int>(std::ceil(ly / h_target)));
    double dx = lx / nx, dy = ly / ny;

    Mesh m;
    m.geometry.kind = GeometryKind::Rectangle;
    m.geometry.lx = lx;
    m.geometry.ly = ly;
    m.geometry.cx = 0.5 * lx;
    m.geometry.cy = 0.5 * ly;

    auto gid = [&](int ix, int iy) { return iy * (nx + 1) + ix; };
    for (int iy = 0; iy <= ny; ++iy)
        for (int ix = 0; ix <= nx; ++ix)
            m.vertices.push_back({ix * dx, iy * dy});

    // Crossed pattern: one centroid per cell, 4 triangles around it.
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            int c = m.num_vertices();
            m.vertices.push_back({(ix + 0.5) * dx, (iy + 0.5) * dy});
            int v00 = gid(ix, iy), v10 = gid(ix + 1, iy);
            int v01 = gid(ix, iy + 1), v11 = gid(ix + 1, iy + 1);
            push_ccw(m, v00, v10, c);
            push_ccw(m, v10, v11, c);
            push_ccw(m, v11, v01, c);
            push_ccw(m, v01, v00, c);
        }
    }

    finalize(m);
    return m;
}

double radial_coordinate(const Mesh& m, int vertex) {
    if (vertex < 0 || vertex >= m.num_vertices())
        throw Error("vertex index out of range");
    double dx = m.vertices[vertex][0] - m.geometry.cx;
    double dy = m.vertices[vertex][1] - m.geometry.cy;
    return std::hypot(dx, dy);
}

double triangle_area(const Mesh& m, int t) {
    const auto& tri = m.triangles[t];
    return signed_area(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]);
}

double total_area(const Mesh& m) {
    double a = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) a += triangle_area(m, t);
    return a;
}

void export_mesh(const Mesh& m, std::ostream& os) {
    char buf[128];
    os << "vertices " << m.num_vertices() << "\n";
    for (int i = 0; i < m.num_vertices(); ++i) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", i, m.vertices[i][0], m.vertices[i][1]);
        os << buf;
    }
    os << "triangles " << m.num_triangles() << "\n";
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[t];
        os << t << " " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
    os << "boundary " << m.boundary_vertices.size() << "\n";
    for (int b : m.boundary_vertices) os << b << "\n";
}

} // namespace rmt
