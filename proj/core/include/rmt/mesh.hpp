#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

enum class GeometryKind { Disk, Rectangle };

struct GeometryTag {
    GeometryKind kind = GeometryKind::Disk;
    double radius = 1.0;   // disk
    double lx = 1.0;       // rectangle
    double ly = 1.0;
    double cx = 0.0;       // centroid of the domain
    double cy = 0.0;
};

/// Conforming triangulation with boundary identification.
/// Triangles are counterclockwise; boundary vertices are exactly those
/// incident to an edge shared by a single triangle.
struct Mesh {
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> boundary_vertices;          // sorted, unique
    std::vector<char> is_boundary;               // per-vertex flag
    double h = 0.0;                              // true maximum edge length
    GeometryTag geometry;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
};

/// Concentric-ring triangulation of a disk centered at the origin.
/// Deterministic; ring structure preserves discrete rotational near-symmetry.
/// Guarantees h <= 1.5 * h_target.
Mesh mesh_disk(double radius, double h_target);

/// Structured crossed-diagonal triangulation of (0,lx) x (0,ly): each grid
/// cell is split into 4 triangles by its centroid. Total area exact.
Mesh mesh_rectangle(double lx, double ly, double h_target);

/// Euclidean distance of a vertex from the domain centroid.
double radial_coordinate(const Mesh& m, int vertex);

/// Plain-text export: sections "vertices", "triangles", "boundary".
void export_mesh(const Mesh& m, std::ostream& os);

double triangle_area(const Mesh& m, int t);
double total_area(const Mesh& m);

} // namespace rmt
