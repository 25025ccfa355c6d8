#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace capstek {

using Point2 = std::array<double, 2>;
using Triangle = std::array<int, 3>;

/// Triangulated reference domain. Vertex coordinates are (x, y) on the disk
/// and (s, theta) on the cylinder; for the cylinder `period` is 2*pi and edge
/// vectors are unwrapped in the second coordinate.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<Triangle> triangles;
    std::vector<std::vector<int>> boundary_loops;
    int genus = 0;
    int boundary_count = 1;
    double period = 0.0;  // 0 means not periodic

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
};

/// Concentric-ring triangulation of the unit disk: one center vertex and
/// `n_rings` rings of `n_angular` vertices each, ring i at radius i/n_rings.
Mesh build_disk_mesh(int n_rings, int n_angular);

/// Structured triangulation of [-s0, s0] x S^1, periodic in theta.
Mesh build_cylinder_mesh(double s0, int n_s, int n_angular);

/// Every invariant violation, as human-readable strings. Empty iff valid.
std::vector<std::string> validate_mesh(const Mesh& mesh);

/// Reference-coordinate vector from vertex `from` to vertex `to`, unwrapped
/// across the periodic seam.
Point2 edge_vector(const Mesh& mesh, int from, int to);

/// Signed reference area of triangle `t` (positive when counterclockwise).
double signed_area(const Mesh& mesh, int t);

/// Distinct edge count, treating (a,b) and (b,a) as one edge.
int count_edges(const Mesh& mesh);

/// V - E + F.
int euler_characteristic(const Mesh& mesh);

/// Sorted neighbor lists from triangle edges.
std::vector<std::vector<int>> vertex_adjacency(const Mesh& mesh);

/// Flag per vertex: true when it lies on some boundary loop.
std::vector<bool> boundary_flags(const Mesh& mesh);

nlohmann::ordered_json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const nlohmann::json& j);

}  // namespace capstek
