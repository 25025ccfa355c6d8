#include "capstek/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <utility>

#include "capstek/errors.hpp"

namespace capstek {

namespace {

using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::map<Edge, int> edge_triangle_counts(const Mesh& mesh) {
    std::map<Edge, int> counts;
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            ++counts[undirected(t[k], t[(k + 1) % 3])];
        }
    }
    return counts;
}

}  // namespace

Mesh build_disk_mesh(int n_rings, int n_angular) {
    if (n_rings < 1) throw InvalidArgument("build_disk_mesh: n_rings must be >= 1");
    if (n_angular < 3) throw InvalidArgument("build_disk_mesh: n_angular must be >= 3");

    Mesh mesh;
    mesh.genus = 0;
    mesh.boundary_count = 1;
    mesh.vertices.reserve(1 + static_cast<std::size_t>(n_rings) * n_angular);
    mesh.vertices.push_back({0.0, 0.0});
    for (int i = 1; i <= n_rings; ++i) {
        const double radius = static_cast<double>(i) / n_rings;
        for (int j = 0; j < n_angular; ++j) {
            const double angle = 2.0 * std::numbers::pi * j / n_angular;
            mesh.vertices.push_back({radius * std::cos(angle), radius * std::sin(angle)});
        }
    }

    auto v = [n_angular](int ring, int j) { return 1 + (ring - 1) * n_angular + (j % n_angular); };

    for (int j = 0; j < n_angular; ++j) mesh.triangles.push_back({0, v(1, j), v(1, j + 1)});
    for (int i = 1; i < n_rings; ++i) {
        for (int j = 0; j < n_angular; ++j) {
            mesh.triangles.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
            mesh.triangles.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
        }
    }

    std::vector<int> loop(n_angular);
    for (int j = 0; j < n_angular; ++j) loop[j] = v(n_rings, j);
    mesh.boundary_loops.push_back(std::move(loop));
    return mesh;
}

Mesh build_cylinder_mesh(double s0, int n_s, int n_angular) {
    if (!(s0 > 0.0) || !std::isfinite(s0)) throw InvalidArgument("build_cylinder_mesh: s0 must be positive");
    if (n_s < 1) throw InvalidArgument("build_cylinder_mesh: n_s must be >= 1");
    if (n_angular < 3) throw InvalidArgument("build_cylinder_mesh: n_angular must be >= 3");

    Mesh mesh;
    mesh.genus = 0;
    mesh.boundary_count = 2;
    mesh.period = 2.0 * std::numbers::pi;
    for (int i = 0; i <= n_s; ++i) {
        const double s = -s0 + 2.0 * s0 * i / n_s;
        for (int j = 0; j < n_angular; ++j) {
            mesh.vertices.push_back({s, 2.0 * std::numbers::pi * j / n_angular});
        }
    }
    // Pin the end rows exactly so boundary coordinates are +-s0 bit for bit.
    for (int j = 0; j < n_angular; ++j) {
        mesh.vertices[j][0] = -s0;
        mesh.vertices[static_cast<std::size_t>(n_s) * n_angular + j][0] = s0;
    }

    auto v = [n_angular](int i, int j) { return i * n_angular + (j % n_angular); };
    for (int i = 0; i < n_s; ++i) {
        for (int j = 0; j < n_angular; ++j) {
            mesh.triangles.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
            mesh.triangles.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
        }
    }

    std::vector<int> lower(n_angular), upper(n_angular);
    for (int j = 0; j < n_angular; ++j) {
        lower[j] = v(0, (n_angular - j) % n_angular);
        upper[j] = v(n_s, j);
    }
    mesh.boundary_loops.push_back(std::move(lower));
    mesh.boundary_loops.push_back(std::move(upper));
    return mesh;
}

Point2 edge_vector(const Mesh& mesh, int from, int to) {
    const auto& p = mesh.vertices[from];
    const auto& q = mesh.vertices[to];
    double dx = q[0] - p[0];
    double dy = q[1] - p[1];
    if (mesh.period > 0.0) {
        dy -= mesh.period * std::round(dy / mesh.period);
    }
    return {dx, dy};
}

double signed_area(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Point2 e1 = edge_vector(mesh, tri[0], tri[1]);
    const Point2 e2 = edge_vector(mesh, tri[0], tri[2]);
    return 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]);
}

int count_edges(const Mesh& mesh) { return static_cast<int>(edge_triangle_counts(mesh).size()); }

int euler_characteristic(const Mesh& mesh) {
    return mesh.num_vertices() - count_edges(mesh) + mesh.num_triangles();
}

std::vector<std::string> validate_mesh(const Mesh& mesh) {
    std::vector<std::string> issues;
    const int nv = mesh.num_vertices();

    bool indices_ok = true;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k : tri) {
            if (k < 0 || k >= nv) {
                issues.push_back("vertex index out of range at triangle " + std::to_string(t));
                indices_ok = false;
                break;
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            issues.push_back("repeated vertex at triangle " + std::to_string(t));
            indices_ok = false;
        }
    }
    for (std::size_t l = 0; l < mesh.boundary_loops.size(); ++l) {
        for (int k : mesh.boundary_loops[l]) {
            if (k < 0 || k >= nv) {
                issues.push_back("vertex index out of range in boundary loop " + std::to_string(l));
                indices_ok = false;
                break;
            }
        }
    }
    if (!indices_ok) return issues;

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = signed_area(mesh, t);
        if (area < 0.0) {
            issues.push_back("negative area at triangle " + std::to_string(t));
        } else if (area == 0.0) {
            issues.push_back("zero area at triangle " + std::to_string(t));
        }
    }

    const auto counts = edge_triangle_counts(mesh);
    std::set<Edge> boundary_edges;
    for (const auto& [edge, count] : counts) {
        if (count == 1) {
            boundary_edges.insert(edge);
        } else if (count > 2) {
            issues.push_back("edge-manifoldness: edge (" + std::to_string(edge.first) + "," +
                             std::to_string(edge.second) + ") belongs to " + std::to_string(count) +
                             " triangles");
        }
    }

    std::set<Edge> covered;
    for (std::size_t l = 0; l < mesh.boundary_loops.size(); ++l) {
        const auto& loop = mesh.boundary_loops[l];
        if (loop.size() < 3) {
            issues.push_back("boundary loop " + std::to_string(l) + " has fewer than 3 vertices");
            continue;
        }
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const Edge e = undirected(loop[k], loop[(k + 1) % loop.size()]);
            const auto it = counts.find(e);
            const int count = it == counts.end() ? 0 : it->second;
            if (count != 1) {
                issues.push_back("edge-manifoldness: loop edge (" + std::to_string(e.first) + "," +
                                 std::to_string(e.second) + ") belongs to " + std::to_string(count) +
                                 " triangles, expected 1");
            }
            if (!covered.insert(e).second) {
                issues.push_back("boundary edge (" + std::to_string(e.first) + "," +
                                 std::to_string(e.second) + ") appears in more than one loop position");
            }
        }
    }
    for (const auto& e : boundary_edges) {
        if (!covered.count(e)) {
            issues.push_back("boundary edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                             ") is not covered by any boundary loop");
        }
    }

    if (static_cast<int>(mesh.boundary_loops.size()) != mesh.boundary_count) {
        issues.push_back("boundary_count " + std::to_string(mesh.boundary_count) + " but " +
                         std::to_string(mesh.boundary_loops.size()) + " boundary loops");
    }
    if (mesh.genus < 0) issues.push_back("negative genus");
    const int chi = euler_characteristic(mesh);
    const int expected = 2 - 2 * mesh.genus - mesh.boundary_count;
    if (chi != expected) {
        issues.push_back("Euler characteristic " + std::to_string(chi) + " differs from 2-2g-l = " +
                         std::to_string(expected));
    }
    return issues;
}

std::vector<std::vector<int>> vertex_adjacency(const Mesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.vertices.size());
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            adj[t[k]].push_back(t[(k + 1) % 3]);
            adj[t[(k + 1) % 3]].push_back(t[k]);
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

std::vector<bool> boundary_flags(const Mesh& mesh) {
    std::vector<bool> flags(mesh.vertices.size(), false);
    for (const auto& loop : mesh.boundary_loops) {
        for (int k : loop) flags[k] = true;
    }
    return flags;
}

nlohmann::ordered_json mesh_to_json(const Mesh& mesh) {
    nlohmann::ordered_json j;
    j["vertices"] = mesh.vertices;
    j["triangles"] = mesh.triangles;
    j["boundary_loops"] = mesh.boundary_loops;
    j["genus"] = mesh.genus;
    j["boundary_count"] = mesh.boundary_count;
    if (mesh.period > 0.0) j["period"] = mesh.period;
    return j;
}

Mesh mesh_from_json(const nlohmann::json& j) {
    Mesh mesh;
    try {
        mesh.vertices = j.at("vertices").get<std::vector<Point2>>();
        mesh.triangles = j.at("triangles").get<std::vector<Triangle>>();
        mesh.boundary_loops = j.at("boundary_loops").get<std::vector<std::vector<int>>>();
        mesh.genus = j.at("genus").get<int>();
        mesh.boundary_count = j.at("boundary_count").get<int>();
        mesh.period = j.value("period", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("mesh JSON: ") + e.what());
    }
    return mesh;
}

}  // namespace capstek
