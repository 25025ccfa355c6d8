#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "capstek/errors.hpp"
#include "capstek/mesh.hpp"

using namespace capstek;

namespace {

bool contains(const std::vector<std::string>& issues, const std::string& needle) {
    return std::any_of(issues.begin(), issues.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(DiskMesh, SmallestDisk) {
    const Mesh m = build_disk_mesh(1, 3);
    EXPECT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(m.triangles.size(), 3u);
    EXPECT_EQ(euler_characteristic(m), 1);
    EXPECT_TRUE(validate_mesh(m).empty());
}

TEST(DiskMesh, TwoRings) {
    const Mesh m = build_disk_mesh(2, 4);
    EXPECT_EQ(m.vertices.size(), 9u);
    ASSERT_EQ(m.boundary_loops.size(), 1u);
    EXPECT_EQ(m.boundary_loops[0].size(), 4u);
    EXPECT_EQ(m.genus, 0);
    EXPECT_EQ(m.boundary_count, 1);
}

TEST(DiskMesh, FortyRingsPositiveAreas) {
    const Mesh m = build_disk_mesh(40, 80);
    EXPECT_EQ(m.vertices.size(), 3201u);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) ASSERT_GT(signed_area(m, t), 0.0) << t;
    EXPECT_TRUE(validate_mesh(m).empty());
}

TEST(DiskMesh, RingRadiiAndBoundaryOnCircle) {
    const Mesh m = build_disk_mesh(5, 12);
    for (int v : m.boundary_loops[0]) EXPECT_NEAR(std::hypot(m.vertices[v][0], m.vertices[v][1]), 1.0, 1e-15);
    EXPECT_NEAR(std::hypot(m.vertices[1][0], m.vertices[1][1]), 0.2, 1e-15);
}

TEST(DiskMesh, RejectsBadParameters) {
    EXPECT_THROW(build_disk_mesh(0, 3), InvalidArgument);
    EXPECT_THROW(build_disk_mesh(1, 2), InvalidArgument);
}

TEST(CylinderMesh, Smallest) {
    const Mesh m = build_cylinder_mesh(1.0, 1, 3);
    EXPECT_EQ(m.vertices.size(), 6u);
    EXPECT_EQ(m.triangles.size(), 6u);
    EXPECT_EQ(euler_characteristic(m), 0);
    EXPECT_TRUE(validate_mesh(m).empty());
}

TEST(CylinderMesh, TwoLoopsOfSixty) {
    const Mesh m = build_cylinder_mesh(1.110721, 30, 60);
    ASSERT_EQ(m.boundary_loops.size(), 2u);
    EXPECT_EQ(m.boundary_loops[0].size(), 60u);
    EXPECT_EQ(m.boundary_loops[1].size(), 60u);
    EXPECT_EQ(m.boundary_count, 2);
    EXPECT_TRUE(validate_mesh(m).empty());
}

TEST(CylinderMesh, UniformAxialGrid) {
    const Mesh m = build_cylinder_mesh(0.5, 2, 4);
    EXPECT_EQ(m.vertices.size(), 12u);
    for (const auto& v : m.vertices) {
        const bool on_grid = v[0] == -0.5 || v[0] == 0.0 || v[0] == 0.5;
        EXPECT_TRUE(on_grid) << v[0];
    }
}

TEST(CylinderMesh, RejectsBadParameters) {
    EXPECT_THROW(build_cylinder_mesh(0.0, 1, 3), InvalidArgument);
    EXPECT_THROW(build_cylinder_mesh(1.0, 0, 3), InvalidArgument);
    EXPECT_THROW(build_cylinder_mesh(1.0, 1, 2), InvalidArgument);
}

TEST(ValidateMesh, FlippedTriangle) {
    Mesh m = build_disk_mesh(2, 6);
    std::swap(m.triangles[4][1], m.triangles[4][2]);
    const auto issues = validate_mesh(m);
    EXPECT_TRUE(contains(issues, "negative area at triangle 4"));
}

TEST(ValidateMesh, DanglingBoundaryEdge) {
    Mesh m = build_disk_mesh(2, 6);
    m.triangles.pop_back();  // exposes two interior edges not listed in any loop
    const auto issues = validate_mesh(m);
    EXPECT_FALSE(issues.empty());
    EXPECT_TRUE(contains(issues, "edge-manifoldness") || contains(issues, "boundary edge")) << issues.front();
}

TEST(ValidateMesh, DuplicatedTriangleBreaksManifoldness) {
    Mesh m = build_disk_mesh(2, 6);
    m.triangles.push_back(m.triangles[3]);
    EXPECT_TRUE(contains(validate_mesh(m), "edge-manifoldness"));
}

TEST(ValidateMesh, WrongTopologyFields) {
    Mesh m = build_disk_mesh(2, 6);
    m.boundary_count = 2;
    EXPECT_FALSE(validate_mesh(m).empty());
}

TEST(MeshProperties, RefinementKeepsTopology) {
    for (int n : {1, 2, 3, 5}) {
        const Mesh a = build_disk_mesh(n, 3 * n + 3);
        const Mesh b = build_disk_mesh(2 * n, 2 * (3 * n + 3));
        EXPECT_EQ(a.genus, b.genus);
        EXPECT_EQ(a.boundary_count, b.boundary_count);
        EXPECT_EQ(euler_characteristic(a), euler_characteristic(b));
        const Mesh c = build_cylinder_mesh(0.7, n, 3 * n + 3);
        const Mesh d = build_cylinder_mesh(0.7, 2 * n, 2 * (3 * n + 3));
        EXPECT_EQ(c.boundary_count, d.boundary_count);
        EXPECT_EQ(euler_characteristic(c), euler_characteristic(d));
        EXPECT_TRUE(validate_mesh(d).empty());
    }
}

TEST(MeshProperties, LoopsPartitionBoundaryVertices) {
    const Mesh m = build_cylinder_mesh(0.9, 4, 7);
    const auto flags = boundary_flags(m);
    std::set<int> in_loops;
    for (const auto& loop : m.boundary_loops)
        for (int v : loop) EXPECT_TRUE(in_loops.insert(v).second);
    int flagged = 0;
    for (std::size_t v = 0; v < flags.size(); ++v) {
        flagged += flags[v];
        EXPECT_EQ(flags[v], in_loops.count(static_cast<int>(v)) == 1);
    }
    EXPECT_EQ(flagged, 14);
}

TEST(MeshProperties, EdgeCountMatchesEuler) {
    const Mesh m = build_disk_mesh(3, 9);
    EXPECT_EQ(static_cast<int>(m.vertices.size()) - count_edges(m) + static_cast<int>(m.triangles.size()), 1);
}

TEST(MeshJson, RoundTrip) {
    const Mesh m = build_cylinder_mesh(0.5, 2, 5);
    const Mesh back = mesh_from_json(nlohmann::json::parse(mesh_to_json(m).dump()));
    EXPECT_EQ(back.vertices, m.vertices);
    EXPECT_EQ(back.triangles, m.triangles);
    EXPECT_EQ(back.boundary_loops, m.boundary_loops);
    EXPECT_EQ(back.boundary_count, 2);
    EXPECT_TRUE(validate_mesh(back).empty());
}

TEST(MeshJson, KeyOrder) {
    const auto j = mesh_to_json(build_disk_mesh(1, 3));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    ASSERT_GE(keys.size(), 5u);
    EXPECT_EQ(keys[0], "vertices");
    EXPECT_EQ(keys[1], "triangles");
    EXPECT_EQ(keys[2], "boundary_loops");
    EXPECT_EQ(keys[3], "genus");
    EXPECT_EQ(keys[4], "boundary_count");
}

TEST(MeshJson, MalformedInputThrows) {
    EXPECT_THROW(mesh_from_json(nlohmann::json::parse(R"({"vertices": 3})")), InvalidArgument);
}
