#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "vfnav/mesh.hpp"
#include "vfnav/simulator.hpp"

#include "support.hpp"

using namespace vfnav;

namespace {

Environment square_env() {
    Environment env;
    env.workspace = {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}, {0.0, 10.0}};
    env.goal = {8.0, 8.0};
    return env;
}

Environment annulus_env() {
    Environment env = square_env();
    env.obstacles.push_back(
        {{4.0, 4.0}, {6.0, 4.0}, {6.0, 6.0}, {4.0, 6.0}});
    return env;
}

double mesh_area(const TriMesh& m) {
    double a = 0.0;
    for (int t = 0; t < m.triangle_count(); ++t) a += m.areas[t];
    return a;
}

// The triangulation introduces no Steiner points, so mesh vertices are the
// environment polygon vertices in declaration order.
std::vector<Vec2> env_vertices(const Environment& env) {
    std::vector<Vec2> out = env.workspace;
    for (const auto& obs : env.obstacles) {
        out.insert(out.end(), obs.begin(), obs.end());
    }
    return out;
}

void check_unconstrained_edges_delaunay(const TriMesh& m) {
    for (int t = 0; t < m.triangle_count(); ++t) {
        for (int k = 0; k < 3; ++k) {
            if (m.constrained[t][k]) continue;
            int nb = m.neighbors[t][k];
            REQUIRE(nb >= 0);
            int u = m.triangles[t][k];
            int w = m.triangles[t][(k + 1) % 3];
            int opposite = -1;
            for (int j = 0; j < 3; ++j) {
                int a = m.triangles[nb][j];
                if (a != u && a != w) opposite = a;
            }
            REQUIRE(opposite >= 0);
            CHECK_FALSE(in_circumcircle(m.point(t, 0), m.point(t, 1),
                                        m.point(t, 2),
                                        m.vertices[opposite]));
        }
    }
}

} // namespace

TEST_CASE("square splits into two triangles", "[mesh]") {
    Environment env = square_env();
    TriMesh m = triangulate(env);

    REQUIRE(m.triangle_count() == 2);
    CHECK(m.vertices.size() == 4);
    CHECK(mesh_area(m) == Catch::Approx(100.0));

    auto edges = constrained_edges(m);
    std::set<std::pair<int, int>> expected{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
    CHECK(std::set<std::pair<int, int>>(edges.begin(), edges.end()) ==
          expected);

    int shared = 0;
    for (int t = 0; t < 2; ++t) {
        for (int k = 0; k < 3; ++k) {
            if (m.neighbors[t][k] >= 0) {
                ++shared;
                CHECK_FALSE(m.constrained[t][k]);
                CHECK(m.neighbors[t][k] == 1 - t);
            }
        }
    }
    CHECK(shared == 2);
}

TEST_CASE("square with a square hole meshes as an annulus", "[mesh]") {
    Environment env = annulus_env();
    TriMesh m = triangulate(env);

    CHECK(m.triangle_count() == 8);
    CHECK(m.vertices.size() == 8);
    CHECK(mesh_area(m) == Catch::Approx(100.0 - 4.0));
    CHECK(constrained_edges(m).size() == 8);

    auto expected = env_vertices(env);
    REQUIRE(m.vertices.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(m.vertices[i].x == expected[i].x);
        CHECK(m.vertices[i].y == expected[i].y);
    }

    for (int t = 0; t < m.triangle_count(); ++t) {
        Vec2 c = m.centroids[t];
        CHECK(locate_in_polygon(env.obstacles[0], c) ==
              PolygonLocation::Outside);
    }
}

TEST_CASE("concave workspace is covered without crossing the notch",
          "[mesh]") {
    Environment env;
    env.workspace = {{0.0, 0.0}, {4.0, 0.0}, {4.0, 2.0},
                     {2.0, 2.0}, {2.0, 4.0}, {0.0, 4.0}};
    env.goal = {1.0, 1.0};
    TriMesh m = triangulate(env);

    CHECK(m.triangle_count() == 4);
    CHECK(mesh_area(m) == Catch::Approx(12.0));
    for (int t = 0; t < m.triangle_count(); ++t) {
        CHECK(is_free(env, m.centroids[t]));
    }
    CHECK(locate(m, {3.0, 3.0}) == -1);
    CHECK(locate(m, {1.0, 1.0}) >= 0);
}

TEST_CASE("meshes of generated environments cover the free area exactly",
          "[mesh]") {
    Rng rng(42);
    for (int trial = 0; trial < 6; ++trial) {
        Environment env = trial % 2 == 0
                              ? testsup::random_grid_env(rng)
                              : testsup::convex_polygon_env(rng, 5 + trial);
        TriMesh m = triangulate(env);
        REQUIRE(m.triangle_count() > 0);
        CHECK(mesh_area(m) ==
              Catch::Approx(free_area(env)).epsilon(1e-9));

        std::size_t expected_edges = env.workspace.size();
        for (const auto& obs : env.obstacles) expected_edges += obs.size();
        CHECK(constrained_edges(m).size() == expected_edges);
    }
}

TEST_CASE("unconstrained interior edges satisfy the empty-circumcircle rule",
          "[mesh]") {
    Rng rng(7);
    check_unconstrained_edges_delaunay(triangulate(annulus_env()));
    check_unconstrained_edges_delaunay(
        triangulate(testsup::random_grid_env(rng)));
    check_unconstrained_edges_delaunay(
        triangulate(testsup::convex_polygon_env(rng, 8)));
}

TEST_CASE("triangulation output is canonical and deterministic", "[mesh]") {
    Rng rng(99);
    Environment env = testsup::random_grid_env(rng);
    TriMesh a = triangulate(env);
    TriMesh b = triangulate(env);

    CHECK(a.triangles == b.triangles);
    CHECK(a.neighbors == b.neighbors);
    CHECK(a.constrained == b.constrained);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        CHECK(a.vertices[i].x == b.vertices[i].x);
        CHECK(a.vertices[i].y == b.vertices[i].y);
    }

    for (const auto& tri : a.triangles) {
        CHECK(tri[0] < tri[1]);
        CHECK(tri[0] < tri[2]);
    }
    CHECK(std::is_sorted(a.triangles.begin(), a.triangles.end()));
}

TEST_CASE("adjacency links are symmetric and boundary edges constrained",
          "[mesh]") {
    Rng rng(5);
    TriMesh m = triangulate(testsup::random_grid_env(rng));
    for (int t = 0; t < m.triangle_count(); ++t) {
        for (int k = 0; k < 3; ++k) {
            int nb = m.neighbors[t][k];
            if (nb < 0) {
                CHECK(m.constrained[t][k]);
                continue;
            }
            CHECK_FALSE(m.constrained[t][k]);
            bool back = false;
            for (int j = 0; j < 3; ++j) {
                if (m.neighbors[nb][j] == t) back = true;
            }
            CHECK(back);
        }
    }
}

TEST_CASE("derived quantities match their formulas", "[mesh]") {
    TriMesh m;
    m.vertices = {{0.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}};
    m.triangles = {{0, 1, 2}};
    build_adjacency(m, {{0, 1}, {1, 2}, {0, 2}});
    compute_derived(m);
    check_mesh(m);

    CHECK(m.areas[0] == Catch::Approx(6.0));
    CHECK(m.centroids[0].x == Catch::Approx(1.0));
    CHECK(m.centroids[0].y == Catch::Approx(4.0 / 3.0));
    CHECK(m.inradii[0] == Catch::Approx(1.0));
}

TEST_CASE("invalid environments are rejected before meshing", "[mesh]") {
    Environment env = square_env();
    env.goal = {20.0, 20.0};
    CHECK_THROWS_AS(triangulate(env), DegenerateInput);

    Environment bowtie;
    bowtie.workspace = {{0.0, 0.0}, {2.0, 2.0}, {2.0, 0.0}, {0.0, 2.0}};
    bowtie.goal = {1.0, 0.5};
    CHECK_THROWS_AS(triangulate(bowtie), DegenerateInput);
}

TEST_CASE("structural checks reject malformed meshes", "[mesh]") {
    TriMesh good;
    good.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    good.triangles = {{0, 1, 2}, {0, 2, 3}};
    build_adjacency(good, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    compute_derived(good);
    check_mesh(good);

    SECTION("vertex index out of range") {
        TriMesh m = good;
        m.triangles[0][1] = 9;
        CHECK_THROWS_AS(check_mesh(m), MeshInvalid);
    }
    SECTION("repeated vertex") {
        TriMesh m = good;
        m.triangles[0] = {0, 0, 2};
        CHECK_THROWS_AS(check_mesh(m), MeshInvalid);
    }
    SECTION("clockwise triangle") {
        TriMesh m = good;
        std::swap(m.triangles[0][1], m.triangles[0][2]);
        CHECK_THROWS_AS(check_mesh(m), MeshInvalid);
    }
    SECTION("asymmetric neighbor link") {
        TriMesh m = good;
        for (int k = 0; k < 3; ++k) {
            if (m.neighbors[1][k] == 0) m.neighbors[1][k] = -1;
        }
        CHECK_THROWS_AS(check_mesh(m), MeshInvalid);
    }
    SECTION("duplicate triangle") {
        TriMesh m = good;
        m.triangles.push_back(m.triangles[0]);
        m.neighbors.push_back(m.neighbors[0]);
        m.constrained.push_back(m.constrained[0]);
        compute_derived(m);
        CHECK_THROWS_AS(check_mesh(m), MeshInvalid);
    }
    SECTION("unconstrained boundary edge") {
        TriMesh m = good;
        CHECK_THROWS_AS(build_adjacency(m, {{0, 1}, {1, 2}, {2, 3}}),
                        MeshInvalid);
    }
    SECTION("edge shared three times") {
        TriMesh m = good;
        m.triangles.push_back({0, 2, 1});
        CHECK_THROWS_AS(
            build_adjacency(m, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}),
            MeshInvalid);
    }
}

TEST_CASE("point location agrees between walk and scan", "[mesh]") {
    Rng rng(11);
    Environment env = testsup::random_grid_env(rng);
    TriMesh m = triangulate(env);
    BoundingBox bb = bounding_box(env);

    for (int t = 0; t < m.triangle_count(); ++t) {
        CHECK(locate(m, m.centroids[t]) == t);
        int hint = static_cast<int>(rng.uniform(0, m.triangle_count()));
        CHECK(locate(m, m.centroids[t], hint) == t);
    }

    for (int i = 0; i < 500; ++i) {
        Vec2 p{rng.uniform(bb.min.x - 1.0, bb.max.x + 1.0),
               rng.uniform(bb.min.y - 1.0, bb.max.y + 1.0)};
        int scan = locate(m, p);
        int hint = static_cast<int>(rng.uniform(0, m.triangle_count()));
        CHECK(locate(m, p, hint) == scan);
        double sc = signed_clearance(env, p);
        if (sc > 1e-9) {
            REQUIRE(scan >= 0);
            CHECK(triangle_contains(m, scan, p));
        } else if (sc < -1e-9) {
            CHECK(scan == -1);
        }
    }
}

TEST_CASE("points on shared edges resolve to the lowest triangle index",
          "[mesh]") {
    TriMesh m = triangulate(square_env());
    REQUIRE(m.triangle_count() == 2);

    int shared_edge = -1;
    for (int k = 0; k < 3; ++k) {
        if (m.neighbors[0][k] >= 0) shared_edge = k;
    }
    REQUIRE(shared_edge >= 0);
    Vec2 mid = 0.5 * (m.point(0, shared_edge) +
                      m.point(0, (shared_edge + 1) % 3));

    CHECK(locate(m, mid) == 0);
    CHECK(locate(m, mid, 0) == 0);
    CHECK(locate(m, mid, 1) == 0);

    CHECK(locate(m, m.vertices[0]) == 0);
    CHECK(locate(m, m.vertices[0], 1) == 0);
}
