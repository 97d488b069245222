#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vfnav/environment.hpp"
#include "vfnav/errors.hpp"
#include "vfnav/geometry.hpp"

namespace vfnav {

// Smallest admissible triangle area. Anything thinner indicates degenerate
// input geometry rather than a legitimate cell.
inline constexpr double kAreaEpsilon = 1e-12;

// Triangulation of the free space. Triangles are counterclockwise;
// neighbors[t][k] is the triangle across edge k (from vertex k to vertex
// k + 1 mod 3), or -1 on the free-space boundary. constrained[t][k] marks
// edges that lie on the workspace or an obstacle boundary; those edges are
// never crossable. Triangles are stored in canonical order (lowest vertex
// index first, then lexicographic), so equal inputs produce identical meshes.
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 3>> neighbors;
    std::vector<std::array<bool, 3>> constrained;

    std::vector<Vec2> centroids;
    std::vector<double> inradii;
    std::vector<double> areas;

    int triangle_count() const { return static_cast<int>(triangles.size()); }

    Vec2 point(int t, int k) const { return vertices[triangles[t][k]]; }
};

inline Vec2 triangle_centroid(const TriMesh& m, int t) {
    return (m.point(t, 0) + m.point(t, 1) + m.point(t, 2)) / 3.0;
}

inline double triangle_area_of(const TriMesh& m, int t) {
    return triangle_area(m.point(t, 0), m.point(t, 1), m.point(t, 2));
}

inline double triangle_inradius(const TriMesh& m, int t) {
    double a = distance(m.point(t, 1), m.point(t, 2));
    double b = distance(m.point(t, 2), m.point(t, 0));
    double c = distance(m.point(t, 0), m.point(t, 1));
    double s = 0.5 * (a + b + c);
    return s > 0.0 ? triangle_area_of(m, t) / s : 0.0;
}

// Unique undirected constrained edges as (low index, high index) pairs.
inline std::vector<std::pair<int, int>> constrained_edges(const TriMesh& m) {
    std::set<std::pair<int, int>> out;
    for (int t = 0; t < m.triangle_count(); ++t) {
        for (int k = 0; k < 3; ++k) {
            if (!m.constrained[t][k]) continue;
            int u = m.triangles[t][k];
            int w = m.triangles[t][(k + 1) % 3];
            out.insert({std::min(u, w), std::max(u, w)});
        }
    }
    return {out.begin(), out.end()};
}

namespace detail {

using EdgeKey = std::pair<int, int>;

inline EdgeKey edge_key(int u, int w) {
    return {std::min(u, w), std::max(u, w)};
}

struct EdgeUse {
    int tri = -1;
    int edge = -1;
};

// Undirected edge -> the (at most two) triangle edges that use it.
inline std::map<EdgeKey, std::vector<EdgeUse>> build_edge_map(
    const std::vector<std::array<int, 3>>& tris) {
    std::map<EdgeKey, std::vector<EdgeUse>> map;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        for (int k = 0; k < 3; ++k) {
            map[edge_key(tris[t][k], tris[t][(k + 1) % 3])].push_back(
                {t, k});
        }
    }
    return map;
}

struct Triangulator {
    std::vector<Vec2> points;
    std::vector<std::array<int, 3>> tris;
    std::set<EdgeKey> constraints;

    int edge_in(int t, int u, int w) const {
        for (int k = 0; k < 3; ++k) {
            int a = tris[t][k];
            int b = tris[t][(k + 1) % 3];
            if ((a == u && b == w) || (a == w && b == u)) return k;
        }
        return -1;
    }

    bool contains_strict_circum(int t, Vec2 p) const {
        return in_circumcircle(points[tris[t][0]], points[tris[t][1]],
                               points[tris[t][2]], p);
    }

    void insert_point(int pi) {
        Vec2 p = points[pi];
        std::vector<char> bad(tris.size(), 0);
        bool any = false;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (contains_strict_circum(static_cast<int>(t), p)) {
                bad[t] = 1;
                any = true;
            }
        }
        if (!any) {
            throw TriangulationFailure(
                "point insertion found no containing circumcircle");
        }

        auto map = build_edge_map(tris);
        std::vector<std::array<int, 3>> next;
        next.reserve(tris.size() + 2);
        std::vector<std::array<int, 3>> fresh;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!bad[t]) {
                next.push_back(tris[t]);
                continue;
            }
            for (int k = 0; k < 3; ++k) {
                int u = tris[t][k];
                int w = tris[t][(k + 1) % 3];
                bool boundary = true;
                for (const EdgeUse& use : map[edge_key(u, w)]) {
                    if (use.tri != static_cast<int>(t) && bad[use.tri]) {
                        boundary = false;
                    }
                }
                if (boundary) fresh.push_back({u, w, pi});
            }
        }
        for (const auto& tri : fresh) {
            if (orient_sign(points[tri[0]], points[tri[1]],
                            points[tri[2]]) <= 0) {
                throw TriangulationFailure(
                    "cavity retriangulation produced a degenerate triangle");
            }
            next.push_back(tri);
        }
        tris = std::move(next);
    }

    // Replaces triangles t1 = (a, b, c) and t2 = (b, a, d) sharing edge
    // (a, b) with (a, d, c) and (d, b, c). Returns false when the quad is
    // not strictly convex and the flip would invert a triangle.
    bool flip(int t1, int k1, int t2) {
        int a = tris[t1][k1];
        int b = tris[t1][(k1 + 1) % 3];
        int c = tris[t1][(k1 + 2) % 3];
        int k2 = edge_in(t2, a, b);
        int d = tris[t2][(k2 + 2) % 3];
        if (orient_sign(points[a], points[d], points[c]) <= 0) return false;
        if (orient_sign(points[d], points[b], points[c]) <= 0) return false;
        tris[t1] = {a, d, c};
        tris[t2] = {d, b, c};
        return true;
    }

    void recover_segment(int u, int w) {
        const int cap = 100000;
        for (int iter = 0; iter < cap; ++iter) {
            auto map = build_edge_map(tris);
            if (map.count(edge_key(u, w))) {
                constraints.insert(edge_key(u, w));
                return;
            }
            bool flipped = false;
            bool crossing_found = false;
            std::set<EdgeKey> seen;
            for (std::size_t t = 0; t < tris.size() && !flipped; ++t) {
                for (int k = 0; k < 3 && !flipped; ++k) {
                    int p = tris[t][k];
                    int q = tris[t][(k + 1) % 3];
                    EdgeKey key = edge_key(p, q);
                    if (!seen.insert(key).second) continue;
                    if (!segments_cross_properly(points[u], points[w],
                                                 points[p], points[q])) {
                        continue;
                    }
                    crossing_found = true;
                    if (constraints.count(key)) {
                        throw TriangulationFailure(
                            "boundary segments cross each other");
                    }
                    const auto& uses = map[key];
                    if (uses.size() != 2) {
                        throw TriangulationFailure(
                            "crossing edge is not interior");
                    }
                    int other = uses[0].tri == static_cast<int>(t)
                                    ? uses[1].tri
                                    : uses[0].tri;
                    flipped = flip(static_cast<int>(t), k, other);
                }
            }
            if (!crossing_found) {
                throw TriangulationFailure(
                    "boundary segment missing and nothing crosses it");
            }
            if (!flipped) {
                throw TriangulationFailure(
                    "boundary segment blocked by unflippable edges");
            }
        }
        throw TriangulationFailure("segment recovery did not terminate");
    }

    // Lawson flips toward the constrained Delaunay optimum. Constrained
    // edges are never flipped.
    void legalize() {
        const int cap = 1000000;
        for (int iter = 0; iter < cap; ++iter) {
            auto map = build_edge_map(tris);
            bool flipped = false;
            for (const auto& [key, uses] : map) {
                if (uses.size() != 2) continue;
                if (constraints.count(key)) continue;
                int t1 = uses[0].tri, k1 = uses[0].edge;
                int t2 = uses[1].tri;
                int d = tris[t2][(uses[1].edge + 2) % 3];
                if (contains_strict_circum(t1, points[d])) {
                    if (flip(t1, k1, t2)) {
                        flipped = true;
                        break;
                    }
                }
            }
            if (!flipped) return;
        }
        throw TriangulationFailure("Delaunay legalization did not terminate");
    }
};

inline bool centroid_strictly_free(const Environment& env, Vec2 c) {
    if (locate_in_polygon(env.workspace, c) != PolygonLocation::Inside) {
        return false;
    }
    for (const auto& obs : env.obstacles) {
        if (locate_in_polygon(obs, c) != PolygonLocation::Outside) {
            return false;
        }
    }
    return true;
}

} // namespace detail

// Rebuilds neighbor links and constrained-edge flags from the triangle soup
// and an undirected constrained-edge list. Throws MeshInvalid when an edge is
// shared by more than two triangles or a boundary edge is unconstrained.
inline void build_adjacency(TriMesh& m,
                            const std::vector<std::pair<int, int>>& edges) {
    std::set<detail::EdgeKey> constraint_set;
    for (auto [u, w] : edges) {
        constraint_set.insert(detail::edge_key(u, w));
    }
    auto map = detail::build_edge_map(m.triangles);
    int n = m.triangle_count();
    m.neighbors.assign(n, {-1, -1, -1});
    m.constrained.assign(n, {false, false, false});
    for (const auto& [key, uses] : map) {
        if (uses.size() > 2) {
            throw MeshInvalid("edge shared by more than two triangles");
        }
        bool is_constrained = constraint_set.count(key) > 0;
        if (uses.size() == 1 && !is_constrained) {
            throw MeshInvalid("boundary edge is not a constrained edge");
        }
        for (const auto& use : uses) {
            m.constrained[use.tri][use.edge] = is_constrained;
            if (uses.size() == 2 && !is_constrained) {
                const auto& other =
                    uses[use.tri == uses[0].tri && use.edge == uses[0].edge
                             ? 1
                             : 0];
                m.neighbors[use.tri][use.edge] = other.tri;
            }
        }
    }
}

// Canonical storage order: rotate each triangle so its smallest vertex index
// comes first, then sort triangles lexicographically.
inline void canonicalize(TriMesh& m) {
    for (auto& tri : m.triangles) {
        int k = static_cast<int>(
            std::min_element(tri.begin(), tri.end()) - tri.begin());
        std::rotate(tri.begin(), tri.begin() + k, tri.end());
    }
    std::sort(m.triangles.begin(), m.triangles.end());
}

inline void compute_derived(TriMesh& m) {
    int n = m.triangle_count();
    m.centroids.resize(n);
    m.inradii.resize(n);
    m.areas.resize(n);
    for (int t = 0; t < n; ++t) {
        m.centroids[t] = triangle_centroid(m, t);
        m.inradii[t] = triangle_inradius(m, t);
        m.areas[t] = triangle_area_of(m, t);
    }
}

// Structural invariant check for meshes from untrusted sources. Throws
// MeshInvalid on the first violation.
inline void check_mesh(const TriMesh& m) {
    int nv = static_cast<int>(m.vertices.size());
    int nt = m.triangle_count();
    if (static_cast<int>(m.neighbors.size()) != nt ||
        static_cast<int>(m.constrained.size()) != nt) {
        throw MeshInvalid("adjacency arrays do not match triangle count");
    }
    for (int t = 0; t < nt; ++t) {
        const auto& tri = m.triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= nv) {
                throw MeshInvalid("triangle vertex index out of range");
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            throw MeshInvalid("triangle repeats a vertex");
        }
        if (orient_sign(m.vertices[tri[0]], m.vertices[tri[1]],
                        m.vertices[tri[2]]) <= 0) {
            throw MeshInvalid("triangle is not counterclockwise");
        }
        if (triangle_area_of(m, t) < kAreaEpsilon) {
            throw MeshInvalid("triangle area below epsilon");
        }
        for (int k = 0; k < 3; ++k) {
            int nb = m.neighbors[t][k];
            if (nb < 0) continue;
            if (nb >= nt) throw MeshInvalid("neighbor index out of range");
            int u = tri[k], w = tri[(k + 1) % 3];
            bool back = false;
            for (int j = 0; j < 3; ++j) {
                if (m.triangles[nb][j] == w &&
                    m.triangles[nb][(j + 1) % 3] == u) {
                    back = m.neighbors[nb][j] == t;
                }
            }
            if (!back) throw MeshInvalid("neighbor link is not symmetric");
        }
    }
    std::set<std::array<int, 3>> unique(m.triangles.begin(),
                                        m.triangles.end());
    if (static_cast<int>(unique.size()) != nt) {
        throw MeshInvalid("duplicate triangle");
    }
}

// Constrained Delaunay triangulation of the free space. Vertices are exactly
// the workspace and obstacle vertices (no points are added); every polygon
// edge becomes a constrained mesh edge; triangles overlapping obstacle
// interiors or workspace concavities are discarded.
inline TriMesh triangulate(const Environment& input) {
    Environment env = input;
    normalize_orientation(env);
    ValidationReport report = validate(env);
    if (!report.ok()) {
        throw DegenerateInput("environment invalid: " + report.to_string());
    }

    detail::Triangulator tr;
    std::vector<std::pair<int, int>> segments;
    auto add_polygon = [&](const std::vector<Vec2>& poly) {
        int base = static_cast<int>(tr.points.size());
        int n = static_cast<int>(poly.size());
        for (Vec2 p : poly) tr.points.push_back(p);
        for (int i = 0; i < n; ++i) {
            segments.push_back({base + i, base + (i + 1) % n});
        }
    };
    add_polygon(env.workspace);
    for (const auto& obs : env.obstacles) add_polygon(obs);

    int n_real = static_cast<int>(tr.points.size());
    for (int i = 0; i < n_real; ++i) {
        for (int j = i + 1; j < n_real; ++j) {
            if (distance(tr.points[i], tr.points[j]) <= 1e-12) {
                throw DegenerateInput("boundary vertices coincide");
            }
        }
    }

    BoundingBox box = bounding_box(env);
    Vec2 mid = 0.5 * (box.min + box.max);
    double span = std::max(box.max.x - box.min.x, box.max.y - box.min.y);
    double big = 1e6 * std::max(span, 1.0);
    tr.points.push_back(mid + Vec2{-big, -big});
    tr.points.push_back(mid + Vec2{big, -big});
    tr.points.push_back(mid + Vec2{0.0, big});
    tr.tris.push_back({n_real, n_real + 1, n_real + 2});

    for (int i = 0; i < n_real; ++i) tr.insert_point(i);

    for (auto [a, b] : segments) {
        // Vertices of other polygons may sit exactly on this segment; each
        // collinear stretch between consecutive on-segment vertices is
        // recovered as its own constrained edge.
        std::vector<int> chain{a};
        for (int v = 0; v < n_real; ++v) {
            if (v == a || v == b) continue;
            if (on_segment(tr.points[v], tr.points[a], tr.points[b])) {
                chain.push_back(v);
            }
        }
        chain.push_back(b);
        Vec2 dir = tr.points[b] - tr.points[a];
        std::sort(chain.begin() + 1, chain.end() - 1, [&](int u, int w) {
            return dot(tr.points[u] - tr.points[a], dir) <
                   dot(tr.points[w] - tr.points[a], dir);
        });
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            tr.recover_segment(chain[i], chain[i + 1]);
        }
    }

    std::erase_if(tr.tris, [&](const std::array<int, 3>& tri) {
        return tri[0] >= n_real || tri[1] >= n_real || tri[2] >= n_real;
    });
    tr.points.resize(n_real);
    tr.legalize();

    // Keep the triangles covering free space: flood fill from a free seed,
    // stopping at constrained edges.
    auto map = detail::build_edge_map(tr.tris);
    int seed = -1;
    for (int t = 0; t < static_cast<int>(tr.tris.size()); ++t) {
        Vec2 c = (tr.points[tr.tris[t][0]] + tr.points[tr.tris[t][1]] +
                  tr.points[tr.tris[t][2]]) /
                 3.0;
        if (detail::centroid_strictly_free(env, c)) {
            seed = t;
            break;
        }
    }
    if (seed < 0) {
        throw TriangulationFailure("no triangle covers free space");
    }
    std::vector<char> keep(tr.tris.size(), 0);
    std::vector<int> stack{seed};
    keep[seed] = 1;
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        for (int k = 0; k < 3; ++k) {
            detail::EdgeKey key = detail::edge_key(tr.tris[t][k],
                                                   tr.tris[t][(k + 1) % 3]);
            if (tr.constraints.count(key)) continue;
            for (const auto& use : map[key]) {
                if (!keep[use.tri]) {
                    keep[use.tri] = 1;
                    stack.push_back(use.tri);
                }
            }
        }
    }

    TriMesh mesh;
    mesh.vertices = tr.points;
    for (int t = 0; t < static_cast<int>(tr.tris.size()); ++t) {
        if (keep[t]) mesh.triangles.push_back(tr.tris[t]);
    }
    for (const auto& tri : mesh.triangles) {
        if (triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                          mesh.vertices[tri[2]]) < kAreaEpsilon) {
            throw DegenerateInput("free-space triangle thinner than epsilon");
        }
    }
    canonicalize(mesh);
    build_adjacency(mesh, {tr.constraints.begin(), tr.constraints.end()});
    compute_derived(mesh);
    check_mesh(mesh);
    return mesh;
}

// True when p lies in triangle t (boundary included).
inline bool triangle_contains(const TriMesh& m, int t, Vec2 p) {
    return orient_sign(m.point(t, 0), m.point(t, 1), p) >= 0 &&
           orient_sign(m.point(t, 1), m.point(t, 2), p) >= 0 &&
           orient_sign(m.point(t, 2), m.point(t, 0), p) >= 0;
}

namespace detail {

inline int locate_scan(const TriMesh& m, Vec2 p) {
    for (int t = 0; t < m.triangle_count(); ++t) {
        if (triangle_contains(m, t, p)) return t;
    }
    return -1;
}

} // namespace detail

// Triangle containing p, or -1 when p is outside the mesh. Points on a shared
// edge or vertex resolve to the lowest-index containing triangle. A hint
// triangle turns the query into a local walk.
inline int locate(const TriMesh& m, Vec2 p, int hint = -1) {
    if (hint < 0 || hint >= m.triangle_count()) {
        return detail::locate_scan(m, p);
    }
    int cur = hint;
    for (int step = 0; step < 2 * m.triangle_count() + 4; ++step) {
        int exit_edge = -1;
        int zero_edges = 0;
        int zero_edge = -1;
        for (int k = 0; k < 3; ++k) {
            int o = orient_sign(m.point(cur, k), m.point(cur, (k + 1) % 3), p);
            if (o < 0) {
                exit_edge = k;
                break;
            }
            if (o == 0) {
                ++zero_edges;
                zero_edge = k;
            }
        }
        if (exit_edge < 0) {
            if (zero_edges == 0) return cur;
            if (zero_edges >= 2) return detail::locate_scan(m, p);
            int nb = m.neighbors[cur][zero_edge];
            return nb >= 0 ? std::min(cur, nb) : cur;
        }
        int nb = m.neighbors[cur][exit_edge];
        if (nb < 0) return detail::locate_scan(m, p);
        cur = nb;
    }
    return detail::locate_scan(m, p);
}

} // namespace vfnav
