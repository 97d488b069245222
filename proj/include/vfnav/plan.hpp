#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "vfnav/errors.hpp"
#include "vfnav/mesh.hpp"

namespace vfnav {

// Per-triangle routing toward the goal triangle: shortest paths on the dual
// graph (nodes are triangles, edges join triangles sharing an unconstrained
// edge, weights are centroid distances). Each covered triangle gets a
// successor and an exit face; the goal triangle and unreachable triangles
// have successor -1.
struct RoutePlan {
    Vec2 goal;
    int goal_triangle = -1;
    std::vector<int> successor;
    std::vector<int> exit_edge;    // local edge index toward the successor
    std::vector<double> cost;      // dual-graph distance to the goal triangle
    std::vector<int> unreachable;  // ascending triangle ids with no path

    bool covered(int t) const {
        return t == goal_triangle || successor[t] >= 0;
    }
};

inline RoutePlan make_plan(const TriMesh& m, Vec2 goal) {
    RoutePlan plan;
    plan.goal = goal;
    plan.goal_triangle = locate(m, goal);
    if (plan.goal_triangle < 0) {
        throw GoalOutsideMesh("goal lies outside the triangulated free space");
    }

    int n = m.triangle_count();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    plan.successor.assign(n, -1);
    plan.exit_edge.assign(n, -1);
    plan.cost.assign(n, kInf);
    plan.cost[plan.goal_triangle] = 0.0;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    queue.push({0.0, plan.goal_triangle});
    while (!queue.empty()) {
        auto [d, t] = queue.top();
        queue.pop();
        if (d > plan.cost[t]) continue;
        for (int k = 0; k < 3; ++k) {
            int nb = m.neighbors[t][k];
            if (nb < 0) continue;
            double nd = d + distance(m.centroids[t], m.centroids[nb]);
            if (nd < plan.cost[nb]) {
                plan.cost[nb] = nd;
                queue.push({nd, nb});
            }
        }
    }

    // Successor selection is a separate pass so that cost ties resolve to the
    // lowest-index neighbor regardless of queue pop order.
    for (int t = 0; t < n; ++t) {
        if (t == plan.goal_triangle || plan.cost[t] == kInf) {
            if (t != plan.goal_triangle) plan.unreachable.push_back(t);
            continue;
        }
        int best = -1, best_edge = -1;
        double best_cost = kInf;
        for (int k = 0; k < 3; ++k) {
            int nb = m.neighbors[t][k];
            if (nb < 0 || plan.cost[nb] == kInf) continue;
            double through =
                plan.cost[nb] + distance(m.centroids[t], m.centroids[nb]);
            if (through < best_cost ||
                (through == best_cost && nb < best)) {
                best_cost = through;
                best = nb;
                best_edge = k;
            }
        }
        plan.successor[t] = best;
        plan.exit_edge[t] = best_edge;
    }
    return plan;
}

// Endpoints of the exit face of triangle t, ordered (lower vertex index,
// higher vertex index).
inline std::array<int, 2> exit_face_vertices(const TriMesh& m,
                                             const RoutePlan& plan, int t) {
    int k = plan.exit_edge[t];
    if (k < 0) return {-1, -1};
    int a = m.triangles[t][k];
    int b = m.triangles[t][(k + 1) % 3];
    return {std::min(a, b), std::max(a, b)};
}

// Vertex of triangle t opposite its exit face.
inline int opposite_vertex(const TriMesh& m, const RoutePlan& plan, int t) {
    int k = plan.exit_edge[t];
    if (k < 0) return -1;
    return m.triangles[t][(k + 2) % 3];
}

// Unit vectors from the opposite vertex to the two exit-face endpoints. The
// first points at the lower-indexed endpoint. Every direction between them
// crosses the exit face, so any convex combination leaves the cell toward its
// successor.
inline std::pair<Vec2, Vec2> boundary_vectors(const TriMesh& m,
                                              const RoutePlan& plan, int t) {
    auto [lo, hi] = exit_face_vertices(m, plan, t);
    Vec2 ov = m.vertices[opposite_vertex(m, plan, t)];
    return {normalized(m.vertices[lo] - ov), normalized(m.vertices[hi] - ov)};
}

// Unit normal of the exit face of t, pointing out of t into its successor.
inline Vec2 exit_outward_normal(const TriMesh& m, const RoutePlan& plan,
                                int t) {
    int k = plan.exit_edge[t];
    Vec2 e = m.point(t, (k + 1) % 3) - m.point(t, k);
    return normalized(-perp(e));
}

// Unit normal of edge k of triangle t pointing into the triangle.
inline Vec2 inward_normal(const TriMesh& m, int t, int k) {
    Vec2 e = m.point(t, (k + 1) % 3) - m.point(t, k);
    return normalized(perp(e));
}

} // namespace vfnav
