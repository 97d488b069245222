#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "vfnav/geometry.hpp"

namespace vfnav {

// A planar workspace polygon with polygonal holes and a goal point. The free
// space is the closed region inside the workspace and outside every obstacle
// interior; polygon boundaries count as free (zero clearance).
struct Environment {
    std::vector<Vec2> workspace;                // counterclockwise
    std::vector<std::vector<Vec2>> obstacles;   // counterclockwise
    Vec2 goal;
};

struct ValidationIssue {
    // -1 refers to the workspace or goal, otherwise an obstacle index.
    int polygon = -1;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }

    std::string to_string() const {
        if (issues.empty()) return "environment valid";
        std::string out;
        for (const auto& issue : issues) {
            if (!out.empty()) out += '\n';
            if (issue.polygon >= 0) {
                out += "obstacle " + std::to_string(issue.polygon) + ": ";
            }
            out += issue.message;
        }
        return out;
    }
};

// Rewrites every polygon in counterclockwise order; point location and the
// triangulator are orientation-agnostic, this just makes stored data
// predictable.
inline void normalize_orientation(Environment& env) {
    if (polygon_signed_area(env.workspace) < 0.0) {
        std::reverse(env.workspace.begin(), env.workspace.end());
    }
    for (auto& obs : env.obstacles) {
        if (polygon_signed_area(obs) < 0.0) {
            std::reverse(obs.begin(), obs.end());
        }
    }
}

inline bool is_free(const Environment& env, Vec2 p) {
    if (locate_in_polygon(env.workspace, p) == PolygonLocation::Outside) {
        return false;
    }
    for (const auto& obs : env.obstacles) {
        if (locate_in_polygon(obs, p) == PolygonLocation::Inside) return false;
    }
    return true;
}

// Distance from p to the nearest boundary of the free space (workspace
// boundary or any obstacle boundary), regardless of which side p is on.
inline double boundary_distance(const Environment& env, Vec2 p) {
    double d = polygon_boundary_distance(env.workspace, p);
    for (const auto& obs : env.obstacles) {
        d = std::min(d, polygon_boundary_distance(obs, p));
    }
    return d;
}

// Positive inside the free space, negative (penetration depth) outside it,
// zero on the boundary.
inline double signed_clearance(const Environment& env, Vec2 p) {
    double d = boundary_distance(env, p);
    return is_free(env, p) ? d : -d;
}

inline double free_area(const Environment& env) {
    double a = std::abs(polygon_signed_area(env.workspace));
    for (const auto& obs : env.obstacles) {
        a -= std::abs(polygon_signed_area(obs));
    }
    return a;
}

struct BoundingBox {
    Vec2 min{std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec2 max{-std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    void expand(Vec2 p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
    }
};

inline BoundingBox bounding_box(const Environment& env) {
    BoundingBox box;
    for (Vec2 p : env.workspace) box.expand(p);
    for (const auto& obs : env.obstacles) {
        for (Vec2 p : obs) box.expand(p);
    }
    return box;
}

namespace detail {

inline bool polygons_intersect(const std::vector<Vec2>& a,
                               const std::vector<Vec2>& b) {
    for (std::size_t i = 0, n = a.size(); i < n; ++i) {
        for (std::size_t j = 0, m = b.size(); j < m; ++j) {
            if (segments_intersect(a[i], a[(i + 1) % n], b[j],
                                   b[(j + 1) % m])) {
                return true;
            }
        }
    }
    return false;
}

inline void check_polygon(const std::vector<Vec2>& poly, int index,
                          const char* name, ValidationReport& report) {
    if (poly.size() < 3) {
        report.issues.push_back(
            {index, std::string(name) + " has fewer than 3 vertices"});
        return;
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            if (distance(poly[i], poly[j]) <= 1e-12) {
                report.issues.push_back(
                    {index, std::string(name) + " vertices " +
                                std::to_string(i) + " and " +
                                std::to_string(j) + " coincide"});
                return;
            }
        }
    }
    if (!polygon_is_simple(poly)) {
        report.issues.push_back(
            {index, std::string(name) + " is not a simple polygon"});
    }
    if (std::abs(polygon_signed_area(poly)) <= 1e-12) {
        report.issues.push_back(
            {index, std::string(name) + " has near-zero area"});
    }
}

} // namespace detail

// Structural checks on an environment. Returns every violated precondition;
// never throws. A passing report is required before triangulation.
inline ValidationReport validate(const Environment& env) {
    ValidationReport report;
    detail::check_polygon(env.workspace, -1, "workspace", report);
    for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
        detail::check_polygon(env.obstacles[k], static_cast<int>(k),
                              "obstacle", report);
    }
    if (!report.ok()) return report;

    for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
        const auto& obs = env.obstacles[k];
        bool inside = true;
        for (Vec2 p : obs) {
            if (locate_in_polygon(env.workspace, p) !=
                PolygonLocation::Inside) {
                inside = false;
                break;
            }
        }
        if (!inside || detail::polygons_intersect(obs, env.workspace)) {
            report.issues.push_back(
                {static_cast<int>(k),
                 "obstacle is not strictly inside the workspace"});
        }
    }
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        for (std::size_t j = i + 1; j < env.obstacles.size(); ++j) {
            const auto& a = env.obstacles[i];
            const auto& b = env.obstacles[j];
            bool overlap = detail::polygons_intersect(a, b);
            if (!overlap) {
                overlap =
                    locate_in_polygon(b, a[0]) == PolygonLocation::Inside ||
                    locate_in_polygon(a, b[0]) == PolygonLocation::Inside;
            }
            if (overlap) {
                report.issues.push_back(
                    {static_cast<int>(i),
                     "obstacle overlaps obstacle " + std::to_string(j)});
            }
        }
    }

    if (locate_in_polygon(env.workspace, env.goal) !=
        PolygonLocation::Inside) {
        report.issues.push_back(
            {-1, "goal is not strictly inside the workspace"});
    } else {
        for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
            if (locate_in_polygon(env.obstacles[k], env.goal) !=
                PolygonLocation::Outside) {
                report.issues.push_back(
                    {static_cast<int>(k), "goal is not outside the obstacle"});
            }
        }
    }
    return report;
}

} // namespace vfnav
