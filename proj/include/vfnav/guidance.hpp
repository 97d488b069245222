#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "vfnav/cell_field.hpp"
#include "vfnav/errors.hpp"
#include "vfnav/mesh.hpp"
#include "vfnav/plan.hpp"

namespace vfnav {

// Smooth monotone step: 0 for eta <= 0, 1 for eta >= 1, built from
// lambda(eta) = (1/eta) exp(-1/eta). lambda underflows to exactly 0 for tiny
// positive eta, which matches the mathematical limit.
inline double bump(double eta) {
    if (eta <= 0.0) return 0.0;
    if (eta >= 1.0) return 1.0;
    auto lambda = [](double s) { return std::exp(-1.0 / s) / s; };
    double a = lambda(eta);
    double b = lambda(1.0 - eta);
    return a / (a + b);
}

// Role of a triangle edge in the guidance field.
//   Exit:       the triangle's own exit face; carries the averaged vector
//               shared with the successor.
//   Entry:      the neighbor's exit face into this triangle; carries the same
//               shared vector, seen from the receiving side.
//   Wall:       constrained boundary edge; inward unit normal.
//   Separatrix: interior edge that is the exit face of neither side (a
//               watershed between routes); inward unit normal per side, the
//               one deliberate discontinuity of the field.
enum class FaceKind { Exit, Entry, Wall, Separatrix };

struct FaceField {
    Vec2 dir;
    FaceKind kind = FaceKind::Wall;
};

struct FaceFieldAssignment {
    std::vector<std::array<FaceField, 3>> faces;  // per triangle, per edge
};

// Assigns a face vector to every edge of every routed triangle. Unconstrained
// edges that carry flow (an exit face of either side) get one agreed vector,
// normalize(V_cell + V_successor_target), identical from both sides so the
// blended field is continuous across them.
inline FaceFieldAssignment assign_faces(const TriMesh& m,
                                        const RoutePlan& plan,
                                        const CellFieldAssignment& cells) {
    auto coupled_dir = [&](int from) {
        // Vector the cell of `from` aligns to: its successor's cell vector,
        // or the fixed goal-ward direction when the successor is the goal
        // triangle (mirroring the optimization's goal coupling).
        int succ = plan.successor[from];
        Vec2 target = succ == plan.goal_triangle
                          ? normalized(plan.goal - m.centroids[from])
                          : cells.cell_dir[succ];
        Vec2 sum = cells.cell_dir[from] + target;
        if (norm(sum) < 1e-12) return exit_outward_normal(m, plan, from);
        return normalized(sum);
    };

    FaceFieldAssignment out;
    out.faces.assign(m.triangle_count(), {});
    for (int t = 0; t < m.triangle_count(); ++t) {
        for (int k = 0; k < 3; ++k) {
            FaceField& face = out.faces[t][k];
            int nb = m.neighbors[t][k];
            if (m.constrained[t][k] || nb < 0) {
                face = {inward_normal(m, t, k), FaceKind::Wall};
            } else if (t != plan.goal_triangle && plan.exit_edge[t] == k) {
                face = {coupled_dir(t), FaceKind::Exit};
            } else if (nb != plan.goal_triangle &&
                       plan.successor[nb] == t) {
                face = {coupled_dir(nb), FaceKind::Entry};
            } else {
                face = {inward_normal(m, t, k), FaceKind::Separatrix};
            }
        }
    }
    return out;
}

// The continuous unit guidance field over the triangulated free space.
// Inside each routed cell the field equals the cell vector on the in-cell
// skeleton band and bends toward the closest face vector near edges; inside
// the goal triangle the cell vector points at the goal from the query point.
// References mesh and plan; both must outlive the field.
struct GuidanceField {
    const TriMesh* mesh = nullptr;
    const RoutePlan* plan = nullptr;
    CellFieldAssignment cells;
    FaceFieldAssignment faces;
    double blend_width = 1.0;  // band = blend_width * inradius, in (0, 1]

    struct Sample {
        Vec2 dir;
        int tri = -1;
    };

    Sample eval(Vec2 p, int hint = -1) const;
    double target_heading(Vec2 p, int hint = -1) const {
        Sample s = eval(p, hint);
        return std::atan2(s.dir.y, s.dir.x);
    }

    struct HeadingGradient {
        double ddx = 0.0;
        double ddy = 0.0;
        int tri = -1;
    };
    HeadingGradient heading_gradient(Vec2 p, int hint = -1) const;
};

inline GuidanceField make_guidance_field(const TriMesh& m,
                                         const RoutePlan& plan,
                                         CellFieldAssignment cells,
                                         double blend_width = 1.0) {
    GuidanceField f;
    f.mesh = &m;
    f.plan = &plan;
    f.faces = assign_faces(m, plan, cells);
    f.cells = std::move(cells);
    f.blend_width = blend_width;
    return f;
}

inline GuidanceField::Sample GuidanceField::eval(Vec2 p, int hint) const {
    const TriMesh& m = *mesh;
    int t = locate(m, p, hint);
    if (t < 0) {
        throw OutsideFreeSpace("point is outside the triangulated free space");
    }
    if (!plan->covered(t)) {
        throw OutsideFreeSpace("point is in a cell the plan does not cover");
    }
    for (int k = 0; k < 3; ++k) {
        if (distance(p, m.point(t, k)) <= 1e-12) {
            throw VertexSingularity("field is undefined at mesh vertices");
        }
    }

    Vec2 cell_dir;
    if (t == plan->goal_triangle) {
        Vec2 to_goal = plan->goal - p;
        if (norm(to_goal) <= 1e-12) return {Vec2{0.0, 0.0}, t};
        cell_dir = normalized(to_goal);
    } else {
        cell_dir = cells.cell_dir[t];
    }

    // Distance to each edge's supporting line; inside the triangle this is
    // the perpendicular distance to the edge itself.
    double d[3];
    for (int k = 0; k < 3; ++k) {
        d[k] = line_distance(p, m.point(t, k), m.point(t, (k + 1) % 3));
    }
    int closest = 0;
    if (d[1] < d[closest]) closest = 1;
    if (d[2] < d[closest]) closest = 2;
    double second = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        if (k != closest) second = std::min(second, d[k]);
    }

    // The band saturates at the in-cell skeleton (where the closest face
    // switches), keeping the blend continuous there; bump(1) = 1 makes the
    // face weight vanish exactly at the switch locus. In the goal triangle
    // the band additionally stays below half the goal's distance to the
    // face: anywhere the radial pull opposes the face vector (the ray from
    // the goal along that vector) then lies outside the band, so the blend
    // cannot cancel to zero and strand the flow short of the goal.
    double band = std::min(blend_width * m.inradii[t], second);
    if (t == plan->goal_triangle) {
        double dg = line_distance(plan->goal, m.point(t, closest),
                                  m.point(t, (closest + 1) % 3));
        band = std::min(band, 0.5 * dg);
    }
    double w = band > 0.0 ? 1.0 - bump(d[closest] / band) : 0.0;

    Vec2 raw = (1.0 - w) * cell_dir + w * faces.faces[t][closest].dir;
    double n = norm(raw);
    if (n < 1e-12) {
        throw VertexSingularity("blended field direction vanished");
    }
    return {raw / n, t};
}

inline GuidanceField::HeadingGradient GuidanceField::heading_gradient(
    Vec2 p, int hint) const {
    Sample here = eval(p, hint);
    double h = std::max(1e-5, 1e-4 * mesh->inradii[here.tri]);
    double base = std::atan2(here.dir.y, here.dir.x);

    auto heading_at = [&](Vec2 q, bool& ok) {
        try {
            Sample s = eval(q, here.tri);
            ok = true;
            return std::atan2(s.dir.y, s.dir.x);
        } catch (const Error&) {
            ok = false;
            return 0.0;
        }
    };
    auto wrap = [](double a) {
        double r = std::remainder(a, 2.0 * kPi);
        if (r <= -kPi) r = kPi;
        return r;
    };
    auto axis = [&](Vec2 step) {
        bool ok_plus = false, ok_minus = false;
        double plus = heading_at(p + step, ok_plus);
        double minus = heading_at(p - step, ok_minus);
        if (ok_plus && ok_minus) return wrap(plus - minus) / (2.0 * h);
        if (ok_plus) return wrap(plus - base) / h;
        if (ok_minus) return wrap(base - minus) / h;
        return 0.0;
    };

    HeadingGradient g;
    g.ddx = axis({h, 0.0});
    g.ddy = axis({0.0, h});
    g.tri = here.tri;
    return g;
}

} // namespace vfnav
