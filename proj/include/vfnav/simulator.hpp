#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vfnav/controller.hpp"
#include "vfnav/environment.hpp"
#include "vfnav/errors.hpp"
#include "vfnav/guidance.hpp"

namespace vfnav {

enum class SimMode { Unicycle, IntegralCurve };

enum class Outcome { Goal, Collision, Timeout, Stall, Error };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Goal: return "GOAL";
        case Outcome::Collision: return "COLLISION";
        case Outcome::Timeout: return "TIMEOUT";
        case Outcome::Stall: return "STALL";
        case Outcome::Error: return "ERROR";
    }
    return "ERROR";
}

struct SimConfig {
    UnicycleState start;
    double dt = 0.01;          // s
    double t_max = 60.0;       // s
    double goal_radius = 0.05; // m
    ControllerParams controller;
    SimMode mode = SimMode::Unicycle;
    std::uint64_t rng_seed = 0;
};

struct TrajectoryRow {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v = 0.0;
    double omega = 0.0;
    double phi = 0.0;
    double theta_d = 0.0;
    int cell = -1;
    bool saturated = false;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    Outcome outcome = Outcome::Error;
    std::string message;
    std::string warning;
    double arrival_time = -1.0;  // valid when outcome == Goal
    double min_clearance = std::numeric_limits<double>::infinity();
    bool collided = false;
    Vec2 collision_point;
};

namespace detail {

// One fixed-step 4th-order step of the unicycle under constant inputs. The
// heading integrates exactly (theta dot is the constant omega).
inline UnicycleState rk4_unicycle(const UnicycleState& s, double v,
                                  double omega, double dt) {
    auto fx = [v](double theta) { return v * std::cos(theta); };
    auto fy = [v](double theta) { return v * std::sin(theta); };
    double t0 = s.theta;
    double t1 = s.theta + 0.5 * dt * omega;
    double t2 = s.theta + dt * omega;
    UnicycleState n;
    n.x = s.x + dt / 6.0 * (fx(t0) + 4.0 * fx(t1) + fx(t2));
    n.y = s.y + dt / 6.0 * (fy(t0) + 4.0 * fy(t1) + fy(t2));
    n.theta = s.theta + dt * omega;
    return n;
}

inline bool segment_hits_boundary(const Environment& env, Vec2 a, Vec2 b) {
    auto hits = [&](const std::vector<Vec2>& poly) {
        for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
            if (segments_cross_properly(a, b, poly[i], poly[(i + 1) % n])) {
                return true;
            }
        }
        return false;
    };
    if (hits(env.workspace)) return true;
    for (const auto& obs : env.obstacles) {
        if (hits(obs)) return true;
    }
    return false;
}

} // namespace detail

using ControlFn =
    std::function<ControlOutput(const UnicycleState&, int hint)>;

// Core closed-loop integration against an arbitrary control law (the seam
// used by tests with stubbed inputs). Controls are computed once per step at
// the step's initial state and held constant across the step. Terminates on
// the first of: goal disc reached, free space left (endpoint or segment
// crossing a boundary edge), time budget, or a 100-step full stop away from
// the goal. Field errors end the run with outcome Error and the partial
// trajectory.
inline Trajectory simulate_with(const Environment& env, const SimConfig& cfg,
                                const ControlFn& control, Vec2 goal) {
    if (!is_free(env, {cfg.start.x, cfg.start.y})) {
        throw StartNotFree("simulation start is outside free space");
    }
    Trajectory traj;
    if (cfg.dt > 0.1 * std::min(1.0 / cfg.controller.k,
                                1.0 / cfg.controller.omega_max)) {
        traj.warning = "dt is large for the controller gains; expect "
                       "integration artifacts";
    }

    UnicycleState s = cfg.start;
    int hint = -1;
    int stall_steps = 0;
    for (long step = 0;; ++step) {
        double t = cfg.dt * static_cast<double>(step);
        Vec2 p{s.x, s.y};

        ControlOutput c;
        try {
            c = control(s, hint);
        } catch (const Error& e) {
            traj.outcome = Outcome::Error;
            traj.message = e.what();
            return traj;
        }
        hint = c.cell;

        traj.rows.push_back({t, s.x, s.y, s.theta, c.v, c.omega, c.phi,
                             c.theta_d, c.cell, c.saturated});
        traj.min_clearance =
            std::min(traj.min_clearance, signed_clearance(env, p));

        if (distance(p, goal) < cfg.goal_radius) {
            traj.outcome = Outcome::Goal;
            traj.arrival_time = t;
            return traj;
        }
        if (t >= cfg.t_max - 1e-12) {
            traj.outcome = Outcome::Timeout;
            return traj;
        }
        bool stopped = !c.valid || (c.v == 0.0 && std::abs(c.omega) < 1e-9);
        stall_steps = stopped ? stall_steps + 1 : 0;
        if (stall_steps >= 100) {
            traj.outcome = Outcome::Stall;
            traj.message = "controls at rest for 100 steps away from goal";
            return traj;
        }

        UnicycleState next = detail::rk4_unicycle(s, c.v, c.omega, cfg.dt);
        Vec2 np{next.x, next.y};
        if (!is_free(env, np) || detail::segment_hits_boundary(env, p, np)) {
            traj.outcome = Outcome::Collision;
            traj.collided = true;
            traj.collision_point = np;
            traj.message = "left free space during a step";
            return traj;
        }
        s = next;
    }
}

// Closed-loop simulation of the steering law over a guidance field. Start
// positions on a mesh vertex (where the field is undefined) are nudged by
// 1e-9 m, with a note in the trajectory warning.
inline Trajectory simulate(const Environment& env, const GuidanceField& field,
                           const SimConfig& cfg) {
    SimConfig run = cfg;
    std::string jitter_note;
    for (const Vec2& v : field.mesh->vertices) {
        if (distance(v, {run.start.x, run.start.y}) <= 1e-12) {
            run.start.x += 1e-9;
            run.start.y += 1e-9;
            jitter_note = "start coincided with a mesh vertex; nudged 1e-9 m";
            break;
        }
    }
    Trajectory traj = simulate_with(
        env, run,
        [&](const UnicycleState& s, int hint) {
            return compute_control(s, field, run.controller, hint);
        },
        field.plan->goal);
    if (!jitter_note.empty()) {
        traj.warning = traj.warning.empty()
                           ? jitter_note
                           : traj.warning + "; " + jitter_note;
    }
    return traj;
}

struct CurveResult {
    std::vector<Vec2> points;
    Outcome outcome = Outcome::Error;
    std::string message;
    double length = 0.0;
    double min_clearance = std::numeric_limits<double>::infinity();
};

// Holonomic flow of the unit guidance field from a free start: 4th-order
// integration at fixed arclength steps. Ends at the goal disc, on a field
// error (which any penetration of an obstacle triggers at the next
// evaluation), or when the step budget runs out. Clearance is sampled every
// 50 points plus the endpoints.
inline CurveResult trace_integral_curve(const Environment& env,
                                        const GuidanceField& field,
                                        Vec2 start, double step = 1e-3,
                                        long budget = 200000,
                                        double goal_radius = 0.05) {
    if (!is_free(env, start)) {
        throw StartNotFree("integral curve start is outside free space");
    }
    CurveResult out;
    out.outcome = Outcome::Timeout;
    out.points.push_back(start);
    Vec2 goal = field.plan->goal;
    Vec2 p = start;
    int hint = -1;

    for (long i = 0; i < budget; ++i) {
        if (distance(p, goal) < goal_radius) {
            out.outcome = Outcome::Goal;
            break;
        }
        try {
            auto k1 = field.eval(p, hint);
            hint = k1.tri;
            auto k2 = field.eval(p + (0.5 * step) * k1.dir, hint);
            auto k3 = field.eval(p + (0.5 * step) * k2.dir, hint);
            auto k4 = field.eval(p + step * k3.dir, hint);
            p = p + (step / 6.0) *
                        (k1.dir + 2.0 * k2.dir + 2.0 * k3.dir + k4.dir);
        } catch (const Error& e) {
            out.outcome =
                is_free(env, p) ? Outcome::Error : Outcome::Collision;
            out.message = e.what();
            break;
        }
        out.length += distance(out.points.back(), p);
        out.points.push_back(p);
    }
    if (out.outcome == Outcome::Timeout && distance(p, goal) < goal_radius) {
        out.outcome = Outcome::Goal;
    }

    for (std::size_t i = 0; i < out.points.size(); i += 50) {
        out.min_clearance =
            std::min(out.min_clearance, signed_clearance(env, out.points[i]));
    }
    out.min_clearance = std::min(out.min_clearance,
                                 signed_clearance(env, out.points.back()));
    return out;
}

// Deterministic uniform sampling helpers. The generator is the standard
// 64-bit Mersenne twister; the mapping to doubles is fixed here so streams
// never depend on library distribution internals.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform() { return (gen() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

// n points uniform over the free space by rejection from the bounding box.
// Points within keep_out of the goal are rejected too (they would produce
// zero-length trajectories). Throws SamplingExhausted after 1e6 attempts.
inline std::vector<Vec2> sample_free_starts(const Environment& env, int n,
                                            Rng& rng, Vec2 goal,
                                            double keep_out) {
    BoundingBox box = bounding_box(env);
    std::vector<Vec2> out;
    out.reserve(n);
    long attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > 1000000) {
            throw SamplingExhausted(
                "could not sample enough free-space starts");
        }
        Vec2 p{rng.uniform(box.min.x, box.max.x),
               rng.uniform(box.min.y, box.max.y)};
        if (!is_free(env, p)) continue;
        if (distance(p, goal) <= keep_out) continue;
        out.push_back(p);
    }
    return out;
}

struct CurveBatchOptions {
    double step = 1e-3;
    long budget = 200000;
    double goal_radius = 0.05;
};

// Paired integral curves from identical seeded starts, streamed to a visitor
// as visit(index, start, curve_a, curve_b) so large batches never hold more
// than one pair of polylines.
template <typename Visitor>
void batch_curves(const Environment& env, const GuidanceField& field_a,
                  const GuidanceField& field_b, int n, std::uint64_t seed,
                  const CurveBatchOptions& opts, Visitor&& visit) {
    Rng rng(seed);
    std::vector<Vec2> starts = sample_free_starts(
        env, n, rng, field_a.plan->goal, opts.goal_radius);
    for (int i = 0; i < n; ++i) {
        CurveResult a = trace_integral_curve(env, field_a, starts[i],
                                             opts.step, opts.budget,
                                             opts.goal_radius);
        CurveResult b = trace_integral_curve(env, field_b, starts[i],
                                             opts.step, opts.budget,
                                             opts.goal_radius);
        visit(i, starts[i], a, b);
    }
}

// Paired closed-loop runs from identical seeded poses (uniform position,
// uniform heading), streamed like batch_curves.
template <typename Visitor>
void batch_runs(const Environment& env, const GuidanceField& field_a,
                const GuidanceField& field_b, int n, std::uint64_t seed,
                const SimConfig& base, Visitor&& visit) {
    Rng rng(seed);
    std::vector<Vec2> starts =
        sample_free_starts(env, n, rng, field_a.plan->goal, base.goal_radius);
    std::vector<double> thetas(n);
    for (int i = 0; i < n; ++i) thetas[i] = rng.uniform(-kPi, kPi);
    for (int i = 0; i < n; ++i) {
        SimConfig cfg = base;
        cfg.start = {starts[i].x, starts[i].y, thetas[i]};
        Trajectory a = simulate(env, field_a, cfg);
        Trajectory b = simulate(env, field_b, cfg);
        visit(i, cfg.start, a, b);
    }
}

} // namespace vfnav
