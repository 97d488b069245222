#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vfnav/cell_field.hpp"
#include "vfnav/controller.hpp"
#include "vfnav/environment.hpp"
#include "vfnav/errors.hpp"
#include "vfnav/geometry.hpp"
#include "vfnav/guidance.hpp"
#include "vfnav/mesh.hpp"
#include "vfnav/metrics.hpp"
#include "vfnav/plan.hpp"
#include "vfnav/report.hpp"
#include "vfnav/simulator.hpp"

namespace vfnav::io {

using json = nlohmann::json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to " + path + " failed");
}

inline json parse_json_text(const std::string& text,
                            const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(what + ": malformed JSON");
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// Shortest round-trip decimal form, so equal doubles always print the same
// bytes.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

namespace detail {

inline double finite_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ParseError(what + " is not a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(what + " is not finite");
    return v;
}

inline int index_number(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ParseError(what + " is not an integer");
    return j.get<int>();
}

inline Vec2 point_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) {
        throw ParseError(what + " is not an [x, y] pair");
    }
    return {finite_number(j[0], what + "[0]"),
            finite_number(j[1], what + "[1]")};
}

inline std::vector<Vec2> points_from(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + " is not an array");
    std::vector<Vec2> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(point_from(j[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline json point_json(Vec2 p) { return json::array({p.x, p.y}); }

inline json points_json(const std::vector<Vec2>& pts) {
    json out = json::array();
    for (Vec2 p : pts) out.push_back(point_json(p));
    return out;
}

} // namespace detail

inline json environment_to_json(const Environment& env) {
    json j;
    j["workspace"] = detail::points_json(env.workspace);
    json obs = json::array();
    for (const auto& o : env.obstacles) obs.push_back(detail::points_json(o));
    j["obstacles"] = obs;
    j["goal"] = detail::point_json(env.goal);
    return j;
}

inline Environment environment_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("environment: not a JSON object");
    if (!j.contains("workspace") || !j.contains("goal")) {
        throw ParseError("environment: workspace and goal are required");
    }
    Environment env;
    env.workspace = detail::points_from(j["workspace"], "workspace");
    if (j.contains("obstacles")) {
        const json& obs = j["obstacles"];
        if (!obs.is_array()) throw ParseError("obstacles is not an array");
        for (std::size_t i = 0; i < obs.size(); ++i) {
            env.obstacles.push_back(detail::points_from(
                obs[i], "obstacles[" + std::to_string(i) + "]"));
        }
    }
    env.goal = detail::point_from(j["goal"], "goal");
    normalize_orientation(env);
    return env;
}

inline Environment load_environment(const std::string& path) {
    return environment_from_json(
        parse_json_text(read_text_file(path), path));
}

inline void save_environment(const std::string& path,
                             const Environment& env) {
    save_json(path, environment_to_json(env));
}

inline json mesh_to_json(const TriMesh& m) {
    json j;
    j["vertices"] = detail::points_json(m.vertices);
    json tris = json::array();
    for (const auto& t : m.triangles) {
        tris.push_back(json::array({t[0], t[1], t[2]}));
    }
    j["triangles"] = tris;
    json edges = json::array();
    for (auto [a, b] : constrained_edges(m)) {
        edges.push_back(json::array({a, b}));
    }
    j["constrained_edges"] = edges;
    return j;
}

// Rebuilds a mesh from its on-disk form. Adjacency is recomputed, every
// structural invariant is re-checked, and the constrained-edge list is
// cross-validated against the triangles, so a hand-edited file cannot smuggle
// in a broken mesh.
inline TriMesh mesh_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("mesh: not a JSON object");
    for (const char* key : {"vertices", "triangles", "constrained_edges"}) {
        if (!j.contains(key) || !j[key].is_array()) {
            throw ParseError(std::string("mesh: missing array ") + key);
        }
    }
    TriMesh m;
    m.vertices = detail::points_from(j["vertices"], "vertices");
    for (std::size_t i = 0; i < j["triangles"].size(); ++i) {
        const json& t = j["triangles"][i];
        std::string what = "triangles[" + std::to_string(i) + "]";
        if (!t.is_array() || t.size() != 3) {
            throw ParseError(what + " is not an index triple");
        }
        m.triangles.push_back({detail::index_number(t[0], what),
                               detail::index_number(t[1], what),
                               detail::index_number(t[2], what)});
    }
    int nv = static_cast<int>(m.vertices.size());
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < j["constrained_edges"].size(); ++i) {
        const json& e = j["constrained_edges"][i];
        std::string what = "constrained_edges[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2) {
            throw ParseError(what + " is not an index pair");
        }
        int a = detail::index_number(e[0], what);
        int b = detail::index_number(e[1], what);
        if (a < 0 || a >= nv || b < 0 || b >= nv || a == b) {
            throw MeshInvalid(what + " has out-of-range or equal endpoints");
        }
        edges.push_back({a, b});
    }

    build_adjacency(m, edges);
    compute_derived(m);
    check_mesh(m);

    auto map = vfnav::detail::build_edge_map(m.triangles);
    for (auto [a, b] : edges) {
        if (!map.count(vfnav::detail::edge_key(a, b))) {
            throw MeshInvalid("constrained edge is not an edge of any triangle");
        }
    }
    for (const auto& [key, uses] : map) {
        for (auto [a, b] : edges) {
            if (segments_cross_properly(m.vertices[key.first],
                                        m.vertices[key.second], m.vertices[a],
                                        m.vertices[b])) {
                throw MeshInvalid("triangle edge crosses a constrained edge");
            }
        }
    }
    return m;
}

inline TriMesh load_mesh(const std::string& path) {
    return mesh_from_json(parse_json_text(read_text_file(path), path));
}

inline void save_mesh(const std::string& path, const TriMesh& m) {
    save_json(path, mesh_to_json(m));
}

inline json plan_to_json(const TriMesh& m, const RoutePlan& plan) {
    json j;
    j["goal"] = detail::point_json(plan.goal);
    j["goal_triangle"] = plan.goal_triangle;
    j["successor"] = plan.successor;
    json faces = json::array();
    for (int t = 0; t < m.triangle_count(); ++t) {
        auto [lo, hi] = exit_face_vertices(m, plan, t);
        faces.push_back(json::array({lo, hi}));
    }
    j["exit_faces"] = faces;
    return j;
}

inline RoutePlan plan_from_json(const json& j, const TriMesh& m) {
    if (!j.is_object()) throw ParseError("plan: not a JSON object");
    for (const char* key : {"goal", "goal_triangle", "successor",
                            "exit_faces"}) {
        if (!j.contains(key)) {
            throw ParseError(std::string("plan: missing key ") + key);
        }
    }
    int n = m.triangle_count();
    RoutePlan plan;
    plan.goal = detail::point_from(j["goal"], "goal");
    plan.goal_triangle = detail::index_number(j["goal_triangle"],
                                              "goal_triangle");
    if (plan.goal_triangle < 0 || plan.goal_triangle >= n) {
        throw MeshInvalid("goal_triangle index out of range");
    }
    const json& succ = j["successor"];
    const json& faces = j["exit_faces"];
    if (!succ.is_array() || static_cast<int>(succ.size()) != n ||
        !faces.is_array() || static_cast<int>(faces.size()) != n) {
        throw MeshInvalid("plan arrays do not match the triangle count");
    }
    plan.successor.resize(n);
    plan.exit_edge.assign(n, -1);
    plan.cost.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (int t = 0; t < n; ++t) {
        int s = detail::index_number(succ[t], "successor entry");
        if (s < -1 || s >= n || s == t) {
            throw MeshInvalid("successor index out of range");
        }
        plan.successor[t] = s;
        const json& f = faces[t];
        if (!f.is_array() || f.size() != 2) {
            throw ParseError("exit_faces entry is not an index pair");
        }
        int a = detail::index_number(f[0], "exit face vertex");
        int b = detail::index_number(f[1], "exit face vertex");
        if (s < 0) {
            if (a != -1 || b != -1) {
                throw MeshInvalid("cell without successor has an exit face");
            }
            if (t != plan.goal_triangle) plan.unreachable.push_back(t);
            continue;
        }
        if (t == plan.goal_triangle) {
            throw MeshInvalid("goal triangle must have successor -1");
        }
        int k = -1;
        for (int e = 0; e < 3; ++e) {
            int u = m.triangles[t][e], w = m.triangles[t][(e + 1) % 3];
            if (std::min(u, w) == std::min(a, b) &&
                std::max(u, w) == std::max(a, b)) {
                k = e;
            }
        }
        if (k < 0 || m.neighbors[t][k] != s) {
            throw MeshInvalid(
                "exit face is not the unconstrained edge shared with the "
                "successor");
        }
        plan.exit_edge[t] = k;
    }
    for (int t = 0; t < n; ++t) {
        int cur = t, steps = 0;
        while (cur != plan.goal_triangle && plan.successor[cur] >= 0) {
            cur = plan.successor[cur];
            if (++steps > n) {
                throw MeshInvalid("successor graph has a cycle");
            }
        }
    }
    return plan;
}

inline RoutePlan load_plan(const std::string& path, const TriMesh& m) {
    return plan_from_json(parse_json_text(read_text_file(path), path), m);
}

inline void save_plan(const std::string& path, const TriMesh& m,
                      const RoutePlan& plan) {
    save_json(path, plan_to_json(m, plan));
}

inline json field_to_json(const CellFieldAssignment& a) {
    json j;
    j["method"] = to_string(a.method);
    if (a.method == FieldMethod::Qp) {
        json alpha = json::array();
        for (double v : a.alpha) {
            if (std::isnan(v)) alpha.push_back(nullptr);
            else alpha.push_back(v);
        }
        j["alpha"] = alpha;
        j["residual"] = a.residual;
        j["iterations"] = a.iterations;
    }
    json vecs = json::array();
    for (Vec2 v : a.cell_dir) vecs.push_back(detail::point_json(v));
    j["cell_vectors"] = vecs;
    j["objective"] = a.objective;
    return j;
}

inline CellFieldAssignment field_from_json(const json& j, const TriMesh& m) {
    if (!j.is_object()) throw ParseError("field: not a JSON object");
    if (!j.contains("method") || !j["method"].is_string()) {
        throw ParseError("field: missing method");
    }
    CellFieldAssignment a;
    std::string method = j["method"].get<std::string>();
    if (method == "qp") a.method = FieldMethod::Qp;
    else if (method == "baseline") a.method = FieldMethod::Baseline;
    else throw ParseError("field: unknown method " + method);

    if (!j.contains("cell_vectors")) {
        throw ParseError("field: missing cell_vectors");
    }
    std::vector<Vec2> vecs = detail::points_from(j["cell_vectors"],
                                                 "cell_vectors");
    int n = m.triangle_count();
    if (static_cast<int>(vecs.size()) != n) {
        throw MeshInvalid("cell vector count does not match the mesh");
    }
    a.cell_dir.resize(n);
    for (int t = 0; t < n; ++t) {
        double len = norm(vecs[t]);
        if (len <= 1e-9) {
            a.cell_dir[t] = {0.0, 0.0};
        } else if (std::abs(len - 1.0) <= 1e-6) {
            a.cell_dir[t] = vecs[t] / len;
        } else {
            throw DegenerateInput("cell vector is neither zero nor unit");
        }
    }

    if (a.method == FieldMethod::Qp) {
        if (!j.contains("alpha") || !j["alpha"].is_array() ||
            static_cast<int>(j["alpha"].size()) != n) {
            throw ParseError("field: alpha array must cover every triangle");
        }
        a.alpha.resize(n);
        for (int t = 0; t < n; ++t) {
            const json& e = j["alpha"][t];
            if (e.is_null()) {
                a.alpha[t] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double v = detail::finite_number(e, "alpha entry");
            if (v < 0.0 || v > 1.0) {
                throw DegenerateInput("alpha entry outside [0, 1]");
            }
            a.alpha[t] = v;
        }
        if (j.contains("residual")) {
            a.residual = detail::finite_number(j["residual"], "residual");
        }
        if (j.contains("iterations")) {
            a.iterations = detail::index_number(j["iterations"],
                                                "iterations");
        }
    } else if (j.contains("alpha")) {
        throw ParseError("field: baseline method must not carry alpha");
    }
    if (j.contains("objective")) {
        a.objective = detail::finite_number(j["objective"], "objective");
    }
    return a;
}

inline CellFieldAssignment load_field(const std::string& path,
                                      const TriMesh& m) {
    return field_from_json(parse_json_text(read_text_file(path), path), m);
}

inline void save_field(const std::string& path,
                       const CellFieldAssignment& a) {
    save_json(path, field_to_json(a));
}

inline json sim_config_to_json(const SimConfig& cfg) {
    json j;
    j["start"] = json::array({cfg.start.x, cfg.start.y, cfg.start.theta});
    j["dt"] = cfg.dt;
    j["t_max"] = cfg.t_max;
    j["goal_radius"] = cfg.goal_radius;
    j["v_max"] = cfg.controller.v_max;
    j["omega_max"] = cfg.controller.omega_max;
    j["k"] = cfg.controller.k;
    j["eps_v"] = cfg.controller.eps_v;
    j["v_law"] = cfg.controller.v_law == SpeedLaw::Linear ? "linear"
                                                          : "cosine";
    j["mode"] = cfg.mode == SimMode::Unicycle ? "unicycle" : "integral_curve";
    j["rng_seed"] = cfg.rng_seed;
    return j;
}

// Flat key set mirroring SimConfig and ControllerParams field names. Unknown
// keys are rejected so a typo cannot silently fall back to a default.
inline SimConfig sim_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("config: not a JSON object");
    static const std::set<std::string> known{
        "start", "dt", "t_max", "goal_radius", "v_max", "omega_max",
        "k", "eps_v", "v_law", "mode", "rng_seed"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ParseError("config: unknown key " + key);
        }
    }
    SimConfig cfg;
    if (j.contains("start")) {
        const json& s = j["start"];
        if (!s.is_array() || s.size() != 3) {
            throw ParseError("config: start is not [x, y, theta]");
        }
        cfg.start.x = detail::finite_number(s[0], "start[0]");
        cfg.start.y = detail::finite_number(s[1], "start[1]");
        cfg.start.theta = detail::finite_number(s[2], "start[2]");
    }
    auto number = [&](const char* key, double fallback) {
        return j.contains(key) ? detail::finite_number(j[key], key)
                               : fallback;
    };
    cfg.dt = number("dt", cfg.dt);
    cfg.t_max = number("t_max", cfg.t_max);
    cfg.goal_radius = number("goal_radius", cfg.goal_radius);
    cfg.controller.v_max = number("v_max", cfg.controller.v_max);
    cfg.controller.omega_max = number("omega_max", cfg.controller.omega_max);
    cfg.controller.k = number("k", cfg.controller.k);
    cfg.controller.eps_v = number("eps_v", cfg.controller.eps_v);
    if (j.contains("v_law")) {
        std::string law = j["v_law"].is_string()
                              ? j["v_law"].get<std::string>()
                              : std::string();
        if (law == "linear") cfg.controller.v_law = SpeedLaw::Linear;
        else if (law == "cosine") cfg.controller.v_law = SpeedLaw::Cosine;
        else throw ParseError("config: v_law must be linear or cosine");
    }
    if (j.contains("mode")) {
        std::string mode = j["mode"].is_string()
                               ? j["mode"].get<std::string>()
                               : std::string();
        if (mode == "unicycle") cfg.mode = SimMode::Unicycle;
        else if (mode == "integral_curve") cfg.mode = SimMode::IntegralCurve;
        else throw ParseError("config: mode must be unicycle or integral_curve");
    }
    if (j.contains("rng_seed")) {
        const json& s = j["rng_seed"];
        if (!s.is_number_integer() ||
            (s.is_number_integer() && !s.is_number_unsigned() &&
             s.get<std::int64_t>() < 0)) {
            throw ParseError("config: rng_seed is not a non-negative integer");
        }
        cfg.rng_seed = s.get<std::uint64_t>();
    }

    if (!(cfg.dt > 0.0)) throw DegenerateInput("config: dt must be positive");
    if (!(cfg.t_max >= 0.0)) throw DegenerateInput("config: t_max is negative");
    if (!(cfg.goal_radius > 0.0)) {
        throw DegenerateInput("config: goal_radius must be positive");
    }
    if (!(cfg.controller.v_max > 0.0) || !(cfg.controller.omega_max > 0.0) ||
        !(cfg.controller.k > 0.0)) {
        throw DegenerateInput("config: v_max, omega_max, k must be positive");
    }
    if (cfg.controller.v_law == SpeedLaw::Linear &&
        !(cfg.controller.eps_v > 0.0 &&
          cfg.controller.eps_v <= 0.5 * kPi + 1e-15)) {
        throw DegenerateInput("config: eps_v must be in (0, pi/2]");
    }
    return cfg;
}

inline SimConfig load_sim_config(const std::string& path) {
    return sim_config_from_json(parse_json_text(read_text_file(path), path));
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,y,theta,v,omega,phi,theta_d,cell,saturated\n";
    for (const auto& r : traj.rows) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.x);
        out += ',';
        out += format_double(r.y);
        out += ',';
        out += format_double(r.theta);
        out += ',';
        out += format_double(r.v);
        out += ',';
        out += format_double(r.omega);
        out += ',';
        out += format_double(r.phi);
        out += ',';
        out += format_double(r.theta_d);
        out += ',';
        out += std::to_string(r.cell);
        out += ',';
        out += r.saturated ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline json trajectory_summary_json(const Trajectory& traj) {
    json j;
    j["outcome"] = to_string(traj.outcome);
    j["steps"] = traj.rows.size();
    if (traj.arrival_time >= 0.0) j["arrival_time"] = traj.arrival_time;
    else j["arrival_time"] = nullptr;
    if (std::isfinite(traj.min_clearance)) {
        j["min_clearance"] = traj.min_clearance;
    } else {
        j["min_clearance"] = nullptr;
    }
    if (!traj.rows.empty()) {
        const auto& r = traj.rows.back();
        j["final"] = {{"t", r.t}, {"x", r.x}, {"y", r.y}, {"theta", r.theta}};
    }
    if (!traj.message.empty()) j["message"] = traj.message;
    if (!traj.warning.empty()) j["warning"] = traj.warning;
    return j;
}

inline std::string curve_csv(const CurveResult& curve) {
    std::string out = "x,y\n";
    for (Vec2 p : curve.points) {
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += '\n';
    }
    return out;
}

inline json curve_summary_json(const CurveResult& curve) {
    json j;
    j["outcome"] = to_string(curve.outcome);
    j["points"] = curve.points.size();
    j["length"] = curve.length;
    if (std::isfinite(curve.min_clearance)) {
        j["min_clearance"] = curve.min_clearance;
    } else {
        j["min_clearance"] = nullptr;
    }
    if (!curve.message.empty()) j["message"] = curve.message;
    return j;
}

// Field directions at the cell centers of a grid_n x grid_n grid over the
// workspace bounding box. Points the field cannot evaluate (outside free
// space, uncovered cells, vertices) produce no row.
inline std::string field_sample_csv(const Environment& env,
                                    const GuidanceField& field, int grid_n) {
    std::string out = "x,y,Vx,Vy,theta_d,cell\n";
    BoundingBox box = bounding_box(env);
    double w = box.max.x - box.min.x;
    double h = box.max.y - box.min.y;
    int hint = -1;
    for (int iy = 0; iy < grid_n; ++iy) {
        for (int ix = 0; ix < grid_n; ++ix) {
            Vec2 p{box.min.x + (ix + 0.5) * w / grid_n,
                   box.min.y + (iy + 0.5) * h / grid_n};
            GuidanceField::Sample s;
            try {
                s = field.eval(p, hint);
            } catch (const OutsideFreeSpace&) {
                continue;
            } catch (const VertexSingularity&) {
                continue;
            }
            hint = s.tri;
            out += format_double(p.x);
            out += ',';
            out += format_double(p.y);
            out += ',';
            out += format_double(s.dir.x);
            out += ',';
            out += format_double(s.dir.y);
            out += ',';
            out += format_double(std::atan2(s.dir.y, s.dir.x));
            out += ',';
            out += std::to_string(s.tri);
            out += '\n';
        }
    }
    return out;
}

inline json comparison_to_json(const MetricComparison& c,
                               const std::string& name_a,
                               const std::string& name_b) {
    json j;
    j["metric"] = c.metric;
    j[name_a] = {{"mean", c.mean_a}, {"std", c.std_a}};
    j[name_b] = {{"mean", c.mean_b}, {"std", c.std_b}};
    j["improvement_pct"] = c.improvement_pct;
    j["win_rate_pct"] = c.win_rate_pct;
    return j;
}

inline json outcome_counts_json(const OutcomeCounts& c) {
    return {{"GOAL", c.goal},
            {"COLLISION", c.collision},
            {"TIMEOUT", c.timeout},
            {"STALL", c.stall},
            {"ERROR", c.error}};
}

inline json curve_compare_json(const CurveCompareResult& r,
                               const std::string& name_a,
                               const std::string& name_b) {
    json j;
    j["mode"] = "curves";
    j["n"] = r.n;
    j["pairs_compared"] = r.pairs_compared;
    j["pairs_degenerate"] = r.pairs_degenerate;
    j["outcomes"] = {{name_a, outcome_counts_json(r.outcomes_a)},
                     {name_b, outcome_counts_json(r.outcomes_b)}};
    json metrics = json::array();
    for (const auto& m : r.metrics) {
        metrics.push_back(comparison_to_json(m, name_a, name_b));
    }
    j["metrics"] = metrics;
    return j;
}

inline json run_compare_json(const RunCompareResult& r,
                             const std::string& name_a,
                             const std::string& name_b) {
    json j;
    j["mode"] = "closedloop";
    j["n"] = r.n;
    j["pairs_compared"] = r.pairs_compared;
    j["joint_wins"] = r.joint_wins;
    j["outcomes"] = {{name_a, outcome_counts_json(r.outcomes_a)},
                     {name_b, outcome_counts_json(r.outcomes_b)}};
    json metrics = json::array();
    for (const auto& m : r.metrics) {
        metrics.push_back(comparison_to_json(m, name_a, name_b));
    }
    j["metrics"] = metrics;
    return j;
}

} // namespace vfnav::io
