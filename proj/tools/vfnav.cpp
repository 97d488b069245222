#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vfnav/serialize.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

std::string sidecar_path(const std::string& out) {
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
        return out.substr(0, out.size() - 4) + ".json";
    }
    return out + ".json";
}

// Environment, mesh, and plan for one run. The mesh is loaded when a mesh
// file is given and rebuilt from the environment otherwise; either way the
// plan is recomputed, which is cheap and deterministic.
struct Pipeline {
    vfnav::Environment env;
    vfnav::TriMesh mesh;
    vfnav::RoutePlan plan;
};

Pipeline build_pipeline(const std::string& env_path,
                        const std::string& mesh_path) {
    Pipeline p;
    p.env = vfnav::io::load_environment(env_path);
    vfnav::ValidationReport report = vfnav::validate(p.env);
    if (!report.ok()) {
        throw vfnav::DegenerateInput("environment invalid: " +
                                     report.to_string());
    }
    p.mesh = mesh_path.empty() ? vfnav::triangulate(p.env)
                               : vfnav::io::load_mesh(mesh_path);
    p.plan = vfnav::make_plan(p.mesh, p.env.goal);
    return p;
}

vfnav::GuidanceField load_guidance(const Pipeline& p,
                                   const std::string& field_path) {
    vfnav::CellFieldAssignment cells =
        vfnav::io::load_field(field_path, p.mesh);
    return vfnav::make_guidance_field(p.mesh, p.plan, std::move(cells));
}

int run_mesh(const std::string& env_path, const std::string& out) {
    auto t0 = Clock::now();
    vfnav::Environment env = vfnav::io::load_environment(env_path);
    vfnav::TriMesh mesh = vfnav::triangulate(env);
    vfnav::io::save_mesh(out, mesh);
    std::cout << "mesh: " << mesh.triangle_count() << " triangles, "
              << mesh.vertices.size() << " vertices, "
              << constrained_edges(mesh).size() << " constrained edges ("
              << ms_since(t0) << " ms)\n";
    return 0;
}

int run_field(const std::string& env_path, const std::string& mesh_path,
              const std::string& method, const std::string& out) {
    auto t0 = Clock::now();
    Pipeline p = build_pipeline(env_path, mesh_path);
    vfnav::CellFieldAssignment cells;
    if (method == "qp") {
        cells = vfnav::qp_assignment(p.mesh, p.plan);
    } else {
        cells = vfnav::baseline_assignment(p.mesh, p.plan);
    }
    vfnav::io::save_field(out, cells);
    std::cout << "field: method " << method << ", objective "
              << cells.objective;
    if (method == "qp") {
        std::cout << ", " << cells.iterations << " iterations, residual "
                  << cells.residual;
    }
    if (!p.plan.unreachable.empty()) {
        std::cout << ", " << p.plan.unreachable.size()
                  << " unreachable cells skipped";
    }
    std::cout << " (" << ms_since(t0) << " ms)\n";
    return 0;
}

int run_simulate(const std::string& env_path, const std::string& mesh_path,
                 const std::string& field_path,
                 const std::string& config_path, const std::string& out) {
    auto t0 = Clock::now();
    Pipeline p = build_pipeline(env_path, mesh_path);
    vfnav::GuidanceField field = load_guidance(p, field_path);
    vfnav::SimConfig cfg = vfnav::io::load_sim_config(config_path);
    if (cfg.mode != vfnav::SimMode::Unicycle) {
        throw vfnav::DegenerateInput(
            "config: simulate runs the unicycle mode; use the trace command "
            "for integral curves");
    }
    vfnav::Trajectory traj = vfnav::simulate(p.env, field, cfg);
    vfnav::io::write_text_file(out, vfnav::io::trajectory_csv(traj));
    vfnav::io::save_json(sidecar_path(out),
                         vfnav::io::trajectory_summary_json(traj));
    std::cout << "simulate: " << to_string(traj.outcome) << " after "
              << traj.rows.size() << " steps";
    if (traj.arrival_time >= 0.0) {
        std::cout << ", arrival " << traj.arrival_time << " s";
    }
    std::cout << " (" << ms_since(t0) << " ms)\n";
    if (!traj.warning.empty()) std::cout << "warning: " << traj.warning << "\n";
    return 0;
}

int run_trace(const std::string& env_path, const std::string& mesh_path,
              const std::string& field_path, const std::string& config_path,
              long budget, const std::string& out) {
    auto t0 = Clock::now();
    Pipeline p = build_pipeline(env_path, mesh_path);
    vfnav::GuidanceField field = load_guidance(p, field_path);
    vfnav::SimConfig cfg = vfnav::io::load_sim_config(config_path);
    vfnav::CurveResult curve = vfnav::trace_integral_curve(
        p.env, field, {cfg.start.x, cfg.start.y}, 1e-3, budget,
        cfg.goal_radius);
    vfnav::io::write_text_file(out, vfnav::io::curve_csv(curve));
    vfnav::io::save_json(sidecar_path(out),
                         vfnav::io::curve_summary_json(curve));
    std::cout << "trace: " << to_string(curve.outcome) << ", "
              << curve.points.size() << " points, length " << curve.length
              << " m (" << ms_since(t0) << " ms)\n";
    return 0;
}

int run_compare(const std::string& env_path, const std::string& mesh_path,
                const std::string& config_path, const std::string& mode,
                int n, std::uint64_t seed, const std::string& out) {
    auto t0 = Clock::now();
    Pipeline p = build_pipeline(env_path, mesh_path);
    vfnav::CellFieldAssignment qp = vfnav::qp_assignment(p.mesh, p.plan);
    vfnav::CellFieldAssignment base = vfnav::baseline_assignment(p.mesh,
                                                                 p.plan);
    vfnav::GuidanceField field_qp =
        vfnav::make_guidance_field(p.mesh, p.plan, std::move(qp));
    vfnav::GuidanceField field_base =
        vfnav::make_guidance_field(p.mesh, p.plan, std::move(base));

    vfnav::SimConfig cfg;
    if (!config_path.empty()) cfg = vfnav::io::load_sim_config(config_path);

    vfnav::io::json report;
    int compared = 0;
    if (mode == "curves") {
        vfnav::CurveBatchOptions opts;
        opts.goal_radius = cfg.goal_radius;
        vfnav::CurveCompareResult r = vfnav::compare_curve_batches(
            p.env, field_qp, field_base, n, seed, opts);
        report = vfnav::io::curve_compare_json(r, "qp", "baseline");
        compared = r.pairs_compared;
    } else {
        vfnav::RunCompareResult r = vfnav::compare_run_batches(
            p.env, field_qp, field_base, n, seed, cfg);
        report = vfnav::io::run_compare_json(r, "qp", "baseline");
        compared = r.pairs_compared;
    }
    report["seed"] = seed;
    vfnav::io::save_json(out, report);
    std::cout << "compare: " << mode << ", " << compared << " of " << n
              << " pairs compared (" << ms_since(t0) << " ms)\n";
    return 0;
}

int run_sample_field(const std::string& env_path,
                     const std::string& mesh_path,
                     const std::string& field_path, int grid_n,
                     const std::string& out) {
    auto t0 = Clock::now();
    Pipeline p = build_pipeline(env_path, mesh_path);
    vfnav::GuidanceField field = load_guidance(p, field_path);
    std::string csv = vfnav::io::field_sample_csv(p.env, field, grid_n);
    vfnav::io::write_text_file(out, csv);
    long rows = std::count(csv.begin(), csv.end(), '\n') - 1;
    std::cout << "sample-field: " << rows << " samples on a " << grid_n
              << "x" << grid_n << " grid (" << ms_since(t0) << " ms)\n";
    return 0;
}

int exit_code_for(const vfnav::Error& e) {
    if (dynamic_cast<const vfnav::ParseError*>(&e)) return 2;
    if (dynamic_cast<const vfnav::DegenerateInput*>(&e) ||
        dynamic_cast<const vfnav::MeshInvalid*>(&e) ||
        dynamic_cast<const vfnav::GoalOutsideMesh*>(&e) ||
        dynamic_cast<const vfnav::EmptyPlan*>(&e) ||
        dynamic_cast<const vfnav::StartNotFree*>(&e) ||
        dynamic_cast<const vfnav::OutsideFreeSpace*>(&e)) {
        return 3;
    }
    return 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vector-field navigation over triangulated free space"};
    app.require_subcommand(1);

    std::string env_path, mesh_path, field_path, config_path, method, out;
    std::string mode = "curves";
    int n = 1000;
    long budget = 200000;
    std::uint64_t seed = 1;

    CLI::App* cmd_mesh = app.add_subcommand(
        "mesh", "Triangulate an environment's free space");
    cmd_mesh->add_option("--env", env_path, "environment JSON")->required();
    cmd_mesh->add_option("--out", out, "mesh JSON to write")->required();

    CLI::App* cmd_field = app.add_subcommand(
        "field", "Assign per-cell guidance vectors");
    cmd_field->add_option("--env", env_path, "environment JSON")->required();
    cmd_field->add_option("--mesh", mesh_path,
                          "mesh JSON (rebuilt from --env when omitted)");
    cmd_field
        ->add_option("--method", method, "qp or baseline")
        ->required()
        ->check(CLI::IsMember({"qp", "baseline"}));
    cmd_field->add_option("--out", out, "field JSON to write")->required();

    CLI::App* cmd_sim = app.add_subcommand(
        "simulate", "Run the closed-loop unicycle to the goal");
    cmd_sim->add_option("--env", env_path, "environment JSON")->required();
    cmd_sim->add_option("--mesh", mesh_path,
                        "mesh JSON (rebuilt from --env when omitted)");
    cmd_sim->add_option("--field", field_path, "field JSON")->required();
    cmd_sim->add_option("--config", config_path, "simulation config JSON")
        ->required();
    cmd_sim
        ->add_option("--out", out,
                     "trajectory CSV to write (summary JSON lands next to "
                     "it)")
        ->required();

    CLI::App* cmd_trace = app.add_subcommand(
        "trace", "Follow the field's integral curve from the config start");
    cmd_trace->add_option("--env", env_path, "environment JSON")->required();
    cmd_trace->add_option("--mesh", mesh_path,
                          "mesh JSON (rebuilt from --env when omitted)");
    cmd_trace->add_option("--field", field_path, "field JSON")->required();
    cmd_trace->add_option("--config", config_path, "simulation config JSON")
        ->required();
    cmd_trace->add_option("--n", budget, "arclength step budget");
    cmd_trace->add_option("--out", out, "curve CSV to write")->required();

    CLI::App* cmd_cmp = app.add_subcommand(
        "compare", "Paired QP vs baseline batch with a metrics report");
    cmd_cmp->add_option("--env", env_path, "environment JSON")->required();
    cmd_cmp->add_option("--mesh", mesh_path,
                        "mesh JSON (rebuilt from --env when omitted)");
    cmd_cmp->add_option("--config", config_path,
                        "simulation config JSON (closedloop mode)");
    cmd_cmp->add_option("--mode", mode, "curves or closedloop")
        ->check(CLI::IsMember({"curves", "closedloop"}));
    cmd_cmp->add_option("--n", n, "number of paired starts");
    cmd_cmp->add_option("--seed", seed, "start-sampling seed");
    cmd_cmp->add_option("--out", out, "report JSON to write")->required();

    CLI::App* cmd_sample = app.add_subcommand(
        "sample-field", "Sample the blended field on a grid for plotting");
    cmd_sample->add_option("--env", env_path, "environment JSON")->required();
    cmd_sample->add_option("--mesh", mesh_path,
                           "mesh JSON (rebuilt from --env when omitted)");
    cmd_sample->add_option("--field", field_path, "field JSON")->required();
    cmd_sample->add_option("--n", n, "grid resolution per axis")
        ->check(CLI::NonNegativeNumber);
    cmd_sample->add_option("--out", out, "sample CSV to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_mesh->parsed()) return run_mesh(env_path, out);
        if (cmd_field->parsed()) {
            return run_field(env_path, mesh_path, method, out);
        }
        if (cmd_sim->parsed()) {
            return run_simulate(env_path, mesh_path, field_path, config_path,
                                out);
        }
        if (cmd_trace->parsed()) {
            return run_trace(env_path, mesh_path, field_path, config_path,
                             budget, out);
        }
        if (cmd_cmp->parsed()) {
            return run_compare(env_path, mesh_path, config_path, mode, n,
                               seed, out);
        }
        if (cmd_sample->parsed()) {
            return run_sample_field(env_path, mesh_path, field_path, n, out);
        }
    } catch (const vfnav::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
