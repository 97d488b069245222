#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "vfnav/report.hpp"

using namespace vfnav;

namespace {

struct World {
    Environment env;
    TriMesh mesh;
    RoutePlan plan;
    GuidanceField qp;
    GuidanceField baseline;

    World() {
        env.workspace = {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}, {0.0, 10.0}};
        env.obstacles = {{{4.0, 4.0}, {6.0, 4.0}, {6.0, 6.0}, {4.0, 6.0}}};
        env.goal = {8.0, 7.0};
        validate(env);
        mesh = triangulate(env);
        plan = make_plan(mesh, env.goal);
        qp.mesh = &mesh;
        qp.plan = &plan;
        qp.cells = qp_assignment(mesh, plan);
        qp.faces = assign_faces(mesh, plan, qp.cells);
        baseline.mesh = &mesh;
        baseline.plan = &plan;
        baseline.cells = baseline_assignment(mesh, plan);
        baseline.faces = assign_faces(mesh, plan, baseline.cells);
    }
};

int total(const OutcomeCounts& c) {
    return c.goal + c.collision + c.timeout + c.stall + c.error;
}

} // namespace

TEST_CASE("outcome tallies cover every case", "[report]") {
    OutcomeCounts c;
    c.add(Outcome::Goal);
    c.add(Outcome::Goal);
    c.add(Outcome::Collision);
    c.add(Outcome::Timeout);
    c.add(Outcome::Stall);
    c.add(Outcome::Error);
    CHECK(c.goal == 2);
    CHECK(c.collision == 1);
    CHECK(c.timeout == 1);
    CHECK(c.stall == 1);
    CHECK(c.error == 1);
    CHECK(total(c) == 6);
}

TEST_CASE("curve comparison of a field against itself ties", "[report]") {
    World w;
    CurveCompareResult r =
        compare_curve_batches(w.env, w.qp, w.qp, 6, 2024);
    CHECK(r.n == 6);
    CHECK(total(r.outcomes_a) == 6);
    CHECK(total(r.outcomes_b) == 6);
    CHECK(r.outcomes_a.goal == r.outcomes_b.goal);
    CHECK(r.pairs_compared + r.pairs_degenerate == r.outcomes_a.goal);
    REQUIRE(r.pairs_compared > 0);
    REQUIRE(r.metrics.size() == 4);
    CHECK(r.metrics[0].metric == "path_length");
    CHECK(r.metrics[1].metric == "total_bending");
    CHECK(r.metrics[2].metric == "total_turning");
    CHECK(r.metrics[3].metric == "max_curvature");
    for (const auto& m : r.metrics) {
        CHECK(m.mean_a == m.mean_b);
        CHECK(m.improvement_pct == 0.0);
        CHECK(m.win_rate_pct == 50.0);
    }
}

TEST_CASE("closed-loop comparison of a field against itself ties",
          "[report]") {
    World w;
    SimConfig base;
    RunCompareResult r = compare_run_batches(w.env, w.qp, w.qp, 4, 11, base);
    CHECK(r.n == 4);
    CHECK(total(r.outcomes_a) == 4);
    CHECK(total(r.outcomes_b) == 4);
    CHECK(r.pairs_compared == r.outcomes_a.goal);
    CHECK(r.joint_wins == 0);
    REQUIRE(r.pairs_compared > 0);
    REQUIRE(r.metrics.size() == 4);
    CHECK(r.metrics[0].metric == "arrival_time");
    CHECK(r.metrics[1].metric == "path_length");
    CHECK(r.metrics[2].metric == "angular_effort");
    CHECK(r.metrics[3].metric == "time_saturated_pct");
    for (const auto& m : r.metrics) {
        CHECK(m.mean_a == m.mean_b);
        CHECK(m.win_rate_pct == 50.0);
    }
}

TEST_CASE("seeded comparisons are reproducible", "[report]") {
    World w;
    CurveCompareResult r1 =
        compare_curve_batches(w.env, w.qp, w.baseline, 5, 77);
    CurveCompareResult r2 =
        compare_curve_batches(w.env, w.qp, w.baseline, 5, 77);
    CHECK(r1.pairs_compared == r2.pairs_compared);
    CHECK(r1.pairs_degenerate == r2.pairs_degenerate);
    REQUIRE(r1.metrics.size() == r2.metrics.size());
    for (std::size_t i = 0; i < r1.metrics.size(); ++i) {
        CHECK(r1.metrics[i].mean_a == r2.metrics[i].mean_a);
        CHECK(r1.metrics[i].mean_b == r2.metrics[i].mean_b);
        CHECK(r1.metrics[i].std_a == r2.metrics[i].std_a);
        CHECK(r1.metrics[i].win_rate_pct == r2.metrics[i].win_rate_pct);
    }

    SimConfig base;
    RunCompareResult s1 = compare_run_batches(w.env, w.qp, w.baseline, 3,
                                              501, base);
    RunCompareResult s2 = compare_run_batches(w.env, w.qp, w.baseline, 3,
                                              501, base);
    CHECK(s1.pairs_compared == s2.pairs_compared);
    CHECK(s1.joint_wins == s2.joint_wins);
    for (std::size_t i = 0; i < s1.metrics.size(); ++i) {
        CHECK(s1.metrics[i].mean_a == s2.metrics[i].mean_a);
        CHECK(s1.metrics[i].mean_b == s2.metrics[i].mean_b);
    }
}

TEST_CASE("two different fields produce a coherent report", "[report]") {
    World w;
    CurveCompareResult r =
        compare_curve_batches(w.env, w.qp, w.baseline, 6, 9);
    CHECK(total(r.outcomes_a) == 6);
    CHECK(total(r.outcomes_b) == 6);
    CHECK(r.pairs_compared <= 6);
    REQUIRE(r.pairs_compared > 0);
    for (const auto& m : r.metrics) {
        CHECK(m.mean_a > 0.0);
        CHECK(m.mean_b > 0.0);
        CHECK(m.win_rate_pct >= 0.0);
        CHECK(m.win_rate_pct <= 100.0);
    }

    SimConfig base;
    RunCompareResult s = compare_run_batches(w.env, w.qp, w.baseline, 4, 31,
                                             base);
    CHECK(total(s.outcomes_a) == 4);
    CHECK(total(s.outcomes_b) == 4);
    CHECK(s.joint_wins <= s.pairs_compared);
    REQUIRE(s.pairs_compared > 0);
    for (const auto& m : s.metrics) {
        CHECK(m.win_rate_pct >= 0.0);
        CHECK(m.win_rate_pct <= 100.0);
    }
}
