#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfnav/errors.hpp"
#include "vfnav/guidance.hpp"
#include "vfnav/metrics.hpp"
#include "vfnav/simulator.hpp"

namespace vfnav {

struct OutcomeCounts {
    int goal = 0;
    int collision = 0;
    int timeout = 0;
    int stall = 0;
    int error = 0;

    void add(Outcome o) {
        switch (o) {
            case Outcome::Goal: ++goal; break;
            case Outcome::Collision: ++collision; break;
            case Outcome::Timeout: ++timeout; break;
            case Outcome::Stall: ++stall; break;
            case Outcome::Error: ++error; break;
        }
    }
};

// Paired comparison of two fields over seeded integral-curve batches. Only
// pairs where both curves reach the goal (and are long enough to carry
// curvature metrics) enter the statistics; outcome counts cover every run.
struct CurveCompareResult {
    int n = 0;
    int pairs_compared = 0;
    int pairs_degenerate = 0;
    OutcomeCounts outcomes_a, outcomes_b;
    std::vector<MetricComparison> metrics;
};

inline CurveCompareResult compare_curve_batches(
    const Environment& env, const GuidanceField& field_a,
    const GuidanceField& field_b, int n, std::uint64_t seed,
    const CurveBatchOptions& opts = {}, double resample_ds = 1e-2) {
    CurveCompareResult out;
    out.n = n;
    std::vector<double> len_a, len_b, bend_a, bend_b, turn_a, turn_b, max_a,
        max_b;
    batch_curves(env, field_a, field_b, n, seed, opts,
                 [&](int, Vec2, const CurveResult& a, const CurveResult& b) {
                     out.outcomes_a.add(a.outcome);
                     out.outcomes_b.add(b.outcome);
                     if (a.outcome != Outcome::Goal ||
                         b.outcome != Outcome::Goal) {
                         return;
                     }
                     PathMetrics ma, mb;
                     try {
                         ma = path_metrics(a.points, resample_ds);
                         mb = path_metrics(b.points, resample_ds);
                     } catch (const DegeneratePath&) {
                         ++out.pairs_degenerate;
                         return;
                     }
                     ++out.pairs_compared;
                     len_a.push_back(ma.path_length);
                     len_b.push_back(mb.path_length);
                     bend_a.push_back(ma.total_bending);
                     bend_b.push_back(mb.total_bending);
                     turn_a.push_back(ma.total_turning);
                     turn_b.push_back(mb.total_turning);
                     max_a.push_back(ma.max_curvature);
                     max_b.push_back(mb.max_curvature);
                 });
    out.metrics.push_back(compare_metric("path_length", len_a, len_b));
    out.metrics.push_back(compare_metric("total_bending", bend_a, bend_b));
    out.metrics.push_back(compare_metric("total_turning", turn_a, turn_b));
    out.metrics.push_back(compare_metric("max_curvature", max_a, max_b));
    return out;
}

// Paired comparison over seeded closed-loop runs. joint_wins counts pairs
// where field a strictly beats field b on arrival time and angular effort at
// once.
struct RunCompareResult {
    int n = 0;
    int pairs_compared = 0;
    int joint_wins = 0;
    OutcomeCounts outcomes_a, outcomes_b;
    std::vector<MetricComparison> metrics;
};

inline RunCompareResult compare_run_batches(const Environment& env,
                                            const GuidanceField& field_a,
                                            const GuidanceField& field_b,
                                            int n, std::uint64_t seed,
                                            const SimConfig& base) {
    RunCompareResult out;
    out.n = n;
    std::vector<double> time_a, time_b, len_a, len_b, eff_a, eff_b, sat_a,
        sat_b;
    batch_runs(env, field_a, field_b, n, seed, base,
               [&](int, const UnicycleState&, const Trajectory& a,
                   const Trajectory& b) {
                   out.outcomes_a.add(a.outcome);
                   out.outcomes_b.add(b.outcome);
                   if (a.outcome != Outcome::Goal ||
                       b.outcome != Outcome::Goal) {
                       return;
                   }
                   ControlMetrics ma = control_metrics(a);
                   ControlMetrics mb = control_metrics(b);
                   ++out.pairs_compared;
                   if (ma.arrival_time < mb.arrival_time &&
                       ma.angular_effort < mb.angular_effort) {
                       ++out.joint_wins;
                   }
                   time_a.push_back(ma.arrival_time);
                   time_b.push_back(mb.arrival_time);
                   len_a.push_back(ma.path_length);
                   len_b.push_back(mb.path_length);
                   eff_a.push_back(ma.angular_effort);
                   eff_b.push_back(mb.angular_effort);
                   sat_a.push_back(ma.time_saturated_pct);
                   sat_b.push_back(mb.time_saturated_pct);
               });
    out.metrics.push_back(compare_metric("arrival_time", time_a, time_b));
    out.metrics.push_back(compare_metric("path_length", len_a, len_b));
    out.metrics.push_back(compare_metric("angular_effort", eff_a, eff_b));
    out.metrics.push_back(
        compare_metric("time_saturated_pct", sat_a, sat_b));
    return out;
}

} // namespace vfnav
