#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vfnav/errors.hpp"
#include "vfnav/geometry.hpp"
#include "vfnav/simulator.hpp"

namespace vfnav {

struct PathMetrics {
    double path_length = 0.0;    // m, of the original polyline
    double max_curvature = 0.0;  // 1/m
    double total_bending = 0.0;  // integral of curvature squared
    double total_turning = 0.0;  // integral of |curvature|
};

namespace detail {

// Points at arclengths 0, ds, 2ds, ... along the polyline.
inline std::vector<Vec2> resample_uniform(const std::vector<Vec2>& poly,
                                          double ds) {
    std::vector<Vec2> out;
    out.push_back(poly.front());
    double carried = 0.0;  // arclength already consumed on current segment
    std::size_t seg = 0;
    while (seg + 1 < poly.size()) {
        Vec2 a = poly[seg], b = poly[seg + 1];
        double len = distance(a, b);
        if (carried + ds <= len) {
            carried += ds;
            out.push_back(a + (carried / len) * (b - a));
        } else {
            carried -= len;
            ++seg;
        }
    }
    return out;
}

} // namespace detail

// Curvature metrics from headings of a uniform-arclength resampling:
// kappa_i = wrapped heading change / ds. Length is that of the original
// polyline. Throws DegeneratePath when the polyline is shorter than 2 ds.
inline PathMetrics path_metrics(const std::vector<Vec2>& polyline,
                                double resample_ds = 1e-2) {
    if (polyline.size() < 2) {
        throw DegeneratePath("polyline needs at least 2 points");
    }
    PathMetrics m;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        m.path_length += distance(polyline[i], polyline[i + 1]);
    }
    if (m.path_length < 2.0 * resample_ds) {
        throw DegeneratePath("polyline shorter than two resampling steps");
    }

    std::vector<Vec2> pts = detail::resample_uniform(polyline, resample_ds);
    std::vector<double> headings;
    headings.reserve(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Vec2 d = pts[i + 1] - pts[i];
        headings.push_back(std::atan2(d.y, d.x));
    }
    auto wrap = [](double a) {
        double r = std::remainder(a, 2.0 * kPi);
        if (r <= -kPi) r = kPi;
        return r;
    };
    for (std::size_t i = 0; i + 1 < headings.size(); ++i) {
        double kappa = wrap(headings[i + 1] - headings[i]) / resample_ds;
        m.max_curvature = std::max(m.max_curvature, std::abs(kappa));
        m.total_bending += kappa * kappa * resample_ds;
        m.total_turning += std::abs(kappa) * resample_ds;
    }
    return m;
}

struct ControlMetrics {
    double arrival_time = 0.0;       // s
    double path_length = 0.0;        // m
    double average_speed = 0.0;      // m/s
    double angular_effort = 0.0;     // integral of omega^2 over time
    double time_saturated_pct = 0.0; // % of steps at the omega limit
};

// Control-performance metrics of a goal-reaching trajectory. Throws
// NotArrived for any other outcome.
inline ControlMetrics control_metrics(const Trajectory& traj) {
    if (traj.outcome != Outcome::Goal) {
        throw NotArrived("control metrics require a goal-reaching trajectory");
    }
    ControlMetrics m;
    m.arrival_time = traj.arrival_time;
    long saturated = 0;
    for (std::size_t i = 0; i < traj.rows.size(); ++i) {
        const auto& r = traj.rows[i];
        if (r.saturated) ++saturated;
        if (i + 1 < traj.rows.size()) {
            const auto& n = traj.rows[i + 1];
            m.path_length += std::hypot(n.x - r.x, n.y - r.y);
            m.angular_effort += 0.5 * (r.omega * r.omega + n.omega * n.omega) *
                                (n.t - r.t);
        }
    }
    m.average_speed =
        m.arrival_time > 0.0 ? m.path_length / m.arrival_time : 0.0;
    m.time_saturated_pct =
        traj.rows.empty()
            ? 0.0
            : 100.0 * static_cast<double>(saturated) / traj.rows.size();
    return m;
}

struct MetricComparison {
    std::string metric;
    double mean_a = 0.0;  // first (candidate) method
    double std_a = 0.0;
    double mean_b = 0.0;  // second (reference) method
    double std_b = 0.0;
    double improvement_pct = 0.0;  // (mean_b - mean_a)/mean_b * 100
    double win_rate_pct = 0.0;     // pairs where a < b; ties count half
};

// Paired lower-is-better comparison of two equal-length samples.
inline MetricComparison compare_metric(const std::string& name,
                                       const std::vector<double>& a,
                                       const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("paired samples differ in length");
    }
    MetricComparison c;
    c.metric = name;
    std::size_t n = a.size();
    if (n == 0) {
        c.win_rate_pct = 0.0;
        return c;
    }
    auto mean_std = [](const std::vector<double>& xs, double& mean,
                       double& sd) {
        mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        sd = 0.0;
        if (xs.size() > 1) {
            for (double x : xs) sd += (x - mean) * (x - mean);
            sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
        }
    };
    mean_std(a, c.mean_a, c.std_a);
    mean_std(b, c.mean_b, c.std_b);
    c.improvement_pct =
        c.mean_b != 0.0 ? (c.mean_b - c.mean_a) / c.mean_b * 100.0 : 0.0;
    double wins = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < b[i]) wins += 1.0;
        else if (a[i] == b[i]) wins += 0.5;
    }
    c.win_rate_pct = 100.0 * wins / static_cast<double>(n);
    return c;
}

} // namespace vfnav
