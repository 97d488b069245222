#pragma once

#include <algorithm>
#include <cmath>

#include "vfnav/guidance.hpp"

namespace vfnav {

// Maps any finite angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r = kPi;
    return r;
}

enum class SpeedLaw { Linear, Cosine };

struct ControllerParams {
    double v_max = 1.0;       // m/s
    double omega_max = 1.0;   // rad/s
    double k = 1.0;           // 1/s, heading feedback gain
    double eps_v = kPi / 4.0; // rad, linear-law cutoff, in (0, pi/2]
    SpeedLaw v_law = SpeedLaw::Linear;
};

// Forward speed laws as functions of the wrapped heading error. The linear
// law parks the robot once the error reaches eps_v; the cosine law admits
// backward motion for errors beyond pi/2.
inline double linear_v(double phi, const ControllerParams& p) {
    return p.v_max * std::max(0.0, 1.0 - std::abs(phi) / p.eps_v);
}

inline double cosine_v(double phi, const ControllerParams& p) {
    return p.v_max * std::cos(phi);
}

inline double saturate(double u, double u_max) {
    return std::clamp(u, -u_max, u_max);
}

struct UnicycleState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

struct ControlOutput {
    double v = 0.0;
    double omega = 0.0;
    double phi = 0.0;          // wrapped heading error theta - theta_d
    double theta_d = 0.0;      // field heading at the robot position
    double theta_d_dot = 0.0;  // feedforward rate of theta_d along the motion
    bool saturated = false;
    bool valid = true;         // false when the field had no direction here
    int cell = -1;
};

// One evaluation of the steering law: align the heading with the field via
// saturated feedback plus a feedforward term for the field's spatial
// variation, and scale forward speed down as the heading error grows. At a
// field singularity (query on a mesh vertex) the output is a flagged full
// stop rather than a guess.
inline ControlOutput compute_control(const UnicycleState& s,
                                     const GuidanceField& field,
                                     const ControllerParams& p,
                                     int hint = -1) {
    ControlOutput out;
    GuidanceField::Sample sample;
    try {
        sample = field.eval({s.x, s.y}, hint);
    } catch (const VertexSingularity&) {
        out.valid = false;
        return out;
    }
    out.cell = sample.tri;
    out.theta_d = std::atan2(sample.dir.y, sample.dir.x);
    out.phi = wrap_angle(s.theta - out.theta_d);
    out.v = p.v_law == SpeedLaw::Linear ? linear_v(out.phi, p)
                                        : cosine_v(out.phi, p);

    auto grad = field.heading_gradient({s.x, s.y}, sample.tri);
    out.theta_d_dot =
        out.v * (grad.ddx * std::cos(s.theta) + grad.ddy * std::sin(s.theta));

    double u = out.theta_d_dot - p.k * std::tanh(out.phi);
    out.omega = saturate(u, p.omega_max);
    out.saturated = std::abs(u) > p.omega_max;
    return out;
}

} // namespace vfnav
