#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "vfnav/errors.hpp"
#include "vfnav/mesh.hpp"
#include "vfnav/plan.hpp"

namespace vfnav {

enum class FieldMethod { Qp, Baseline };

inline const char* to_string(FieldMethod m) {
    return m == FieldMethod::Qp ? "qp" : "baseline";
}

// Box-constrained quadratic program over one interpolation parameter per
// routed cell. Cell t gets V_c(t) = base + alpha * span, a point on the
// chord between its two exit-cone boundary vectors; the objective penalizes
// the mismatch between each cell vector and its successor's cell vector,
// which aligns the field along every route to the goal.
//
// J(alpha) = 0.5 alpha' H alpha + f' alpha + constant, 0 <= alpha <= 1,
// with H positive semidefinite by construction (sum of squared affine terms).
struct QpProblem {
    int size = 0;
    std::vector<int> var_tri;      // variable -> triangle
    std::vector<int> tri_var;      // triangle -> variable, -1 if none
    std::vector<Vec2> base;        // boundary vector toward the higher vertex
    std::vector<Vec2> span;        // (toward lower) - (toward higher)
    std::vector<double> hessian;   // row-major size x size
    std::vector<double> linear;

    double& h(int i, int j) { return hessian[i * size + j]; }
    double h(int i, int j) const { return hessian[i * size + j]; }

    Vec2 cell_vector(int var, double alpha) const {
        return base[var] + alpha * span[var];
    }

    // The constant term of the expanded squared norms is dropped, so this can
    // be negative; only differences of objective values are meaningful.
    double objective(const std::vector<double>& a) const {
        double quad = 0.0, lin = 0.0;
        for (int i = 0; i < size; ++i) {
            double row = 0.0;
            for (int j = 0; j < size; ++j) row += h(i, j) * a[j];
            quad += a[i] * row;
            lin += linear[i] * a[i];
        }
        return 0.5 * quad + lin;
    }

    void gradient(const std::vector<double>& a, std::vector<double>& g) const {
        g.assign(size, 0.0);
        for (int i = 0; i < size; ++i) {
            double row = 0.0;
            for (int j = 0; j < size; ++j) row += h(i, j) * a[j];
            g[i] = row + linear[i];
        }
    }
};

// Builds the alignment QP for every routed non-goal cell. Cells whose
// successor is the goal triangle couple to a fixed target: the unit vector
// from their centroid to the goal point. Throws EmptyPlan when no cell is
// routed.
inline QpProblem assemble_qp(const TriMesh& m, const RoutePlan& plan) {
    QpProblem qp;
    int n = m.triangle_count();
    qp.tri_var.assign(n, -1);
    for (int t = 0; t < n; ++t) {
        if (t != plan.goal_triangle && plan.successor[t] >= 0) {
            qp.tri_var[t] = static_cast<int>(qp.var_tri.size());
            qp.var_tri.push_back(t);
        }
    }
    qp.size = static_cast<int>(qp.var_tri.size());
    if (qp.size == 0) {
        throw EmptyPlan("no routed cells besides the goal triangle");
    }
    qp.base.resize(qp.size);
    qp.span.resize(qp.size);
    qp.hessian.assign(static_cast<std::size_t>(qp.size) * qp.size, 0.0);
    qp.linear.assign(qp.size, 0.0);

    for (int v = 0; v < qp.size; ++v) {
        auto [b_lo, b_hi] = boundary_vectors(m, plan, qp.var_tri[v]);
        qp.base[v] = b_hi;
        qp.span[v] = b_lo - b_hi;
    }

    for (int v = 0; v < qp.size; ++v) {
        int t = qp.var_tri[v];
        int succ = plan.successor[t];
        int sv = qp.tri_var[succ];
        if (sv >= 0) {
            Vec2 c = qp.base[v] - qp.base[sv];
            qp.h(v, v) += 2.0 * dot(qp.span[v], qp.span[v]);
            qp.h(sv, sv) += 2.0 * dot(qp.span[sv], qp.span[sv]);
            qp.h(v, sv) -= 2.0 * dot(qp.span[v], qp.span[sv]);
            qp.h(sv, v) -= 2.0 * dot(qp.span[v], qp.span[sv]);
            qp.linear[v] += 2.0 * dot(qp.span[v], c);
            qp.linear[sv] -= 2.0 * dot(qp.span[sv], c);
        } else {
            Vec2 target = normalized(plan.goal - m.centroids[t]);
            Vec2 c = qp.base[v] - target;
            qp.h(v, v) += 2.0 * dot(qp.span[v], qp.span[v]);
            qp.linear[v] += 2.0 * dot(qp.span[v], c);
        }
    }
    return qp;
}

struct SolveOptions {
    double tolerance = 1e-8;   // projected-gradient residual, infinity norm
    int max_iterations = 50000;
    std::vector<double> start;      // feasible warm start; empty means 0.5
    bool record_objective = false;  // keep the per-iteration objective trace
};

struct QpSolution {
    std::vector<double> alpha;
    double objective = 0.0;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> objective_history;
};

namespace detail {

// Largest eigenvalue estimate of the (symmetric PSD) Hessian, used for the
// safeguard step length.
inline double spectral_norm(const QpProblem& qp) {
    int n = qp.size;
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n);
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += qp.h(i, j) * v[j];
            w[i] = s;
        }
        double nw = 0.0;
        for (double x : w) nw += x * x;
        nw = std::sqrt(nw);
        if (nw <= 0.0) return 0.0;
        lambda = nw;
        for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    return lambda;
}

} // namespace detail

// Projected gradient descent with Barzilai-Borwein steps and a monotone
// safeguard. The feasible set is the unit box, so projection is a clamp.
// Throws NotConverged (carrying the best iterate) when the iteration budget
// runs out before the residual target.
inline QpSolution solve_qp(const QpProblem& qp, SolveOptions opts = {}) {
    int n = qp.size;
    double lip = detail::spectral_norm(qp);
    double safe_step = lip > 0.0 ? 1.0 / lip : 1.0;

    std::vector<double> alpha(n, 0.5);
    if (!opts.start.empty()) {
        alpha = opts.start;
        for (double& a : alpha) a = std::clamp(a, 0.0, 1.0);
    }
    std::vector<double> grad(n), prev_alpha(n), prev_grad(n), trial(n);
    qp.gradient(alpha, grad);
    double value = qp.objective(alpha);

    QpSolution sol;
    if (opts.record_objective) sol.objective_history.push_back(value);

    auto residual_of = [&](const std::vector<double>& a,
                           const std::vector<double>& g) {
        double r = 0.0;
        for (int i = 0; i < n; ++i) {
            double proj = std::clamp(a[i] - g[i], 0.0, 1.0);
            r = std::max(r, std::abs(a[i] - proj));
        }
        return r;
    };

    double step = safe_step;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        double res = residual_of(alpha, grad);
        if (res <= opts.tolerance) {
            sol.alpha = alpha;
            sol.objective = qp.objective(alpha);
            sol.residual = res;
            sol.iterations = iter;
            return sol;
        }

        if (iter > 0) {
            double ss = 0.0, sy = 0.0;
            for (int i = 0; i < n; ++i) {
                double s = alpha[i] - prev_alpha[i];
                double y = grad[i] - prev_grad[i];
                ss += s * s;
                sy += s * y;
            }
            step = sy > 0.0 ? ss / sy : safe_step;
            step = std::clamp(step, 1e-3 * safe_step, 1e3 * safe_step);
        }

        for (int i = 0; i < n; ++i) {
            trial[i] = std::clamp(alpha[i] - step * grad[i], 0.0, 1.0);
        }
        double trial_value = qp.objective(trial);
        if (trial_value > value + 1e-12 * (1.0 + std::abs(value))) {
            for (int i = 0; i < n; ++i) {
                trial[i] =
                    std::clamp(alpha[i] - safe_step * grad[i], 0.0, 1.0);
            }
            trial_value = qp.objective(trial);
        }

        prev_alpha.swap(alpha);
        prev_grad.swap(grad);
        alpha = trial;
        value = trial_value;
        qp.gradient(alpha, grad);
        if (opts.record_objective) sol.objective_history.push_back(value);
    }

    double res = residual_of(alpha, grad);
    throw NotConverged("projected gradient hit the iteration budget", alpha,
                       res, opts.max_iterations);
}

// Final per-triangle field parameters. alpha is indexed by triangle (NaN for
// the goal triangle and unreachable cells; empty for the baseline method).
// cell_dir holds unit cell vectors for routed cells and zero elsewhere; the
// goal cell's direction is position dependent and lives in the evaluator.
struct CellFieldAssignment {
    FieldMethod method = FieldMethod::Qp;
    std::vector<double> alpha;
    std::vector<Vec2> cell_dir;
    double objective = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Interior clamp keeping every optimized cell vector strictly inside its exit
// cone, so the continuous field never grazes a cone boundary exactly.
inline constexpr double kAlphaMargin = 1e-6;

inline CellFieldAssignment qp_assignment(const TriMesh& m,
                                         const RoutePlan& plan,
                                         SolveOptions opts = {}) {
    QpProblem qp = assemble_qp(m, plan);
    QpSolution sol = solve_qp(qp, opts);

    CellFieldAssignment out;
    out.method = FieldMethod::Qp;
    out.objective = sol.objective;
    out.residual = sol.residual;
    out.iterations = sol.iterations;
    out.alpha.assign(m.triangle_count(),
                     std::numeric_limits<double>::quiet_NaN());
    out.cell_dir.assign(m.triangle_count(), Vec2{0.0, 0.0});
    for (int v = 0; v < qp.size; ++v) {
        double a = std::clamp(sol.alpha[v], kAlphaMargin, 1.0 - kAlphaMargin);
        out.alpha[qp.var_tri[v]] = a;
        out.cell_dir[qp.var_tri[v]] = normalized(qp.cell_vector(v, a));
    }
    return out;
}

// Reference method: each routed cell points from its centroid at the midpoint
// of its exit face. Reported objective is the summed squared mismatch between
// each cell vector and its coupling target (the successor's vector, or the
// goalward unit vector when the successor is the goal cell).
inline CellFieldAssignment baseline_assignment(const TriMesh& m,
                                               const RoutePlan& plan) {
    CellFieldAssignment out;
    out.method = FieldMethod::Baseline;
    out.cell_dir.assign(m.triangle_count(), Vec2{0.0, 0.0});
    for (int t = 0; t < m.triangle_count(); ++t) {
        if (t == plan.goal_triangle || plan.successor[t] < 0) continue;
        auto [lo, hi] = exit_face_vertices(m, plan, t);
        Vec2 midpoint = 0.5 * (m.vertices[lo] + m.vertices[hi]);
        out.cell_dir[t] = normalized(midpoint - m.centroids[t]);
    }
    double j = 0.0;
    for (int t = 0; t < m.triangle_count(); ++t) {
        if (t == plan.goal_triangle || plan.successor[t] < 0) continue;
        int succ = plan.successor[t];
        Vec2 target = succ == plan.goal_triangle
                          ? normalized(plan.goal - m.centroids[t])
                          : out.cell_dir[succ];
        j += norm_sq(out.cell_dir[t] - target);
    }
    out.objective = j;
    return out;
}

} // namespace vfnav
