#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "vfnav/cell_field.hpp"
#include "vfnav/environment.hpp"
#include "vfnav/errors.hpp"
#include "vfnav/geometry.hpp"
#include "vfnav/simulator.hpp"

namespace testsup {

// Eigenvalues of a dense symmetric matrix (row-major n x n) by cyclic Jacobi
// rotations, ascending. Independent of the solver under test.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a,
                                                 int n) {
    auto at = [&](int i, int j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        }
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                double phi =
                    0.5 * std::atan2(2.0 * at(p, q), at(q, q) - at(p, p));
                double c = std::cos(phi), s = std::sin(phi);
                for (int i = 0; i < n; ++i) {
                    double aip = at(i, p), aiq = at(i, q);
                    at(i, p) = c * aip - s * aiq;
                    at(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double api = at(p, i), aqi = at(q, i);
                    at(p, i) = c * api - s * aqi;
                    at(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Convex polygon workspace (vertices on a circle, no obstacles) whose
// triangulation has sides - 2 cells, so the routed problem stays tiny.
inline vfnav::Environment convex_polygon_env(vfnav::Rng& rng, int sides) {
    vfnav::Environment env;
    double radius = rng.uniform(1.5, 4.0);
    std::vector<double> angles;
    for (int tries = 0; tries < 1000; ++tries) {
        angles.clear();
        for (int i = 0; i < sides; ++i) {
            angles.push_back(rng.uniform(0.0, 2.0 * vfnav::kPi));
        }
        std::sort(angles.begin(), angles.end());
        double min_gap = angles.front() + 2.0 * vfnav::kPi - angles.back();
        for (int i = 0; i + 1 < sides; ++i) {
            min_gap = std::min(min_gap, angles[i + 1] - angles[i]);
        }
        if (min_gap > 0.35) break;
    }
    for (double a : angles) {
        env.workspace.push_back(
            {radius * std::cos(a), radius * std::sin(a)});
    }
    vfnav::Vec2 centroid{0.0, 0.0};
    for (vfnav::Vec2 p : env.workspace) centroid = centroid + p;
    centroid = centroid / static_cast<double>(sides);
    int toward = static_cast<int>(rng.uniform(0.0, sides - 1e-9));
    double t = rng.uniform(0.0, 0.5);
    env.goal = centroid + t * (env.workspace[toward] - centroid);
    return env;
}

// Square workspace with axis-aligned rectangular obstacles dropped on a grid,
// leaving one free cell holding the goal and wide passages everywhere.
inline vfnav::Environment random_grid_env(vfnav::Rng& rng, int grid = 3,
                                          double cell = 3.0,
                                          double p_block = 0.45) {
    vfnav::Environment env;
    double side = grid * cell;
    env.workspace = {{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
    int goal_cell = static_cast<int>(rng.uniform(0.0, grid * grid - 1e-9));
    for (int gy = 0; gy < grid; ++gy) {
        for (int gx = 0; gx < grid; ++gx) {
            int id = gy * grid + gx;
            if (id == goal_cell || rng.uniform() >= p_block) continue;
            double x0 = gx * cell + rng.uniform(0.7, 1.1);
            double y0 = gy * cell + rng.uniform(0.7, 1.1);
            double x1 = (gx + 1) * cell - rng.uniform(0.7, 1.1);
            double y1 = (gy + 1) * cell - rng.uniform(0.7, 1.1);
            env.obstacles.push_back(
                {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
        }
    }
    int gx = goal_cell % grid, gy = goal_cell / grid;
    env.goal = {(gx + 0.5) * cell + rng.uniform(-0.3, 0.3),
                (gy + 0.5) * cell + rng.uniform(-0.3, 0.3)};
    return env;
}

// Exact minimum of the QP objective over the uniform lattice with `points`
// values per variable, by full enumeration (dimensions up to 3). The inner
// dimension is evaluated in Horner form of the quadratic; every lattice point
// is still visited.
inline double lattice_minimum(const vfnav::QpProblem& qp, int points) {
    int n = qp.size;
    double h = 1.0 / (points - 1);
    auto H = [&](int i, int j) { return qp.h(i, j); };
    const std::vector<double>& f = qp.linear;
    double best = std::numeric_limits<double>::infinity();
    if (n == 1) {
        for (int i = 0; i < points; ++i) {
            double a = i * h;
            best = std::min(best, (0.5 * H(0, 0) * a + f[0]) * a);
        }
    } else if (n == 2) {
        for (int i = 0; i < points; ++i) {
            double a0 = i * h;
            double c0 = 0.5 * H(0, 0) * a0 * a0 + f[0] * a0;
            double c1 = H(0, 1) * a0 + f[1];
            double c2 = 0.5 * H(1, 1);
            for (int j = 0; j < points; ++j) {
                double a1 = j * h;
                best = std::min(best, c0 + a1 * (c1 + a1 * c2));
            }
        }
    } else if (n == 3) {
        double c2 = 0.5 * H(2, 2);
        for (int i = 0; i < points; ++i) {
            double a0 = i * h;
            double base0 = 0.5 * H(0, 0) * a0 * a0 + f[0] * a0;
            for (int j = 0; j < points; ++j) {
                double a1 = j * h;
                double c0 = base0 + H(0, 1) * a0 * a1 +
                            0.5 * H(1, 1) * a1 * a1 + f[1] * a1;
                double c1 = H(0, 2) * a0 + H(1, 2) * a1 + f[2];
                for (int kk = 0; kk < points; ++kk) {
                    double a2 = kk * h;
                    best = std::min(best, c0 + a2 * (c1 + a2 * c2));
                }
            }
        }
    } else {
        throw vfnav::Error("lattice oracle supports up to 3 variables");
    }
    return best;
}

// Scratch directory for file-based tests, unique per process.
inline std::filesystem::path scratch_dir() {
    static std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("vfnav_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

// Runs the navigation CLI with the given argument string, capturing stdout
// and stderr together.
inline CliResult run_cli(const std::string& args) {
    CliResult r;
#ifdef VFNAV_CLI_PATH
    std::string cmd = std::string(VFNAV_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
        r.output.append(buf.data(), got);
    }
    int status = ::pclose(pipe);
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
#else
    (void)args;
#endif
    return r;
}

} // namespace testsup
