#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vfnav {

// Base class for every error raised by the library. Callers that do not care
// about the specific failure can catch this one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data fails a structural precondition (duplicate vertices, non-simple
// polygon, zero-area triangle, malformed file contents).
struct DegenerateInput : Error {
    using Error::Error;
};

// A file could not be parsed into the expected structure.
struct ParseError : Error {
    using Error::Error;
};

// The triangulator could not produce a valid constrained triangulation.
struct TriangulationFailure : Error {
    using Error::Error;
};

// A loaded mesh violates a mesh invariant (bad indices, inverted triangle,
// inconsistent adjacency, missing constrained edge).
struct MeshInvalid : Error {
    using Error::Error;
};

// The goal point lies in no triangle of the mesh.
struct GoalOutsideMesh : Error {
    using Error::Error;
};

// A plan covers no triangle besides the goal triangle, so there is nothing
// to optimize.
struct EmptyPlan : Error {
    using Error::Error;
};

// The iterative solver hit its iteration budget before reaching the requested
// residual. Carries the best iterate so callers can inspect how close it got.
struct NotConverged : Error {
    std::vector<double> best_alpha;
    double residual = 0.0;
    int iterations = 0;

    NotConverged(const std::string& msg, std::vector<double> alpha, double res,
                 int iters)
        : Error(msg), best_alpha(std::move(alpha)), residual(res),
          iterations(iters) {}
};

// A query point lies outside the triangulated free space (or in a cell the
// plan does not cover).
struct OutsideFreeSpace : Error {
    using Error::Error;
};

// A query point coincides with a mesh vertex, where the blended field has no
// single-valued direction.
struct VertexSingularity : Error {
    using Error::Error;
};

// A simulation start state is outside free space.
struct StartNotFree : Error {
    using Error::Error;
};

// Rejection sampling failed to find enough free-space points.
struct SamplingExhausted : Error {
    using Error::Error;
};

// A trajectory metric that requires goal arrival was asked of a trajectory
// that did not arrive.
struct NotArrived : Error {
    using Error::Error;
};

// A path is too short or too degenerate to carry curvature metrics.
struct DegeneratePath : Error {
    using Error::Error;
};

// Paired statistics were requested for samples of different length.
struct LengthMismatch : Error {
    using Error::Error;
};

} // namespace vfnav
