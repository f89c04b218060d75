#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "asgkit/asg.hpp"
#include "asgkit/model.hpp"

namespace asgkit::scene3d {

// 4x4 affine transform, row-major storage, column-vector convention
// (points transform as p' = M * p; statements post-multiply).
struct Mat4 {
    std::array<double, 16> m{};

    static Mat4 identity();
    static Mat4 scaling(double sx, double sy, double sz);
    static Mat4 translation(double tx, double ty, double tz);
    // Axis-angle rotation; the axis is normalized, the angle is in degrees.
    static Mat4 rotation(double ax, double ay, double az, double angle_deg);

    Mat4 operator*(const Mat4& other) const;
    std::array<double, 3> apply(double x, double y, double z) const;

    bool operator==(const Mat4&) const = default;
};

struct Rgba {
    double r = 0, g = 0, b = 0, a = 1;

    bool operator==(const Rgba&) const = default;
};

struct CubeInstance {
    Mat4 transform;  // object-to-world for a unit cube centered at the origin
    Rgba color;

    bool operator==(const CubeInstance&) const = default;
};

struct EvalOptions {
    // When set, scope exit restores the color as well as the matrix.
    bool scoped_color = false;
};

// The built-in 3D object specification language model.
ModelSet build_scene3d_model();

// Hooks referenced by the model's @Constraint annotations.
ConstraintRegistry make_constraint_registry();

// Executes every Scene of a resolved, constraint-checked graph with a fresh
// state (identity matrix, opaque black, no parameter) and returns the cubes
// in emission order.  Throws Error{NextOutsideInvocation, NegativeParam,
// EvalError}.
std::vector<CubeInstance> evaluate(const InstanceGraph& graph,
                                   const EvalOptions& options = {});

// Wavefront OBJ: 8 transformed vertices and 12 triangles per cube, 1-based
// indexing, per-cube color as a comment line.
void export_obj(const std::vector<CubeInstance>& cubes, std::ostream& out);

// `[{"transform": [16 numbers, row-major], "color": [r,g,b,a]}, ...]`
void export_json(const std::vector<CubeInstance>& cubes, std::ostream& out);

}  // namespace asgkit::scene3d
