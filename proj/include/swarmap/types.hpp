#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swarmap {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

// Row-major cell index into a GridSpec.
using CellIndex = std::size_t;

// Error hierarchy. Everything derives from swarmap::error so callers that only
// care about "something went wrong in the library" can catch one type.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct out_of_domain_error : error {
    using error::error;
};

struct singularity_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

struct numerical_error : error {
    using error::error;
};

struct degenerate_input_error : error {
    using error::error;
};

struct dimension_error : error {
    using error::error;
};

}  // namespace swarmap
