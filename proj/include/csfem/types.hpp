#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace csfem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using VectorX = Eigen::VectorXd;

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scalar field on the ambient space, with the derivatives needed by the
// tangential calculus identities.
struct AmbientField {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> grad;
  std::function<Mat3(const Vec3&)> hess;
};

// Exact solution used for error measurement (value + ambient gradient).
struct ExactSolution {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> grad;
};

struct Box2 {
  Vec2 lo{0, 0};
  Vec2 hi{0, 0};
  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol &&
           p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
  }
};

}  // namespace csfem
