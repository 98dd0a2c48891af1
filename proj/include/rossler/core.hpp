#pragma once

// Basic value types shared across the library: 3-vectors, 3x3 matrices,
// the (a,b,c) parameter triple and the error hierarchy.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rossler {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(const Vec3& v) {
  return std::max({std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)});
}

inline bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Row-major 3x3 matrix; only the handful of operations the library needs.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  std::array<double, 3>& operator[](int i) { return m[i]; }
  const std::array<double, 3>& operator[](int i) const { return m[i]; }

  Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

  Vec3 operator*(const Vec3& v) const {
    return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
  }

  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }

  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  // Sum of the principal 2x2 minors (second elementary symmetric function
  // of the eigenvalues).
  double minor_sum() const {
    return m[1][1] * m[2][2] - m[1][2] * m[2][1] +
           m[0][0] * m[2][2] - m[0][2] * m[2][0] +
           m[0][0] * m[1][1] - m[0][1] * m[1][0];
  }
};

// Parameter triple of the vector field; the admissible range
// a,b in (0,1), c > 1 is checked by check_assumptions, not the ctor.
struct Params {
  double a = 0.2;
  double b = 0.2;
  double c = 5.7;
};

// --- error hierarchy ----------------------------------------------------
//
// Domain errors are caller mistakes (bad parameters, empty inputs);
// numerical errors are runtime failures of an otherwise valid request.

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct DegenerateParams : DomainError {
  using DomainError::DomainError;
};

struct OutOfRange : DomainError {
  using DomainError::DomainError;
};

struct EmptyPerSet : DomainError {
  using DomainError::DomainError;
};

struct NotSaddleFocus : DomainError {
  using DomainError::DomainError;
};

struct IncomparableDepth : DomainError {
  using DomainError::DomainError;
};

struct StepSizeUnderflow : NumericalError {
  using NumericalError::NumericalError;
};

struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct FrontBlowup : NumericalError {
  using NumericalError::NumericalError;
};

struct BranchDomainError : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateTriangle : NumericalError {
  using NumericalError::NumericalError;
};

struct LeftInvariantInterval : NumericalError {
  using NumericalError::NumericalError;
};

struct EmptyTrace : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace rossler
