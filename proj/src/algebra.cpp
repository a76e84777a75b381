#include "lieplan/algebra.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lieplan/scalar.hpp"

namespace lieplan {

std::string_view to_string(Group g) {
  switch (g) {
    case Group::SE2:
      return "SE2";
    case Group::SO3:
      return "SO3";
    case Group::SE2xR:
      return "SE2xR";
  }
  return "?";
}

Group parse_group(std::string_view s) {
  if (s == "SE2") return Group::SE2;
  if (s == "SO3") return Group::SO3;
  if (s == "SE2xR") return Group::SE2xR;
  throw std::invalid_argument("unknown group '" + std::string(s) + "'");
}

Group group_of(const AlgebraVector& v) { return static_cast<Group>(v.index()); }
Group group_of(const GroupElement& g) { return static_cast<Group>(g.index()); }

Se2Pose make_se2_pose(double theta, double x, double y) { return {wrap_angle(theta), x, y}; }

Se2RPose make_se2r_pose(double theta, double x, double y, double z) {
  return {wrap_angle(theta), x, y, z};
}

Se2Vector operator*(double s, const Se2Vector& v) { return {s * v.a, s * v.b, s * v.c}; }
So3Vector operator*(double s, const So3Vector& v) { return {s * v.a, s * v.b, s * v.c}; }
Se2RVector operator*(double s, const Se2RVector& v) {
  return {s * v.a, s * v.b, s * v.c, s * v.d};
}

AlgebraVector scale(double s, const AlgebraVector& v) {
  return std::visit([s](const auto& u) -> AlgebraVector { return s * u; }, v);
}

Se2Pose exp_se2(const Se2Vector& v, double t) {
  const double alpha = t * v.a;
  const double b = t * v.b;
  const double c = t * v.c;
  const double s = sinc(alpha);
  const double k = cosc(alpha);
  return make_se2_pose(alpha, s * b - k * c, k * b + s * c);
}

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Eigen::Vector3d to_eigen(const So3Vector& v) { return {v.a, v.b, v.c}; }
So3Vector from_eigen(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Rotation exp_so3(const So3Vector& v, double t) {
  const Eigen::Vector3d eta = t * to_eigen(v);
  const double n = eta.norm();
  const Eigen::Matrix3d k = hat(eta);
  return {Eigen::Matrix3d::Identity() + sinc(n) * k + cosc2(n) * (k * k)};
}

Rotation exp_unit_axis_so3(const So3Vector& v, double t) {
  const double norm = std::sqrt(v.a * v.a + v.b * v.b + v.c * v.c);
  if (std::abs(norm - 1.0) > 1e-9) {
    throw std::invalid_argument("exp_unit_axis_so3: axis is not unit length");
  }
  const double a = v.a, b = v.b, c = v.c;
  const double ct = std::cos(t), st = std::sin(t), vt = 1.0 - ct;
  Eigen::Matrix3d r;
  r << a * a + (1 - a * a) * ct, b * a * vt - c * st,     c * a * vt + b * st,
       a * b * vt + c * st,     b * b + (1 - b * b) * ct, c * b * vt - a * st,
       a * c * vt - b * st,     b * c * vt + a * st,     c * c + (1 - c * c) * ct;
  return {r};
}

Se2RPose exp_se2r(const Se2RVector& v, double t) {
  const Se2Pose p = exp_se2({v.a, v.b, v.c}, t);
  return {p.theta, p.x, p.y, t * v.d};
}

GroupElement exp_map(const AlgebraVector& v, double t) {
  return std::visit(
      [t](const auto& u) -> GroupElement {
        using V = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<V, Se2Vector>) return exp_se2(u, t);
        else if constexpr (std::is_same_v<V, So3Vector>) return exp_so3(u, t);
        else return exp_se2r(u, t);
      },
      v);
}

Se2Pose compose(const Se2Pose& g1, const Se2Pose& g2) {
  const double c = std::cos(g1.theta), s = std::sin(g1.theta);
  return make_se2_pose(g1.theta + g2.theta, g1.x + c * g2.x - s * g2.y,
                       g1.y + s * g2.x + c * g2.y);
}

Rotation compose(const Rotation& g1, const Rotation& g2) { return {g1.r * g2.r}; }

Se2RPose compose(const Se2RPose& g1, const Se2RPose& g2) {
  const Se2Pose p = compose(Se2Pose{g1.theta, g1.x, g1.y}, Se2Pose{g2.theta, g2.x, g2.y});
  return {p.theta, p.x, p.y, g1.z + g2.z};
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
  if (g1.index() != g2.index()) throw std::invalid_argument("compose: group mismatch");
  return std::visit(
      [&g2](const auto& a) -> GroupElement {
        using T = std::decay_t<decltype(a)>;
        return compose(a, std::get<T>(g2));
      },
      g1);
}

Se2Pose inverse(const Se2Pose& g) {
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  return make_se2_pose(-g.theta, -(c * g.x + s * g.y), -(-s * g.x + c * g.y));
}

Rotation inverse(const Rotation& g) { return {g.r.transpose()}; }

Se2RPose inverse(const Se2RPose& g) {
  const Se2Pose p = inverse(Se2Pose{g.theta, g.x, g.y});
  return {p.theta, p.x, p.y, -g.z};
}

GroupElement inverse(const GroupElement& g) {
  return std::visit([](const auto& a) -> GroupElement { return inverse(a); }, g);
}

GroupElement identity(Group g) {
  switch (g) {
    case Group::SE2:
      return Se2Pose{};
    case Group::SO3:
      return Rotation{};
    case Group::SE2xR:
      return Se2RPose{};
  }
  throw std::invalid_argument("identity: unknown group");
}

Se2Vector bracket(const Se2Vector& v1, const Se2Vector& v2) {
  return {0.0, v1.c * v2.a - v1.a * v2.c, v1.a * v2.b - v1.b * v2.a};
}

So3Vector bracket(const So3Vector& v1, const So3Vector& v2) {
  return from_eigen(to_eigen(v1).cross(to_eigen(v2)));
}

Se2RVector bracket(const Se2RVector& v1, const Se2RVector& v2) {
  return {0.0, v1.c * v2.a - v1.a * v2.c, v1.a * v2.b - v1.b * v2.a, 0.0};
}

AlgebraVector bracket(const AlgebraVector& v1, const AlgebraVector& v2) {
  if (v1.index() != v2.index()) throw std::invalid_argument("bracket: algebra mismatch");
  return std::visit(
      [&v2](const auto& a) -> AlgebraVector {
        using T = std::decay_t<decltype(a)>;
        return bracket(a, std::get<T>(v2));
      },
      v1);
}

AxisAngle axis_angle(const Rotation& rot) {
  const Eigen::Matrix3d& r = rot.r;
  const Eigen::Vector3d w = vee(r - r.transpose());  // 2 sin(angle) omega
  const double cos_angle = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::atan2(w.norm() / 2.0, cos_angle);
  if (angle < 1e-15) return {Eigen::Vector3d::UnitZ(), 0.0};

  Eigen::Vector3d omega;
  if (cos_angle > -0.5) {
    omega = w.normalized();
  } else {
    // omega omega^T = (sym(r) - cos I) / (1 - cos); take its dominant column.
    const Eigen::Matrix3d b =
        (0.5 * (r + r.transpose()) - cos_angle * Eigen::Matrix3d::Identity()) /
        (1.0 - cos_angle);
    Eigen::Index k = 0;
    b.diagonal().maxCoeff(&k);
    omega = b.col(k).normalized();
    if (w.norm() > 1e-12) {
      if (omega.dot(w) < 0.0) omega = -omega;
    } else {
      for (int i = 0; i < 3; ++i) {
        if (std::abs(omega(i)) > 1e-12) {
          if (omega(i) < 0.0) omega = -omega;
          break;
        }
      }
    }
  }
  return {omega, angle};
}

Eigen::Matrix3d matrix(const Se2Pose& g) {
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  Eigen::Matrix3d m;
  m << c, -s, g.x,
       s, c, g.y,
       0, 0, 1;
  return m;
}

Eigen::Matrix4d matrix(const Se2RPose& g) {
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  Eigen::Matrix4d m;
  m << c, -s, 0, g.x,
       s, c, 0, g.y,
       0, 0, 1, g.z,
       0, 0, 0, 1;
  return m;
}

Eigen::MatrixXd matrix(const GroupElement& g) {
  return std::visit(
      [](const auto& a) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Rotation>) return a.r;
        else return matrix(a);
      },
      g);
}

double pose_distance(const GroupElement& g1, const GroupElement& g2) {
  if (g1.index() != g2.index()) throw std::invalid_argument("pose_distance: group mismatch");
  return (matrix(g1) - matrix(g2)).norm();
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

int algebra_dimension(Group g) { return g == Group::SE2xR ? 4 : 3; }

Eigen::VectorXd coefficients(const AlgebraVector& v) {
  return std::visit(
      [](const auto& u) -> Eigen::VectorXd {
        using V = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<V, Se2RVector>) return Eigen::Vector4d(u.a, u.b, u.c, u.d);
        else return Eigen::Vector3d(u.a, u.b, u.c);
      },
      v);
}

AlgebraVector from_coefficients(Group g, const Eigen::VectorXd& c) {
  if (c.size() != algebra_dimension(g)) {
    throw std::invalid_argument("from_coefficients: expected " +
                                std::to_string(algebra_dimension(g)) + " coefficients for " +
                                std::string(to_string(g)));
  }
  switch (g) {
    case Group::SE2:
      return Se2Vector{c(0), c(1), c(2)};
    case Group::SO3:
      return So3Vector{c(0), c(1), c(2)};
    case Group::SE2xR:
      return Se2RVector{c(0), c(1), c(2), c(3)};
  }
  throw std::invalid_argument("from_coefficients: unknown group");
}

}  // namespace lieplan
