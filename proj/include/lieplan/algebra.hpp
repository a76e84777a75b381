#pragma once

#include <Eigen/Core>
#include <string_view>
#include <variant>
#include <vector>

namespace lieplan {

enum class Group { SE2, SO3, SE2xR };

std::string_view to_string(Group g);
Group parse_group(std::string_view s);

/// se(2) element a e_theta + b e_x + c e_y.
struct Se2Vector {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  friend bool operator==(const Se2Vector&, const Se2Vector&) = default;
};

/// so(3) element a e_x + b e_y + c e_z (hat-map coordinates).
struct So3Vector {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  friend bool operator==(const So3Vector&, const So3Vector&) = default;
};

/// se(2) x R element a e_theta + b e_x + c e_y + d e_z.
struct Se2RVector {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  friend bool operator==(const Se2RVector&, const Se2RVector&) = default;
};

using AlgebraVector = std::variant<Se2Vector, So3Vector, Se2RVector>;

/// Planar pose. theta is kept in (-pi, pi] by every operation of this library.
struct Se2Pose {
  double theta = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct Rotation {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
};

struct Se2RPose {
  double theta = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using GroupElement = std::variant<Se2Pose, Rotation, Se2RPose>;

struct AxisAngle {
  Eigen::Vector3d omega = Eigen::Vector3d::UnitZ();
  double angle = 0.0;
};

// Group tag of a vector / element.
Group group_of(const AlgebraVector& v);
Group group_of(const GroupElement& g);

Se2Pose make_se2_pose(double theta, double x, double y);
Se2RPose make_se2r_pose(double theta, double x, double y, double z);

// Scaling of algebra vectors (flow reparametrization).
Se2Vector operator*(double s, const Se2Vector& v);
So3Vector operator*(double s, const So3Vector& v);
Se2RVector operator*(double s, const Se2RVector& v);
AlgebraVector scale(double s, const AlgebraVector& v);

// Closed-form exponentials of t * v.
Se2Pose exp_se2(const Se2Vector& v, double t);
Rotation exp_so3(const So3Vector& v, double t);
Se2RPose exp_se2r(const Se2RVector& v, double t);
GroupElement exp_map(const AlgebraVector& v, double t);

/// Entry-wise formula for the flow of a unit-length so(3) field.
/// Throws std::invalid_argument when |v| differs from 1 by more than 1e-9.
Rotation exp_unit_axis_so3(const So3Vector& v, double t);

Eigen::Matrix3d hat(const Eigen::Vector3d& v);
Eigen::Vector3d vee(const Eigen::Matrix3d& m);
Eigen::Vector3d to_eigen(const So3Vector& v);
So3Vector from_eigen(const Eigen::Vector3d& v);

// Group operations. The variant overloads throw std::invalid_argument on a group mismatch.
Se2Pose compose(const Se2Pose& g1, const Se2Pose& g2);
Rotation compose(const Rotation& g1, const Rotation& g2);
Se2RPose compose(const Se2RPose& g1, const Se2RPose& g2);
GroupElement compose(const GroupElement& g1, const GroupElement& g2);

Se2Pose inverse(const Se2Pose& g);
Rotation inverse(const Rotation& g);
Se2RPose inverse(const Se2RPose& g);
GroupElement inverse(const GroupElement& g);

GroupElement identity(Group g);

// Lie brackets in the fixed bases.
Se2Vector bracket(const Se2Vector& v1, const Se2Vector& v2);
So3Vector bracket(const So3Vector& v1, const So3Vector& v2);
Se2RVector bracket(const Se2RVector& v1, const Se2RVector& v2);
AlgebraVector bracket(const AlgebraVector& v1, const AlgebraVector& v2);

/// Axis/angle with angle in [0, pi]. Identity gives axis (0,0,1); at angle pi the axis
/// whose first nonzero coordinate is positive is returned.
AxisAngle axis_angle(const Rotation& r);

// Homogeneous representatives: 3x3 for SE(2) and SO(3), 4x4 for SE(2) x R.
Eigen::Matrix3d matrix(const Se2Pose& g);
Eigen::Matrix4d matrix(const Se2RPose& g);
Eigen::MatrixXd matrix(const GroupElement& g);

/// Frobenius distance between homogeneous representatives.
double pose_distance(const GroupElement& g1, const GroupElement& g2);

bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-10);

// Coefficient access for generic numeric code.
Eigen::VectorXd coefficients(const AlgebraVector& v);
AlgebraVector from_coefficients(Group g, const Eigen::VectorXd& c);
int algebra_dimension(Group g);

}  // namespace lieplan
