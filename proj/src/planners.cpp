#include "lieplan/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lieplan/scalar.hpp"

namespace lieplan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Float noise allowed on the boundary of sqrt/arccos arguments and domain constraints.
constexpr double kClampTol = 1e-12;
// Canonical-form check applied by the typed IK entry points.
constexpr double kFamilyTol = 1e-9;
// Below this middle angle the SO(3) first/third angles are ill-conditioned separately.
constexpr double kSo3SmallMiddle = 1e-6;

double sq(double x) { return x * x; }

double sqrt_clamped(double x) {
  if (x < 0.0 && x >= -kClampTol) return 0.0;
  return std::sqrt(x);  // NaN for genuine negatives
}

double acos_clamped(double x) {
  if (x > 1.0 && x <= 1.0 + kClampTol) return 0.0;
  if (x < -1.0 && x >= -1.0 - kClampTol) return kPi;
  return std::acos(x);
}

struct Constraint {
  const char* name;
  double lhs;  // satisfied when lhs >= rhs
  double rhs;
};

DomainVerdict evaluate(std::initializer_list<Constraint> constraints) {
  DomainVerdict v;
  v.margin = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) {
    const double slack = c.lhs - c.rhs;
    const double tol = kClampTol * std::max({1.0, std::abs(c.lhs), std::abs(c.rhs)});
    if (slack < v.margin) {
      v.margin = slack;
      if (slack < -tol) {
        v.inside = false;
        v.violated = c.name;
      }
    }
    if (std::isnan(slack)) {
      v.inside = false;
      v.violated = c.name;
      v.margin = kNaN;
      return v;
    }
  }
  if (v.inside) v.violated.clear();
  return v;
}

// (x,y) minus the drift contributed by the first field's translation over angle theta.
Eigen::Vector2d planar_offset(double b1, double c1, double theta, double x, double y) {
  const double u = 1.0 - std::cos(theta), w = std::sin(theta);
  return {x - (-c1 * u + b1 * w), y - (b1 * u + c1 * w)};
}

// [alpha, beta] = 1/(b2^2+c2^2) [[b2, c2], [-c2, q]] * offset; q = b2 in the rotation form.
Eigen::Vector2d rotate_back(double b2, double c2, double q, const Eigen::Vector2d& p) {
  const double n = sq(b2) + sq(c2);
  return Eigen::Vector2d(b2 * p.x() + c2 * p.y(), -c2 * p.x() + q * p.y()) / n;
}

// Difference-of-fields form shared by the two-rotating-field planners.
Eigen::Vector2d difference_frame(double b1, double c1, double b2, double c2,
                                 const Eigen::Vector2d& p) {
  const double e = c1 - c2, f = b1 - b2;
  const double n = sq(e) + sq(f);
  return Eigen::Vector2d(e * p.x() - f * p.y(), f * p.x() + e * p.y()) / n;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

template <class V>
void require_family(Family f, std::initializer_list<V> fields, const char* what) {
  std::vector<AlgebraVector> v(fields.begin(), fields.end());
  require(in_family(f, v, kFamilyTol), what);
}

void refuse_outside(const DomainVerdict& v, const IkOptions& opts) {
  if (!v.inside && !opts.force) {
    throw PlanningError(PlanErrorKind::OutsideDomain,
                        "target outside the planner's domain (" + v.violated + ")", v);
  }
}

// Shared S2-shaped components: first three times from the offset-corrected (alpha, beta).
std::array<double, 3> s2_times(const Eigen::Vector2d& ab, double theta) {
  const double rho = ab.norm();
  const double r = sqrt_clamped(4.0 - sq(rho));
  const double t1 = atan2c(rho, r) + atan2c(ab.x(), ab.y());
  const double t2 = atan2c(2.0 - sq(rho), rho * r);
  return {t1, t2, theta - t1 - t2};
}

template <class V, class G, class Exp>
G fk_impl(std::span<const V> fields, std::span<const int> idx, std::span<const double> times,
          Exp exp) {
  require(idx.size() == times.size(), "fk: multiindex and times differ in length");
  G g{};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] >= 1 && static_cast<std::size_t>(idx[k]) <= fields.size(),
            "fk: field index out of range");
    g = compose(g, exp(fields[static_cast<std::size_t>(idx[k] - 1)], times[k]));
  }
  return g;
}

}  // namespace

std::string_view to_string(PlanErrorKind k) {
  switch (k) {
    case PlanErrorKind::Uncontrollable: return "Uncontrollable";
    case PlanErrorKind::OutsideDomain: return "OutsideDomain";
    case PlanErrorKind::OutOfCatalog: return "OutOfCatalog";
    case PlanErrorKind::DegenerateL: return "DegenerateL";
  }
  return "?";
}

Se2Pose fk(std::span<const Se2Vector> fields, std::span<const int> multiindex,
           std::span<const double> times) {
  return fk_impl<Se2Vector, Se2Pose>(fields, multiindex, times, exp_se2);
}

Rotation fk(std::span<const So3Vector> fields, std::span<const int> multiindex,
            std::span<const double> times) {
  return fk_impl<So3Vector, Rotation>(fields, multiindex, times, exp_so3);
}

Se2RPose fk(std::span<const Se2RVector> fields, std::span<const int> multiindex,
            std::span<const double> times) {
  return fk_impl<Se2RVector, Se2RPose>(fields, multiindex, times, exp_se2r);
}

GroupElement fk(std::span<const AlgebraVector> fields, std::span<const int> multiindex,
                std::span<const double> times) {
  require(!fields.empty(), "fk: no fields");
  require(multiindex.size() == times.size(), "fk: multiindex and times differ in length");
  GroupElement g = identity(group_of(fields.front()));
  for (std::size_t k = 0; k < multiindex.size(); ++k) {
    const int i = multiindex[k];
    require(i >= 1 && static_cast<std::size_t>(i) <= fields.size(), "fk: field index out of range");
    g = compose(g, exp_map(fields[static_cast<std::size_t>(i - 1)], times[k]));
  }
  return g;
}

GroupElement fk(std::span<const AlgebraVector> fields, const MotionPlan& plan) {
  std::vector<int> idx;
  std::vector<double> times;
  for (const auto& s : plan.steps) {
    idx.push_back(s.field);
    times.push_back(s.time);
  }
  return fk(fields, idx, times);
}

std::vector<int> multiindex(Family family) {
  switch (family) {
    case Family::S1:
    case Family::S2:
    case Family::SO3:
      return {1, 2, 1};
    case Family::T1:
    case Family::T2:
      return {1, 2, 1, 2, 1};
    case Family::T3:
      return {1, 3, 2, 1};
    case Family::T4:
    case Family::T5:
      return {1, 2, 1, 3};
    case Family::Uncontrollable:
    case Family::OutOfCatalog:
      break;
  }
  throw std::invalid_argument("multiindex: no planner for family " + std::string(to_string(family)));
}

bool is_global(Family family) {
  return family == Family::S1 || family == Family::T1 || family == Family::T3 ||
         family == Family::T4;
}

// ---------------------------------------------------------------------------- SE(2)

std::array<double, 3> ik_s1(const Se2Pair& sys, const Se2Pose& g) {
  require_family(Family::S1, {sys.v1, sys.v2}, "ik_s1: fields are not in canonical S1 form");
  const Eigen::Vector2d p = planar_offset(sys.v1.b, sys.v1.c, g.theta, g.x, g.y);
  const Eigen::Vector2d ab = rotate_back(sys.v2.b, sys.v2.c, sys.v2.b, p);
  const double t1 = atan2c(ab.x(), ab.y());
  return {t1, ab.norm(), g.theta - t1};
}

DomainVerdict domain_s2(const Se2Pair& sys, const Se2Pose& g) {
  const double n2 = sq(sys.v1.c - sys.v2.c) + sq(sys.v1.b - sys.v2.b);
  return evaluate({
      {"translation bound", n2, sq(g.x) + sq(g.y)},
      {"rotation bound", n2, 2.0 * (1.0 - std::cos(g.theta)) * (sq(sys.v1.b) + sq(sys.v1.c))},
  });
}

std::array<double, 3> ik_s2(const Se2Pair& sys, const Se2Pose& g, IkOptions opts) {
  require_family(Family::S2, {sys.v1, sys.v2}, "ik_s2: fields are not in canonical S2 form");
  refuse_outside(domain_s2(sys, g), opts);
  const Eigen::Vector2d p = planar_offset(sys.v1.b, sys.v1.c, g.theta, g.x, g.y);
  const Eigen::Vector2d ab = difference_frame(sys.v1.b, sys.v1.c, sys.v2.b, sys.v2.c, p);
  return s2_times(ab, g.theta);
}

// ---------------------------------------------------------------------------- SO(3)

DomainVerdict domain_so3(const So3Pair& sys, const Rotation& g) {
  return evaluate({{"R33 bound", g.r(2, 2), 2.0 * sq(sys.v2.c) - 1.0}});
}

bool so3_domain_axis_angle(const So3Pair& sys, const Rotation& g) {
  const AxisAngle aa = axis_angle(g);
  const double sin2 = sq(aa.omega.x()) + sq(aa.omega.y());  // sin^2 of the angle to e_z
  return sin2 * (1.0 - std::cos(aa.angle)) <= 2.0 * (1.0 - sq(sys.v2.c));
}

std::array<double, 3> ik_so3(const So3Pair& sys, const Rotation& g, IkOptions opts) {
  require_family(Family::SO3, {sys.v1, sys.v2}, "ik_so3: fields are not in canonical SO3 form");
  refuse_outside(domain_so3(sys, g), opts);
  const double a = sys.v2.a, b = sys.v2.b, c = sys.v2.c;
  const Eigen::Matrix3d& r = g.r;
  const double k = 2.0 * (1.0 - sq(c));
  // Half-angle form of t2 = arccos((R33 - c^2) / (1 - c^2)).
  const double half_sin = sqrt_clamped((1.0 - r(2, 2)) / k);
  const double half_cos = sqrt_clamped((r(2, 2) - (2.0 * sq(c) - 1.0)) / k);
  const double t2 = 2.0 * std::atan2(half_sin, half_cos);

  const double z1 = 1.0 - std::cos(t2), z2 = std::sin(t2);
  const double w1 = a * c * z1 + b * z2, w2 = c * b * z1 - a * z2;
  const double v1 = a * c * z1 - b * z2, v2 = c * b * z1 + a * z2;
  const double t1 = atan2c(w1 * r(0, 2) + w2 * r(1, 2), -w2 * r(0, 2) + w1 * r(1, 2));
  double t3 = atan2c(v1 * r(2, 0) + v2 * r(2, 1), v2 * r(2, 0) - v1 * r(2, 1));
  if (!(t2 >= kSo3SmallMiddle)) {
    // The residual z-rotation exp(-t2 V2) exp(-t1 e_z) R fixes t3 robustly.
    const Eigen::Matrix3d m =
        exp_so3(sys.v2, -t2).r * exp_so3(sys.v1, -t1).r * r;
    if (std::isfinite(t2)) t3 = atan2c(m(0, 0), m(1, 0));
  }
  return {t1, t2, t3};
}

// ---------------------------------------------------------------------------- SE(2) x R

std::array<double, 5> ik_t1(const Se2RPair& sys, const Se2RPose& g, IkOptions opts) {
  require_family(Family::T1, {sys.v1, sys.v2}, "ik_t1: fields are not in canonical T1 form");
  const auto& v1 = sys.v1;
  const auto& v2 = sys.v2;
  const double gamma = g.z - v1.d * g.theta;
  const Eigen::Vector2d p = planar_offset(v1.b, v1.c, g.theta, g.x, g.y);
  const Eigen::Vector2d ab = rotate_back(v2.b, v2.c, v2.b, p);
  const double rho = ab.norm();
  const double phi = atan2c(ab.x(), ab.y());
  if (opts.formula == Formula::PaperLiteral) {
    const double t1 = kPi * indicator_negative(gamma - rho) + phi + atan2c((rho + gamma) / 2.0, 0.0);
    const double t3 = atan2c((sq(rho) - sq(gamma)) / 4.0, 0.0) +
                      kPi * (indicator_negative(gamma + rho) - indicator_negative(gamma - rho));
    return {t1, (gamma - rho) / 2.0, t3, (gamma + rho) / 2.0, g.theta - t1 - t3};
  }
  // Back along the reversed heading for (gamma - rho)/2, then forward for (gamma + rho)/2.
  const double t1 = phi + kPi;
  const double t3 = -kPi;
  return {t1, (gamma - rho) / 2.0, t3, (gamma + rho) / 2.0, g.theta - t1 - t3};
}

DomainVerdict domain_t2(const Se2RPair& sys, const Se2RPose& g) {
  const auto& v1 = sys.v1;
  const auto& v2 = sys.v2;
  const double n2 = sq(v1.c - v2.c) + sq(v1.b - v2.b);
  const double n = std::sqrt(n2);
  const double turn = 2.0 * (1.0 - std::cos(g.theta));
  const double arg =
      -1.0 + (std::hypot(g.x, g.y) + std::hypot(v1.b, v1.c) * std::sqrt(turn)) / n;
  const double lhs_z = std::abs(g.z - v1.d * g.theta);
  // Past arg = 1 the arccos bound is undefined; report the overshoot as the slack.
  const Constraint z_bound =
      arg > 1.0 + kClampTol
          ? Constraint{"z bound", 1.0, arg}
          : Constraint{"z bound", 2.0 * std::abs(v2.d - v1.d) * acos_clamped(arg), lhs_z};
  return evaluate({
      {"translation bound", 4.0 * n2, sq(g.x) + sq(g.y)},
      {"rotation bound", 4.0 * n2, turn * (sq(v1.b) + sq(v1.c))},
      z_bound,
  });
}

std::array<double, 5> ik_t2(const Se2RPair& sys, const Se2RPose& g, IkOptions opts) {
  require_family(Family::T2, {sys.v1, sys.v2}, "ik_t2: fields are not in canonical T2 form");
  refuse_outside(domain_t2(sys, g), opts);
  const auto& v1 = sys.v1;
  const auto& v2 = sys.v2;
  const bool literal = opts.formula == Formula::PaperLiteral;
  const double gamma = (g.z - v1.d * g.theta) / (v2.d - v1.d);
  Eigen::Vector2d ab;
  if (literal) {
    const Eigen::Vector2d p = planar_offset(v1.c, v1.d, g.theta, g.x, g.y);
    const double e = v1.d - v2.d, f = v1.c - v2.c;
    ab = Eigen::Vector2d(e * p.x() - f * p.y(), f * p.x() + e * p.y()) / (sq(e) + sq(f));
  } else {
    ab = difference_frame(v1.b, v1.c, v2.b, v2.c, planar_offset(v1.b, v1.c, g.theta, g.x, g.y));
  }
  const double rho = ab.norm();
  const double c = std::cos(gamma / 2.0);
  const double one_plus_c = 1.0 + c;

  // l solves the law-of-cosines split of rho between the two translation chords.
  double l;
  if (one_plus_c <= 0.0) {
    if (rho > kClampTol && !opts.force) {
      throw PlanningError(PlanErrorKind::DegenerateL, "half-turn split with nonzero offset");
    }
    l = 2.0 * sign(gamma);
  } else {
    const double disc = (1.0 - c) * (8.0 * one_plus_c - sq(rho)) / one_plus_c;
    if (disc < -kClampTol && !opts.force) {
      throw PlanningError(PlanErrorKind::DegenerateL,
                          "negative discriminant for the chord split (" + std::to_string(disc) + ")");
    }
    l = rho / 2.0 + sign(gamma) * sqrt_clamped(disc) / 2.0;
  }
  const double phi = atan2c(ab.x(), ab.y());
  const double rl = sqrt_clamped(4.0 - sq(l));
  const double t1 = atan2c(l, rl) + phi;
  const double t2 = 2.0 * atan2c(rl, l);
  double t3 = -atan2c(rho - l, sqrt_clamped(4.0 - sq(rho - l))) - t1 - t2;
  if (!literal) t3 += phi;
  const double t4 = gamma - t2;
  return {t1, t2, t3, t4, g.theta - (t1 + t2 + t3 + t4)};
}

std::array<double, 4> ik_t3(const Se2RTriple& sys, const Se2RPose& g) {
  require_family(Family::T3, {sys.v1, sys.v2, sys.v3}, "ik_t3: fields are not in canonical T3 form");
  const auto& v1 = sys.v1;
  const Eigen::Vector2d p = planar_offset(v1.b, v1.c, g.theta, g.x, g.y);
  const Eigen::Vector2d ab = rotate_back(sys.v2.b, sys.v2.c, sys.v2.b, p);
  const double phi = atan2c(ab.x(), ab.y());
  const double t2 = (g.z - v1.d * g.theta) / (sys.v3.d - v1.d);
  return {phi - t2, t2, ab.norm(), g.theta - phi};
}

std::array<double, 4> ik_t4(const Se2RTriple& sys, const Se2RPose& g, IkOptions opts) {
  require_family(Family::T4, {sys.v1, sys.v2, sys.v3}, "ik_t4: fields are not in canonical T4 form");
  const auto& v1 = sys.v1;
  const auto& v2 = sys.v2;
  const Eigen::Vector2d p = planar_offset(v1.b, v1.c, g.theta, g.x, g.y);
  const double q = opts.formula == Formula::PaperLiteral ? v2.d : v2.b;
  const Eigen::Vector2d ab = rotate_back(v2.b, v2.c, q, p);
  const double phi = atan2c(ab.x(), ab.y());
  return {phi, ab.norm(), g.theta - phi, (g.z - v1.d * g.theta) / sys.v3.d};
}

DomainVerdict domain_t5(const Se2RTriple& sys, const Se2RPose& g) {
  return domain_s2({{sys.v1.a, sys.v1.b, sys.v1.c}, {sys.v2.a, sys.v2.b, sys.v2.c}},
                   {g.theta, g.x, g.y});
}

std::array<double, 4> ik_t5(const Se2RTriple& sys, const Se2RPose& g, IkOptions opts) {
  require_family(Family::T5, {sys.v1, sys.v2, sys.v3}, "ik_t5: fields are not in canonical T5 form");
  refuse_outside(domain_t5(sys, g), opts);
  const auto& v1 = sys.v1;
  const auto& v2 = sys.v2;
  const Eigen::Vector2d p = planar_offset(v1.b, v1.c, g.theta, g.x, g.y);
  const auto t = s2_times(difference_frame(v1.b, v1.c, v2.b, v2.c, p), g.theta);
  return {t[0], t[1], t[2], (g.z - v1.d * g.theta) / sys.v3.d};
}

// ---------------------------------------------------------------------------- dispatch

namespace {

template <class V>
const V& field_as(std::span<const AlgebraVector> f, std::size_t i) {
  require(i < f.size() && std::holds_alternative<V>(f[i]), "canonical fields do not match the family");
  return std::get<V>(f[i]);
}

template <class G>
const G& target_as(const GroupElement& g) {
  require(std::holds_alternative<G>(g), "target does not belong to the system's group");
  return std::get<G>(g);
}

template <std::size_t N>
std::vector<double> to_vector(const std::array<double, N>& a) {
  return {a.begin(), a.end()};
}

}  // namespace

DomainVerdict domain_canonical(Family family, std::span<const AlgebraVector> f,
                               const GroupElement& target) {
  switch (family) {
    case Family::S2:
      return domain_s2({field_as<Se2Vector>(f, 0), field_as<Se2Vector>(f, 1)},
                       target_as<Se2Pose>(target));
    case Family::SO3:
      return domain_so3({field_as<So3Vector>(f, 0), field_as<So3Vector>(f, 1)},
                        target_as<Rotation>(target));
    case Family::T2:
      return domain_t2({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1)},
                       target_as<Se2RPose>(target));
    case Family::T5:
      return domain_t5({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1),
                        field_as<Se2RVector>(f, 2)},
                       target_as<Se2RPose>(target));
    default:
      return DomainVerdict{true, "", std::numeric_limits<double>::infinity()};
  }
}

std::vector<double> ik_canonical(Family family, std::span<const AlgebraVector> f,
                                 const GroupElement& target, IkOptions opts) {
  switch (family) {
    case Family::S1:
      return to_vector(ik_s1({field_as<Se2Vector>(f, 0), field_as<Se2Vector>(f, 1)},
                             target_as<Se2Pose>(target)));
    case Family::S2:
      return to_vector(ik_s2({field_as<Se2Vector>(f, 0), field_as<Se2Vector>(f, 1)},
                             target_as<Se2Pose>(target), opts));
    case Family::SO3:
      return to_vector(ik_so3({field_as<So3Vector>(f, 0), field_as<So3Vector>(f, 1)},
                              target_as<Rotation>(target), opts));
    case Family::T1:
      return to_vector(ik_t1({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1)},
                             target_as<Se2RPose>(target), opts));
    case Family::T2:
      return to_vector(ik_t2({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1)},
                             target_as<Se2RPose>(target), opts));
    case Family::T3:
      return to_vector(ik_t3({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1),
                              field_as<Se2RVector>(f, 2)},
                             target_as<Se2RPose>(target)));
    case Family::T4:
      return to_vector(ik_t4({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1),
                              field_as<Se2RVector>(f, 2)},
                             target_as<Se2RPose>(target), opts));
    case Family::T5:
      return to_vector(ik_t5({field_as<Se2RVector>(f, 0), field_as<Se2RVector>(f, 1),
                              field_as<Se2RVector>(f, 2)},
                             target_as<Se2RPose>(target), opts));
    case Family::Uncontrollable:
      throw PlanningError(PlanErrorKind::Uncontrollable, "system is not controllable");
    case Family::OutOfCatalog:
      throw PlanningError(PlanErrorKind::OutOfCatalog, "system is outside the planner catalog");
  }
  throw std::invalid_argument("ik_canonical: unknown family");
}

MotionPlan denormalize(const NormalizationRecord& record, Family family,
                       std::span<const double> canonical_times) {
  const std::vector<int> idx = multiindex(family);
  require(idx.size() == canonical_times.size(), "denormalize: wrong number of coasting times");
  MotionPlan out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto i = static_cast<std::size_t>(idx[k] - 1);
    require(i < record.permutation.size() && i < record.scales.size(),
            "denormalize: record does not cover the family's fields");
    out.steps.push_back({record.permutation[i], record.scales[i] * canonical_times[k]});
  }
  return out;
}

namespace {

// Classification used for planning; a three-input system with a controllable pair
// is planned on the first such pair.
SystemClass classify_for_planning(std::span<const AlgebraVector> fields) {
  SystemClass cls = classify(fields);
  if (fields.size() != 3 || cls.family != Family::OutOfCatalog) return cls;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const std::array<AlgebraVector, 2> pair{fields[static_cast<std::size_t>(i)],
                                              fields[static_cast<std::size_t>(j)]};
      SystemClass sub = classify(pair);
      if (sub.family == Family::Uncontrollable || sub.family == Family::OutOfCatalog) continue;
      const std::array<int, 2> users{i + 1, j + 1};
      for (int& p : sub.record.permutation) p = users[static_cast<std::size_t>(p - 1)];
      sub.note = "planned on controllable pair (" + std::to_string(i + 1) + "," +
                 std::to_string(j + 1) + ")";
      return sub;
    }
  }
  return cls;
}

}  // namespace

PlanResult plan(std::span<const AlgebraVector> fields, Group group, const GroupElement& target,
                PlanOptions opts) {
  require(fields.size() == 2 || fields.size() == 3, "plan: expected two or three fields");
  for (const auto& f : fields) require(group_of(f) == group, "plan: field does not belong to the group");
  require(group_of(target) == group, "plan: target does not belong to the group");

  PlanResult out;
  out.system = classify_for_planning(fields);
  out.family = out.system.family;
  if (out.family == Family::Uncontrollable) {
    throw PlanningError(PlanErrorKind::Uncontrollable, "uncontrollable: " + out.system.note);
  }
  if (out.family == Family::OutOfCatalog) {
    throw PlanningError(PlanErrorKind::OutOfCatalog, "out of catalog: " + out.system.note);
  }

  const GroupElement canonical_target = to_canonical(out.system.record, target);
  out.verdict = domain_canonical(out.family, out.system.canonical_fields, canonical_target);
  out.forced = !out.verdict.inside;
  const std::vector<double> times = ik_canonical(out.family, out.system.canonical_fields,
                                                 canonical_target, {opts.force, opts.formula});
  out.plan = denormalize(out.system.record, out.family, times);
  out.residual = pose_distance(fk(fields, out.plan), target);
  return out;
}

std::vector<TrajectorySample> sample_trajectory(std::span<const AlgebraVector> fields,
                                                const MotionPlan& plan, double dt) {
  require(!fields.empty(), "sample_trajectory: no fields");
  require(dt > 0.0 && std::isfinite(dt), "sample_trajectory: dt must be positive");
  GroupElement start = identity(group_of(fields.front()));
  double elapsed = 0.0;
  std::vector<TrajectorySample> out{{0.0, start}};
  for (const auto& step : plan.steps) {
    require(step.field >= 1 && static_cast<std::size_t>(step.field) <= fields.size(),
            "sample_trajectory: field index out of range");
    const AlgebraVector& v = fields[static_cast<std::size_t>(step.field - 1)];
    const double duration = std::abs(step.time);
    // Same composition as fk, so the leg endpoint matches it exactly.
    const GroupElement end = compose(start, exp_map(v, step.time));
    if (duration > 0.0) {
      const auto n = static_cast<long>(std::max(1.0, std::ceil(duration / dt)));
      for (long j = 1; j < n; ++j) {
        const double frac = static_cast<double>(j) / static_cast<double>(n);
        out.push_back({elapsed + duration * frac, compose(start, exp_map(v, step.time * frac))});
      }
      elapsed += duration;
      out.push_back({elapsed, end});
    }
    start = end;
  }
  return out;
}

}  // namespace lieplan
