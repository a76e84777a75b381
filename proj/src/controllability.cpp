#include "lieplan/controllability.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lieplan {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kEqualTol = 1e-9;

double max_abs(const AlgebraVector& v) { return coefficients(v).cwiseAbs().maxCoeff(); }

// Zero relative to the largest coefficient of the field.
template <class V>
bool rot_is_zero(const V& v) {
  return std::abs(v.a) <= kZeroTol * max_abs(v);
}

bool nearly_equal(double x, double y) {
  return std::abs(x - y) <= kEqualTol * std::max({1.0, std::abs(x), std::abs(y)});
}

double sq(double x) { return x * x; }

SystemClass uncontrollable(std::string note) {
  SystemClass out;
  out.family = Family::Uncontrollable;
  out.note = std::move(note);
  return out;
}

SystemClass out_of_catalog(std::string note) {
  SystemClass out;
  out.family = Family::OutOfCatalog;
  out.note = std::move(note);
  return out;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::S1: return "S1";
    case Family::S2: return "S2";
    case Family::SO3: return "SO3";
    case Family::T1: return "T1";
    case Family::T2: return "T2";
    case Family::T3: return "T3";
    case Family::T4: return "T4";
    case Family::T5: return "T5";
    case Family::Uncontrollable: return "Uncontrollable";
    case Family::OutOfCatalog: return "OutOfCatalog";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  for (Family f : {Family::S1, Family::S2, Family::SO3, Family::T1, Family::T2, Family::T3,
                   Family::T4, Family::T5, Family::Uncontrollable, Family::OutOfCatalog}) {
    if (to_string(f) == s) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

double controllability_margin(const AlgebraVector& v1, const AlgebraVector& v2) {
  if (v1.index() != v2.index()) throw std::invalid_argument("controllability: group mismatch");
  if (max_abs(v1) == 0.0 || max_abs(v2) == 0.0) return 0.0;
  const AlgebraVector u1 = scale(1.0 / max_abs(v1), v1);
  const AlgebraVector u2 = scale(1.0 / max_abs(v2), v2);
  switch (group_of(u1)) {
    case Group::SE2: {
      const auto& p = std::get<Se2Vector>(u1);
      const auto& q = std::get<Se2Vector>(u2);
      return sq(p.a * q.b - p.b * q.a) + sq(p.c * q.a - p.a * q.c);
    }
    case Group::SO3: {
      return to_eigen(std::get<So3Vector>(u1)).cross(to_eigen(std::get<So3Vector>(u2))).squaredNorm();
    }
    case Group::SE2xR: {
      const auto& p = std::get<Se2RVector>(u1);
      const auto& q = std::get<Se2RVector>(u2);
      // Volume of (V1, V2, [V1,V2], [V1,[V1,V2]], [V2,[V1,V2]]): nonzero iff both factors are,
      // since a z-mismatch forces (a1, a2) != 0.
      const double z_factor = std::abs(q.a * p.d - q.d * p.a);
      const double xy_factor = sq(p.c * q.a - p.a * q.c) + sq(p.a * q.b - p.b * q.a);
      return z_factor * std::hypot(p.a, q.a) * xy_factor;
    }
  }
  return 0.0;
}

bool se2_controllable(const Se2Vector& v1, const Se2Vector& v2) {
  return controllability_margin(v1, v2) > kRankEpsilon;
}

bool so3_controllable(const So3Vector& v1, const So3Vector& v2) {
  return controllability_margin(v1, v2) > kRankEpsilon;
}

bool se2r_controllable_2(const Se2RVector& v1, const Se2RVector& v2) {
  return controllability_margin(v1, v2) > kRankEpsilon;
}

SystemClass classify_se2(const Se2Vector& v1, const Se2Vector& v2) {
  if (!se2_controllable(v1, v2)) return uncontrollable("Lie closure of the pair is not full rank");

  SystemClass out;
  const bool r1 = !rot_is_zero(v1), r2 = !rot_is_zero(v2);
  if (r1 && r2) {
    Se2Vector w1 = (1.0 / v1.a) * v1, w2 = (1.0 / v2.a) * v2;
    w1.a = w2.a = 1.0;
    std::array<int, 2> perm{1, 2};
    std::array<double, 2> scales{1.0 / v1.a, 1.0 / v2.a};
    // Keep the field with the smaller translational part first.
    if (sq(w1.b) + sq(w1.c) > sq(w2.b) + sq(w2.c)) {
      std::swap(w1, w2);
      std::swap(perm[0], perm[1]);
      std::swap(scales[0], scales[1]);
    }
    out.family = Family::S2;
    out.canonical_fields = {w1, w2};
    out.record = {{perm[0], perm[1]}, {scales[0], scales[1]}, std::nullopt};
    return out;
  }
  const bool first_rotates = r1;
  const Se2Vector& rot = first_rotates ? v1 : v2;
  const Se2Vector& tr = first_rotates ? v2 : v1;
  Se2Vector w1 = (1.0 / rot.a) * rot;
  w1.a = 1.0;
  const double n = std::hypot(tr.b, tr.c);
  Se2Vector w2{0.0, tr.b / n, tr.c / n};
  out.family = Family::S1;
  out.canonical_fields = {w1, w2};
  out.record.permutation = first_rotates ? std::vector<int>{1, 2} : std::vector<int>{2, 1};
  out.record.scales = {1.0 / rot.a, 1.0 / n};
  return out;
}

Rotation align_to_z(const So3Vector& v) {
  const Eigen::Vector3d u = to_eigen(v).normalized();
  const Eigen::Vector3d axis = u.cross(Eigen::Vector3d::UnitZ());
  const double s = axis.norm();
  if (s < 1e-15) {
    if (u.z() > 0.0) return Rotation{};
    return {Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal()};
  }
  const double angle = std::atan2(s, u.z());
  return exp_so3(from_eigen(axis / s), angle);
}

SystemClass classify_so3(const So3Vector& v1, const So3Vector& v2) {
  if (!so3_controllable(v1, v2)) return uncontrollable("fields are parallel");
  const Rotation r0 = align_to_z(v1);
  const double n1 = to_eigen(v1).norm(), n2 = to_eigen(v2).norm();
  const Eigen::Vector3d w2 = r0.r * (to_eigen(v2) / n2);
  SystemClass out;
  out.family = Family::SO3;
  out.canonical_fields = {So3Vector{0.0, 0.0, 1.0}, from_eigen(w2)};
  out.record = {{1, 2}, {1.0 / n1, 1.0 / n2}, r0};
  return out;
}

SystemClass classify_se2r_2(const Se2RVector& v1, const Se2RVector& v2) {
  if (!se2r_controllable_2(v1, v2)) return uncontrollable("Lie closure of the pair is not full rank");

  SystemClass out;
  const bool r1 = !rot_is_zero(v1), r2 = !rot_is_zero(v2);
  if (r1 && r2) {
    Se2RVector w1 = (1.0 / v1.a) * v1, w2 = (1.0 / v2.a) * v2;
    w1.a = w2.a = 1.0;
    std::array<int, 2> perm{1, 2};
    std::array<double, 2> scales{1.0 / v1.a, 1.0 / v2.a};
    if (sq(w1.b) + sq(w1.c) > sq(w2.b) + sq(w2.c)) {
      std::swap(w1, w2);
      std::swap(perm[0], perm[1]);
      std::swap(scales[0], scales[1]);
    }
    out.family = Family::T2;
    out.canonical_fields = {w1, w2};
    out.record = {{perm[0], perm[1]}, {scales[0], scales[1]}, std::nullopt};
    return out;
  }
  const bool first_rotates = r1;
  const Se2RVector& rot = first_rotates ? v1 : v2;
  const Se2RVector& tr = first_rotates ? v2 : v1;
  Se2RVector w1 = (1.0 / rot.a) * rot;
  w1.a = 1.0;
  Se2RVector w2 = (1.0 / tr.d) * tr;
  w2.a = 0.0;
  w2.d = 1.0;
  out.family = Family::T1;
  out.canonical_fields = {w1, w2};
  out.record.permutation = first_rotates ? std::vector<int>{1, 2} : std::vector<int>{2, 1};
  out.record.scales = {1.0 / rot.a, 1.0 / tr.d};
  return out;
}

int bracket_closure_rank(std::span<const AlgebraVector> fields, int depth) {
  if (fields.empty()) return 0;
  std::vector<AlgebraVector> base;
  for (const auto& f : fields) {
    const double m = max_abs(f);
    if (m > 0.0) base.push_back(scale(1.0 / m, f));
  }
  if (base.empty()) return 0;
  std::vector<AlgebraVector> all = base, level = base;
  for (int k = 1; k < depth; ++k) {
    std::vector<AlgebraVector> next;
    for (const auto& f : base) {
      for (const auto& g : level) next.push_back(bracket(f, g));
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  const int dim = algebra_dimension(group_of(base.front()));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(all.size()), dim);
  for (std::size_t i = 0; i < all.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = coefficients(all[i]).transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double tol = std::sqrt(kRankEpsilon);
  return static_cast<int>((svd.singularValues().array() > tol).count());
}

namespace {

struct TripleMatch {
  Family family;
  std::array<Se2RVector, 3> fields;
  std::array<double, 3> scales;
};

std::optional<TripleMatch> match_triple(const std::array<Se2RVector, 3>& w) {
  const bool r1 = !rot_is_zero(w[0]), r2 = !rot_is_zero(w[1]), r3 = !rot_is_zero(w[2]);
  if (!r1) return std::nullopt;
  Se2RVector v1 = (1.0 / w[0].a) * w[0];
  v1.a = 1.0;
  const double s1 = 1.0 / w[0].a;
  const double m2 = max_abs(w[1]), m3 = max_abs(w[2]);
  auto small = [](double x, double m) { return std::abs(x) <= kEqualTol * m; };

  if (!r2 && r3) {
    // (1,b1,c1,d1), (0,b2,c2,0), (1,b1,c1,d3), d1 != d3
    Se2RVector v3 = (1.0 / w[2].a) * w[2];
    if (!nearly_equal(v1.b, v3.b) || !nearly_equal(v1.c, v3.c) || nearly_equal(v1.d, v3.d)) {
      return std::nullopt;
    }
    if (!small(w[1].d, m2) || small(std::hypot(w[1].b, w[1].c), m2)) return std::nullopt;
    v3 = {1.0, v1.b, v1.c, v3.d};
    const Se2RVector v2{0.0, w[1].b, w[1].c, 0.0};
    return TripleMatch{Family::T3, {v1, v2, v3}, {s1, 1.0, 1.0 / w[2].a}};
  }
  if (!r2 && !r3) {
    // (1,b1,c1,d1), (0,b2,c2,0), (0,0,0,d3), d3 != 0
    if (!small(w[1].d, m2) || small(std::hypot(w[1].b, w[1].c), m2)) return std::nullopt;
    if (!small(std::hypot(w[2].b, w[2].c), m3) || small(w[2].d, m3)) return std::nullopt;
    // Unit d3, flipped when that would collide with d1.
    const double d3 = nearly_equal(v1.d, 1.0) ? -1.0 : 1.0;
    const Se2RVector v2{0.0, w[1].b, w[1].c, 0.0};
    const Se2RVector v3{0.0, 0.0, 0.0, d3};
    return TripleMatch{Family::T4, {v1, v2, v3}, {s1, 1.0, d3 / w[2].d}};
  }
  if (r2 && !r3) {
    // (1,b1,c1,d1), (1,b2,c2,d1), (0,0,0,d3), (b1,c1) != (b2,c2)
    Se2RVector v2 = (1.0 / w[1].a) * w[1];
    if (!nearly_equal(v1.d, v2.d)) return std::nullopt;
    if (nearly_equal(v1.b, v2.b) && nearly_equal(v1.c, v2.c)) return std::nullopt;
    if (sq(v1.b) + sq(v1.c) > sq(v2.b) + sq(v2.c)) return std::nullopt;
    if (!small(std::hypot(w[2].b, w[2].c), m3) || small(w[2].d, m3)) return std::nullopt;
    v2 = {1.0, v2.b, v2.c, v1.d};
    const Se2RVector v3{0.0, 0.0, 0.0, 1.0};
    return TripleMatch{Family::T5, {v1, v2, v3}, {s1, 1.0 / w[1].a, 1.0 / w[2].d}};
  }
  return std::nullopt;
}

}  // namespace

SystemClass classify_se2r_3(const Se2RVector& v1, const Se2RVector& v2, const Se2RVector& v3) {
  const std::array<Se2RVector, 3> user{v1, v2, v3};
  const std::array<AlgebraVector, 3> all{v1, v2, v3};
  if (bracket_closure_rank(all, 3) < 4) return uncontrollable("Lie closure of the triple is not full rank");
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const std::array<AlgebraVector, 2> pair{user[i], user[j]};
      if (bracket_closure_rank(pair, 3) == 4) {
        return out_of_catalog("pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                              ") is already controllable");
      }
    }
  }
  std::array<int, 3> perm{0, 1, 2};
  do {
    const std::array<Se2RVector, 3> w{user[perm[0]], user[perm[1]], user[perm[2]]};
    if (auto m = match_triple(w)) {
      SystemClass out;
      out.family = m->family;
      out.canonical_fields = {m->fields[0], m->fields[1], m->fields[2]};
      out.record.permutation = {perm[0] + 1, perm[1] + 1, perm[2] + 1};
      out.record.scales = {m->scales[0], m->scales[1], m->scales[2]};
      return out;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out_of_catalog("no reordering matches T3, T4 or T5");
}

SystemClass classify(std::span<const AlgebraVector> fields) {
  if (fields.empty()) throw std::invalid_argument("classify: no fields");
  const Group g = group_of(fields.front());
  for (const auto& f : fields) {
    if (group_of(f) != g) throw std::invalid_argument("classify: fields from different algebras");
  }
  if (fields.size() > 3) throw std::invalid_argument("classify: at most three fields supported");
  if (fields.size() == 1) return uncontrollable("a single field is never controllable");
  if (fields.size() == 2) {
    switch (g) {
      case Group::SE2:
        return classify_se2(std::get<Se2Vector>(fields[0]), std::get<Se2Vector>(fields[1]));
      case Group::SO3:
        return classify_so3(std::get<So3Vector>(fields[0]), std::get<So3Vector>(fields[1]));
      case Group::SE2xR:
        return classify_se2r_2(std::get<Se2RVector>(fields[0]), std::get<Se2RVector>(fields[1]));
    }
  }
  if (g == Group::SE2xR) {
    return classify_se2r_3(std::get<Se2RVector>(fields[0]), std::get<Se2RVector>(fields[1]),
                           std::get<Se2RVector>(fields[2]));
  }
  return out_of_catalog("three-input systems are catalogued only on SE2xR");
}

bool in_family(Family family, std::span<const AlgebraVector> fields, double tol) {
  auto eq = [tol](double x, double y) { return std::abs(x - y) <= tol; };
  auto ne = [tol](double x, double y) { return std::abs(x - y) > tol; };
  switch (family) {
    case Family::S1:
    case Family::S2: {
      if (fields.size() != 2 || group_of(fields[0]) != Group::SE2 || group_of(fields[1]) != Group::SE2) return false;
      const auto& p = std::get<Se2Vector>(fields[0]);
      const auto& q = std::get<Se2Vector>(fields[1]);
      if (!eq(p.a, 1.0)) return false;
      if (family == Family::S1) return eq(q.a, 0.0) && eq(sq(q.b) + sq(q.c), 1.0);
      return eq(q.a, 1.0) && (ne(p.b, q.b) || ne(p.c, q.c));
    }
    case Family::SO3: {
      if (fields.size() != 2 || group_of(fields[0]) != Group::SO3 || group_of(fields[1]) != Group::SO3) return false;
      const auto& p = std::get<So3Vector>(fields[0]);
      const auto& q = std::get<So3Vector>(fields[1]);
      return eq(p.a, 0.0) && eq(p.b, 0.0) && eq(p.c, 1.0) &&
             eq(sq(q.a) + sq(q.b) + sq(q.c), 1.0) && sq(q.a) + sq(q.b) > tol && ne(std::abs(q.c), 1.0);
    }
    case Family::T1:
    case Family::T2: {
      if (fields.size() != 2) return false;
      for (const auto& f : fields) if (group_of(f) != Group::SE2xR) return false;
      const auto& p = std::get<Se2RVector>(fields[0]);
      const auto& q = std::get<Se2RVector>(fields[1]);
      if (!eq(p.a, 1.0)) return false;
      if (family == Family::T1) return eq(q.a, 0.0) && eq(q.d, 1.0) && sq(q.b) + sq(q.c) > tol;
      return eq(q.a, 1.0) && ne(p.d, q.d) && (ne(p.b, q.b) || ne(p.c, q.c));
    }
    case Family::T3:
    case Family::T4:
    case Family::T5: {
      if (fields.size() != 3) return false;
      for (const auto& f : fields) if (group_of(f) != Group::SE2xR) return false;
      const auto& p = std::get<Se2RVector>(fields[0]);
      const auto& q = std::get<Se2RVector>(fields[1]);
      const auto& r = std::get<Se2RVector>(fields[2]);
      if (!eq(p.a, 1.0)) return false;
      if (family == Family::T3) {
        return eq(q.a, 0.0) && eq(q.d, 0.0) && sq(q.b) + sq(q.c) > tol && eq(r.a, 1.0) &&
               eq(r.b, p.b) && eq(r.c, p.c) && ne(p.d, r.d);
      }
      if (family == Family::T4) {
        return eq(q.a, 0.0) && eq(q.d, 0.0) && sq(q.b) + sq(q.c) > tol && eq(r.a, 0.0) &&
               eq(r.b, 0.0) && eq(r.c, 0.0) && ne(r.d, 0.0) && ne(r.d, p.d);
      }
      return eq(q.a, 1.0) && eq(q.d, p.d) && (ne(q.b, p.b) || ne(q.c, p.c)) && eq(r.a, 0.0) &&
             eq(r.b, 0.0) && eq(r.c, 0.0) && ne(r.d, 0.0);
    }
    case Family::Uncontrollable:
    case Family::OutOfCatalog:
      return false;
  }
  return false;
}

GroupElement to_canonical(const NormalizationRecord& record, const GroupElement& g) {
  if (!record.conjugation) return g;
  const Eigen::Matrix3d& r0 = record.conjugation->r;
  return Rotation{r0 * std::get<Rotation>(g).r * r0.transpose()};
}

GroupElement from_canonical(const NormalizationRecord& record, const GroupElement& g) {
  if (!record.conjugation) return g;
  const Eigen::Matrix3d& r0 = record.conjugation->r;
  return Rotation{r0.transpose() * std::get<Rotation>(g).r * r0};
}

}  // namespace lieplan
