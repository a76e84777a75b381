#include "lieplan/verify.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lieplan/scalar.hpp"

namespace lieplan::verify {

namespace {

double sq(double x) { return x * x; }

Eigen::VectorXd coordinates(Group g, const Eigen::MatrixXd& m) {
  switch (g) {
    case Group::SE2:
      return Eigen::Vector3d(m(1, 0), m(0, 2), m(1, 2));
    case Group::SO3:
      return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0));
    case Group::SE2xR:
      return Eigen::Vector4d(m(1, 0), m(0, 3), m(1, 3), m(2, 3));
  }
  return {};
}

}  // namespace

Eigen::MatrixXd series_exp(const Eigen::MatrixXd& m, int terms) {
  if (m.rows() != m.cols()) throw std::invalid_argument("series_exp: matrix is not square");
  if (terms < 1) throw std::invalid_argument("series_exp: need at least one term");
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd a = std::ldexp(1.0, -squarings) * m;
  const auto n = m.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Eigen::MatrixXd generator(const AlgebraVector& v) {
  return std::visit(
      [](const auto& u) -> Eigen::MatrixXd {
        using V = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<V, Se2Vector>) {
          Eigen::Matrix3d m;
          m << 0, -u.a, u.b,
               u.a, 0, u.c,
               0, 0, 0;
          return m;
        } else if constexpr (std::is_same_v<V, So3Vector>) {
          Eigen::Matrix3d m;
          m << 0, -u.c, u.b,
               u.c, 0, -u.a,
               -u.b, u.a, 0;
          return m;
        } else {
          Eigen::Matrix4d m;
          m << 0, -u.a, 0, u.b,
               u.a, 0, 0, u.c,
               0, 0, 0, u.d,
               0, 0, 0, 0;
          return m;
        }
      },
      v);
}

Eigen::MatrixXd series_flow(const AlgebraVector& v, double t) { return series_exp(t * generator(v)); }

namespace {

// Rows: normalized fields, then [field_i, row] for each row of the previous level. At the first
// bracket level only i < j is kept, since [V_j, V_i] = -[V_i, V_j] and [V_i, V_i] = 0.
Eigen::MatrixXd closure_rows(std::span<const AlgebraVector> fields, int depth, Group& group) {
  if (depth < 1) throw std::invalid_argument("lie_closure_rank: depth must be >= 1");
  if (fields.empty()) return {};
  group = group_of(fields.front());
  std::vector<Eigen::MatrixXd> base;
  for (const auto& f : fields) {
    if (group_of(f) != group) throw std::invalid_argument("lie_closure_rank: mixed algebras");
    const Eigen::MatrixXd m = generator(f);
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale > 0.0) base.push_back(m / scale);
  }
  std::vector<Eigen::MatrixXd> all = base, level = base;
  for (int k = 1; k < depth; ++k) {
    std::vector<Eigen::MatrixXd> next;
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (std::size_t j = k == 1 ? i + 1 : 0; j < level.size(); ++j) {
        next.push_back(base[i] * level[j] - level[j] * base[i]);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  const int dim = algebra_dimension(group);
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(all.size()), dim);
  for (std::size_t i = 0; i < all.size(); ++i) {
    stacked.row(static_cast<Eigen::Index>(i)) = coordinates(group, all[i]).transpose();
  }
  return stacked;
}

}  // namespace

int lie_closure_rank(std::span<const AlgebraVector> fields, int depth) {
  Group g{};
  const Eigen::MatrixXd stacked = closure_rows(fields, depth, g);
  if (stacked.rows() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  return static_cast<int>((svd.singularValues().array() > std::sqrt(kRankEpsilon)).count());
}

double lie_closure_volume(std::span<const AlgebraVector> fields, int depth) {
  Group g{};
  const Eigen::MatrixXd stacked = closure_rows(fields, depth, g);
  const int dim = algebra_dimension(g);
  if (stacked.rows() < dim) return 0.0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  return svd.singularValues().head(dim).prod();
}

// ---------------------------------------------------------------------------- sampling

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

namespace {

double normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double param(std::mt19937_64& rng) { return uniform(rng, -kParamRange, kParamRange); }

// Uniform over (-pi, pi].
double angle(std::mt19937_64& rng) { return kPi - 2.0 * kPi * uniform01(rng); }

double planar_gap2(const AlgebraVector& f1, const AlgebraVector& f2) {
  const Eigen::VectorXd p = coefficients(f1), q = coefficients(f2);
  return sq(p(1) - q(1)) + sq(p(2) - q(2));
}

double planar_norm2(const AlgebraVector& f) {
  const Eigen::VectorXd p = coefficients(f);
  return sq(p(1)) + sq(p(2));
}

// Two rotating fields: the one with the smaller translational part comes first.
template <class V>
void order_pair(V& v1, V& v2) {
  if (sq(v1.b) + sq(v1.c) > sq(v2.b) + sq(v2.c)) std::swap(v1, v2);
}

// Largest |theta| allowed by a bound of the form 2 (1 - cos theta) k <= cap.
double turn_limit(double k, double cap) {
  if (k <= 0.0 || cap / (2.0 * k) >= 2.0) return kPi;
  return std::acos(1.0 - cap / (2.0 * k));
}

}  // namespace

Rotation random_rotation(std::mt19937_64& rng) {
  Eigen::Vector4d q;
  do {
    q = Eigen::Vector4d(normal(rng), normal(rng), normal(rng), normal(rng));
  } while (q.norm() < 1e-6);
  q.normalize();
  const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
  return {quat.toRotationMatrix()};
}

double conditioning(Family family, std::span<const AlgebraVector> f) {
  auto coef = [&](std::size_t i) { return coefficients(f[i]); };
  switch (family) {
    case Family::S1:
    case Family::T1:
      return planar_norm2(f[1]);
    case Family::S2:
      return planar_gap2(f[0], f[1]);
    case Family::SO3:
      return sq(coef(1)(0)) + sq(coef(1)(1));
    case Family::T2:
      return std::min(sq(coef(0)(3) - coef(1)(3)), planar_gap2(f[0], f[1]));
    case Family::T3:
      return std::min(planar_norm2(f[1]), sq(coef(2)(3) - coef(0)(3)));
    case Family::T4:
      return std::min({planar_norm2(f[1]), sq(coef(2)(3)), sq(coef(2)(3) - coef(0)(3))});
    case Family::T5:
      return std::min(planar_gap2(f[0], f[1]), sq(coef(2)(3)));
    default:
      throw std::invalid_argument("conditioning: no planner for this family");
  }
}

std::vector<AlgebraVector> sample_system(Family family, std::mt19937_64& rng) {
  for (;;) {
    std::vector<AlgebraVector> sys;
    switch (family) {
      case Family::S1: {
        const double phi = angle(rng);
        sys = {Se2Vector{1.0, param(rng), param(rng)}, Se2Vector{0.0, std::cos(phi), std::sin(phi)}};
        break;
      }
      case Family::S2: {
        Se2Vector v1{1.0, param(rng), param(rng)}, v2{1.0, param(rng), param(rng)};
        order_pair(v1, v2);
        sys = {v1, v2};
        break;
      }
      case Family::SO3: {
        const double c = uniform(rng, -1.0, 1.0), phi = angle(rng);
        const double s = std::sqrt(1.0 - c * c);
        sys = {So3Vector{0.0, 0.0, 1.0}, So3Vector{s * std::cos(phi), s * std::sin(phi), c}};
        break;
      }
      case Family::T1:
        sys = {Se2RVector{1.0, param(rng), param(rng), param(rng)},
               Se2RVector{0.0, param(rng), param(rng), 1.0}};
        break;
      case Family::T2: {
        Se2RVector v1{1.0, param(rng), param(rng), param(rng)};
        Se2RVector v2{1.0, param(rng), param(rng), param(rng)};
        order_pair(v1, v2);
        sys = {v1, v2};
        break;
      }
      case Family::T3: {
        const Se2RVector v1{1.0, param(rng), param(rng), param(rng)};
        const Se2RVector v2{0.0, param(rng), param(rng), 0.0};
        sys = {v1, v2, Se2RVector{1.0, v1.b, v1.c, param(rng)}};
        break;
      }
      case Family::T4:
        sys = {Se2RVector{1.0, param(rng), param(rng), param(rng)},
               Se2RVector{0.0, param(rng), param(rng), 0.0}, Se2RVector{0.0, 0.0, 0.0, param(rng)}};
        break;
      case Family::T5: {
        Se2RVector v1{1.0, param(rng), param(rng), param(rng)};
        Se2RVector v2{1.0, param(rng), param(rng), v1.d};
        order_pair(v1, v2);
        sys = {v1, v2, Se2RVector{0.0, 0.0, 0.0, param(rng)}};
        break;
      }
      default:
        throw std::invalid_argument("sample_system: no planner for family " +
                                    std::string(to_string(family)));
    }
    if (conditioning(family, sys) >= kMinConditioning) return sys;
  }
}

bool sample_target(Family family, std::span<const AlgebraVector> f, std::mt19937_64& rng,
                   GroupElement& out, int max_attempts) {
  const double r = kTargetRange;
  switch (family) {
    case Family::S1:
      out = Se2Pose{angle(rng), uniform(rng, -r, r), uniform(rng, -r, r)};
      return true;
    case Family::T1:
    case Family::T3:
    case Family::T4: {
      const double th = angle(rng), x = uniform(rng, -r, r), y = uniform(rng, -r, r);
      out = Se2RPose{th, x, y, uniform(rng, -r, r)};
      return true;
    }
    case Family::SO3:
      for (int i = 0; i < max_attempts; ++i) {
        out = random_rotation(rng);
        if (domain_canonical(family, f, out).inside) return true;
      }
      return false;
    case Family::S2:
    case Family::T5:
    case Family::T2: {
      // Bounding box of the domain; candidates are kept only when the predicate holds.
      const double scale = family == Family::T2 ? 2.0 : 1.0;
      const double n = scale * std::sqrt(planar_gap2(f[0], f[1]));
      const double th_max = turn_limit(planar_norm2(f[0]), n * n);
      const Eigen::VectorXd p = coefficients(f[0]);
      for (int i = 0; i < max_attempts; ++i) {
        const double th = uniform(rng, -th_max, th_max);
        const double x = uniform(rng, -n, n), y = uniform(rng, -n, n);
        if (family == Family::S2) {
          out = Se2Pose{wrap_angle(th), x, y};
        } else if (family == Family::T5) {
          out = Se2RPose{wrap_angle(th), x, y, uniform(rng, -r, r)};
        } else {
          const double spread = 2.0 * kPi * std::abs(coefficients(f[1])(3) - p(3));
          out = Se2RPose{wrap_angle(th), x, y, p(3) * wrap_angle(th) + uniform(rng, -spread, spread)};
        }
        if (domain_canonical(family, f, out).inside) return true;
      }
      return false;
    }
    default:
      throw std::invalid_argument("sample_target: no planner for this family");
  }
}

FuzzReport fuzz_family(Family family, std::size_t systems, std::size_t targets_per_system,
                       std::uint64_t seed, Formula formula) {
  FuzzReport rep;
  rep.family = family;
  rep.formula = formula;
  rep.seed = seed;
  rep.systems = systems;
  rep.targets_per_system = targets_per_system;
  rep.sampling =
      "parameters uniform in [-5,5], conditioning >= 1e-3; global targets theta in (-pi,pi], "
      "x,y,z in [-20,20]; local targets rejection-sampled inside the domain";
  const std::vector<int> idx = multiindex(family);

  for (std::size_t i = 0; i < systems; ++i) {
    std::mt19937_64 rng = stream(seed, i);
    std::vector<AlgebraVector> sys;
    std::vector<GroupElement> targets;
    // Systems whose domain is too thin to hit by rejection are redrawn from the same stream.
    for (;;) {
      sys = sample_system(family, rng);
      targets.clear();
      GroupElement g;
      while (targets.size() < targets_per_system && sample_target(family, sys, rng, g)) {
        targets.push_back(g);
      }
      if (targets.size() == targets_per_system) break;
    }
    for (const auto& g : targets) {
      ++rep.trials;
      FuzzFailure fail;
      try {
        fail.times = ik_canonical(family, sys, g, {false, formula});
        fail.residual = pose_distance(fk(sys, idx, fail.times), g);
      } catch (const PlanningError& e) {
        fail.residual = std::numeric_limits<double>::quiet_NaN();
        fail.error = e.what();
      }
      if (std::isfinite(fail.residual)) rep.max_residual = std::max(rep.max_residual, fail.residual);
      if (!(fail.residual < rep.tolerance)) {
        fail.system_index = i;
        fail.system = sys;
        fail.target = g;
        rep.failures.push_back(std::move(fail));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------- impossibility

ImpossibilityScan impossibility_scan(const Se2RPair& sys, double beta, double t3_bound, int grid,
                                     ScanOrder order) {
  if (!(t3_bound > 0.0)) throw std::invalid_argument("impossibility_scan: t3_bound must be positive");
  if (grid < 3) throw std::invalid_argument("impossibility_scan: grid must be at least 3");
  if (grid % 2 == 0) ++grid;  // keep angle 0 on the grid

  // Residual at a fixed angle with the length chosen optimally in [-bound, bound].
  auto at = [&](double ang, double& len) {
    const double s = std::sin(ang / 2.0);
    const double ux = -2.0 * s * s, uy = std::sin(ang);
    const double uu = ux * ux + uy * uy;
    len = uu > 0.0 ? std::clamp(beta * uy / uu, -t3_bound, t3_bound) : 0.0;
    return std::hypot(len * ux, len * uy - beta);
  };

  const double step = 2.0 * kPi / (grid - 1);
  int best_i = 0;
  double best = std::numeric_limits<double>::infinity(), len = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double r = at(-kPi + step * i, len);
    if (r < best) {
      best = r;
      best_i = i;
    }
  }
  double best_angle = -kPi + step * best_i;

  // Golden-section refinement on the neighbouring grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(-kPi, best_angle - step), hi = std::min(kPi, best_angle + step);
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = at(x1, len), f2 = at(x2, len);
  for (int it = 0; it < 50; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = at(x1, len);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = at(x2, len);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double refined = at(mid, len);
  if (refined < best) {
    best = refined;
    best_angle = mid;
  }

  ImpossibilityScan out;
  out.order = order;
  out.t3_bound = t3_bound;
  out.beta = beta;
  out.grid = grid;
  out.best_residual = at(best_angle, len);
  out.angle = best_angle;
  out.length = len;
  std::vector<int> idx;
  if (order == ScanOrder::SecondFirst) {
    out.argmin = {-len, best_angle, len, -best_angle};
    idx = {2, 1, 2, 1};
  } else {
    out.argmin = {best_angle, len, -best_angle, -len};
    idx = {1, 2, 1, 2};
  }
  const std::array<Se2RVector, 2> fields{sys.v1, sys.v2};
  const Se2RPose target{0.0, -sys.v2.c * beta, sys.v2.b * beta, 0.0};
  out.pose_residual = pose_distance(fk(std::span<const Se2RVector>(fields), idx, out.argmin), target);
  return out;
}

// ---------------------------------------------------------------------------- tightness

TightnessReport domain_tightness(Family family, std::span<const AlgebraVector> f,
                                 std::size_t samples, std::uint64_t seed) {
  if (family != Family::S2 && family != Family::SO3 && family != Family::T2 && family != Family::T5) {
    throw std::invalid_argument("domain_tightness: only local families have a domain to probe");
  }
  if (!in_family(family, f, 1e-9)) {
    throw std::invalid_argument("domain_tightness: fields are not in canonical form");
  }
  TightnessReport rep;
  rep.family = family;
  rep.system.assign(f.begin(), f.end());
  rep.seed = seed;
  rep.requested = samples;
  std::mt19937_64 rng = stream(seed, 0);
  const std::vector<int> idx = multiindex(family);

  if (family == Family::SO3 && std::abs(coefficients(f[1])(2)) < 1e-12) {
    rep.note = "perpendicular fields: the domain is all of SO(3), no outside targets exist";
    return rep;
  }

  const double r = kTargetRange;
  auto candidate = [&]() -> GroupElement {
    if (family == Family::SO3) return random_rotation(rng);
    const double scale = family == Family::T2 ? 6.0 : 3.0;
    const double n = scale * std::sqrt(planar_gap2(f[0], f[1]));
    const double th = angle(rng), x = uniform(rng, -n, n), y = uniform(rng, -n, n);
    if (family == Family::S2) return Se2Pose{th, x, y};
    if (family == Family::T5) return Se2RPose{th, x, y, uniform(rng, -r, r)};
    const Eigen::VectorXd p = coefficients(f[0]);
    const double spread = 3.0 * kPi * std::abs(coefficients(f[1])(3) - p(3));
    return Se2RPose{th, x, y, p(3) * th + uniform(rng, -spread, spread)};
  };

  const std::size_t budget = 1000 * std::max<std::size_t>(samples, 1);
  for (std::size_t attempt = 0; attempt < budget && rep.outside < samples; ++attempt) {
    const GroupElement g = candidate();
    if (domain_canonical(family, f, g).inside) continue;
    ++rep.outside;
    try {
      const std::vector<double> times = ik_canonical(family, f, g, {true, Formula::Corrected});
      const double res = pose_distance(fk(f, idx, times), g);
      if (res < kRoundTripTol) ++rep.round_trips;
    } catch (const PlanningError&) {
    }
  }
  rep.excess_fraction =
      rep.outside > 0 ? static_cast<double>(rep.round_trips) / static_cast<double>(rep.outside) : 0.0;
  if (rep.outside < samples) rep.note = "attempt budget exhausted before reaching the requested count";
  return rep;
}

}  // namespace lieplan::verify
