#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lieplan/algebra.hpp"
#include "lieplan/controllability.hpp"
#include "lieplan/planners.hpp"

namespace lieplan::verify {

// The oracles below deliberately avoid the closed forms in algebra and controllability.

/// exp(m) by scaling and squaring with a truncated Taylor series on the scaled block.
Eigen::MatrixXd series_exp(const Eigen::MatrixXd& m, int terms = 24);

/// Matrix representative of an algebra vector: 3x3 for se(2) and so(3), 4x4 for se(2) x R.
Eigen::MatrixXd generator(const AlgebraVector& v);

/// series_exp(t * generator(v)).
Eigen::MatrixXd series_flow(const AlgebraVector& v, double t);

/// Numeric rank of fields plus commutators with at most `depth` factors (depth >= 1),
/// singular values counted above sqrt(kRankEpsilon) on unit max-coefficient generators.
int lie_closure_rank(std::span<const AlgebraVector> fields, int depth);

/// Product of the largest dim(algebra) singular values of the same closure matrix; zero when
/// fewer rows exist. For two fields at depth 2 this is |det| of (V1, V2, [V1, V2]), the
/// quantity the determinant-based rank conditions threshold.
double lie_closure_volume(std::span<const AlgebraVector> fields, int depth);

/// Deterministic stream for item `index` of a run seeded with `seed`.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index);
/// Uniform in [0, 1) with 53 random bits; platform independent.
double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);
Rotation random_rotation(std::mt19937_64& rng);

/// Parameter range of sampled canonical systems and the rejection threshold on each
/// family's conditioning quantity.
inline constexpr double kParamRange = 5.0;
inline constexpr double kMinConditioning = 1e-3;
inline constexpr double kTargetRange = 20.0;
inline constexpr double kRoundTripTol = 1e-9;

/// Conditioning quantity of a canonical system (the smallest of the nonzero quantities
/// the family predicate requires), used to reject near-degenerate samples.
double conditioning(Family family, std::span<const AlgebraVector> canonical);

std::vector<AlgebraVector> sample_system(Family family, std::mt19937_64& rng);

/// Target for `family`: uniform over theta in (-pi, pi], x, y, z in [-20, 20] for global
/// families, rejection-sampled inside the domain for local ones. Returns false when the
/// attempt budget is exhausted.
bool sample_target(Family family, std::span<const AlgebraVector> canonical,
                   std::mt19937_64& rng, GroupElement& out, int max_attempts = 100000);

struct FuzzFailure {
  std::size_t system_index = 0;
  std::vector<AlgebraVector> system;
  GroupElement target;
  std::vector<double> times;
  double residual = 0.0;  // NaN when the planner refused
  std::string error;
};

struct FuzzReport {
  Family family = Family::S1;
  Formula formula = Formula::Corrected;
  std::uint64_t seed = 0;
  std::size_t systems = 0;
  std::size_t targets_per_system = 0;
  std::size_t trials = 0;
  double tolerance = kRoundTripTol;
  double max_residual = 0.0;
  std::vector<FuzzFailure> failures;
  std::string sampling;
};

/// Round-trip fuzzing of one family's planner on sampled canonical systems. Each system
/// draws from its own stream, so results do not depend on evaluation order.
FuzzReport fuzz_family(Family family, std::size_t systems, std::size_t targets_per_system,
                       std::uint64_t seed, Formula formula = Formula::Corrected);

/// Which four-primitive sequence is scanned.
enum class ScanOrder { SecondFirst, FirstFirst };  // (2,1,2,1) and (1,2,1,2)

struct ImpossibilityScan {
  ScanOrder order = ScanOrder::SecondFirst;
  double t3_bound = 0.0;
  double beta = 0.0;
  int grid = 0;
  double best_residual = 0.0;
  /// Minimizing reduced-map arguments.
  double angle = 0.0;
  double length = 0.0;
  /// Coasting times of the four-primitive sequence realizing the minimizer.
  std::array<double, 4> argmin{};
  /// Pose distance from the sequence's endpoint to the target (0, -c2 beta, b2 beta, 0);
  /// equals |(b2, c2)| * best_residual.
  double pose_residual = 0.0;
};

/// Smallest distance from (0, beta) to f(angle, length) = length (cos angle - 1, sin angle)
/// over angle in [-pi, pi] and |length| <= t3_bound: an odd grid over the angle with the
/// length solved exactly, refined by 50 golden-section steps around the best grid point.
ImpossibilityScan impossibility_scan(const Se2RPair& sys, double beta, double t3_bound,
                                     int grid = 2001, ScanOrder order = ScanOrder::SecondFirst);

struct TightnessReport {
  Family family = Family::S2;
  std::vector<AlgebraVector> system;
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  std::size_t outside = 0;
  std::size_t round_trips = 0;
  double excess_fraction = 0.0;
  std::string note;
};

/// Samples targets outside the local planner's domain, force-evaluates the planner and
/// counts the ones that still round-trip below kRoundTripTol.
TightnessReport domain_tightness(Family family, std::span<const AlgebraVector> canonical,
                                 std::size_t samples, std::uint64_t seed);

}  // namespace lieplan::verify
