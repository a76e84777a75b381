#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lieplan/algebra.hpp"
#include "lieplan/controllability.hpp"

namespace lieplan {

/// One motion primitive: flow along user field `field` (1-based) for signed `time`.
struct Step {
  int field = 1;
  double time = 0.0;
  friend bool operator==(const Step&, const Step&) = default;
};

struct MotionPlan {
  std::vector<Step> steps;
  friend bool operator==(const MotionPlan&, const MotionPlan&) = default;
};

/// Result of a local-inverse domain predicate. `margin` is the signed slack of the
/// tightest constraint; `violated` names it when the target is outside.
struct DomainVerdict {
  bool inside = true;
  std::string violated;
  double margin = 0.0;
};

enum class PlanErrorKind { Uncontrollable, OutsideDomain, OutOfCatalog, DegenerateL };

std::string_view to_string(PlanErrorKind k);

class PlanningError : public std::runtime_error {
 public:
  PlanningError(PlanErrorKind kind, const std::string& what,
                std::optional<DomainVerdict> verdict = std::nullopt)
      : std::runtime_error(what), kind_(kind), verdict_(std::move(verdict)) {}

  PlanErrorKind kind() const { return kind_; }
  const std::optional<DomainVerdict>& verdict() const { return verdict_; }

 private:
  PlanErrorKind kind_;
  std::optional<DomainVerdict> verdict_;
};

/// Which transcription of the inverse-kinematics formulas to evaluate. PaperLiteral keeps
/// the uncorrected T1/T2/T4 expressions (they do not round-trip on their whole stated
/// domain); Corrected is the default everywhere.
enum class Formula { Corrected, PaperLiteral };

struct IkOptions {
  /// Evaluate outside the proven domain instead of throwing OutsideDomain/DegenerateL.
  /// Invalid square roots and arccos arguments then propagate as NaN.
  bool force = false;
  Formula formula = Formula::Corrected;
};

// Canonical systems.
struct Se2Pair {
  Se2Vector v1, v2;
};
struct So3Pair {
  So3Vector v1{0.0, 0.0, 1.0};
  So3Vector v2;
};
struct Se2RPair {
  Se2RVector v1, v2;
};
struct Se2RTriple {
  Se2RVector v1, v2, v3;
};

// Product of exponentials exp(t1 V_{i1}) ... exp(tk V_{ik}); indices are 1-based.
// Throws std::invalid_argument on a length mismatch or an index out of range.
Se2Pose fk(std::span<const Se2Vector> fields, std::span<const int> multiindex,
           std::span<const double> times);
Rotation fk(std::span<const So3Vector> fields, std::span<const int> multiindex,
            std::span<const double> times);
Se2RPose fk(std::span<const Se2RVector> fields, std::span<const int> multiindex,
            std::span<const double> times);
GroupElement fk(std::span<const AlgebraVector> fields, std::span<const int> multiindex,
                std::span<const double> times);
GroupElement fk(std::span<const AlgebraVector> fields, const MotionPlan& plan);

/// Primitive sequence used by each family's planner.
std::vector<int> multiindex(Family family);
bool is_global(Family family);

// SE(2)
std::array<double, 3> ik_s1(const Se2Pair& sys, const Se2Pose& target);
DomainVerdict domain_s2(const Se2Pair& sys, const Se2Pose& target);
std::array<double, 3> ik_s2(const Se2Pair& sys, const Se2Pose& target, IkOptions opts = {});

// SO(3), with V1 = e_z and unit V2 = (a, b, c).
DomainVerdict domain_so3(const So3Pair& sys, const Rotation& target);
std::array<double, 3> ik_so3(const So3Pair& sys, const Rotation& target, IkOptions opts = {});
/// Axis/angle form of the SO(3) domain: sin^2(arg(e_z, w)) (1 - cos angle) <= 2 (1 - c^2).
bool so3_domain_axis_angle(const So3Pair& sys, const Rotation& target);

// SE(2) x R
std::array<double, 5> ik_t1(const Se2RPair& sys, const Se2RPose& target, IkOptions opts = {});
DomainVerdict domain_t2(const Se2RPair& sys, const Se2RPose& target);
std::array<double, 5> ik_t2(const Se2RPair& sys, const Se2RPose& target, IkOptions opts = {});
std::array<double, 4> ik_t3(const Se2RTriple& sys, const Se2RPose& target);
std::array<double, 4> ik_t4(const Se2RTriple& sys, const Se2RPose& target, IkOptions opts = {});
DomainVerdict domain_t5(const Se2RTriple& sys, const Se2RPose& target);
std::array<double, 4> ik_t5(const Se2RTriple& sys, const Se2RPose& target, IkOptions opts = {});

/// Domain verdict of `family` for canonical fields; always inside for global families.
DomainVerdict domain_canonical(Family family, std::span<const AlgebraVector> canonical,
                               const GroupElement& target);

/// Coasting times of `family` on canonical fields, in multiindex(family) order.
std::vector<double> ik_canonical(Family family, std::span<const AlgebraVector> canonical,
                                 const GroupElement& target, IkOptions opts = {});

/// Maps canonical coasting times to a plan over the user's fields.
MotionPlan denormalize(const NormalizationRecord& record, Family family,
                       std::span<const double> canonical_times);

struct PlanOptions {
  bool force = false;
  Formula formula = Formula::Corrected;
};

struct PlanResult {
  Family family = Family::OutOfCatalog;
  SystemClass system;
  MotionPlan plan;
  DomainVerdict verdict;
  double residual = 0.0;
  bool forced = false;
};

/// Classifies the user's fields, plans on the canonical system and maps the coasting
/// times back. Three-input systems that contain a controllable pair are planned on the
/// first such pair. Throws PlanningError (Uncontrollable, OutOfCatalog, OutsideDomain
/// with the verdict attached, DegenerateL) and std::invalid_argument on malformed input.
PlanResult plan(std::span<const AlgebraVector> fields, Group group, const GroupElement& target,
                PlanOptions opts = {});

struct TrajectorySample {
  double time = 0.0;
  GroupElement pose;
};

/// Poses along each leg at spacing <= dt (elapsed time is sum of |t_i|). Zero-duration
/// legs emit no samples. The last sample is fk(fields, plan).
std::vector<TrajectorySample> sample_trajectory(std::span<const AlgebraVector> fields,
                                                const MotionPlan& plan, double dt);

}  // namespace lieplan
