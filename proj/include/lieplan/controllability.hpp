#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lieplan/algebra.hpp"

namespace lieplan {

/// Canonical system families. Uncontrollable and OutOfCatalog are classification
/// outcomes, not errors.
enum class Family { S1, S2, SO3, T1, T2, T3, T4, T5, Uncontrollable, OutOfCatalog };

std::string_view to_string(Family f);
Family parse_family(std::string_view s);

/// Threshold on the (squared) determinant-like quantities of the controllability
/// lemmas, evaluated on fields rescaled to unit max-coefficient.
inline constexpr double kRankEpsilon = 1e-9;

/// Maps canonical fields back to the user's fields.
///
/// Canonical field i is scales[i] * V_{permutation[i]} (permutation is 1-based into the
/// user's list), so flowing along canonical field i for time t equals flowing along user
/// field permutation[i] for time scales[i] * t. For SO(3) systems `conjugation` holds the
/// rotation R0 with R0 * V1/|V1| = e_z, and canonical poses are R0 g R0^T.
struct NormalizationRecord {
  std::vector<int> permutation;
  std::vector<double> scales;
  std::optional<Rotation> conjugation;
};

struct SystemClass {
  Family family = Family::OutOfCatalog;
  std::vector<AlgebraVector> canonical_fields;
  NormalizationRecord record;
  std::string note;
};

// Lemma-based rank tests.
bool se2_controllable(const Se2Vector& v1, const Se2Vector& v2);
bool so3_controllable(const So3Vector& v1, const So3Vector& v2);
bool se2r_controllable_2(const Se2RVector& v1, const Se2RVector& v2);

/// |det| of the field/bracket matrix compared against kRankEpsilon by the lemma tests, on
/// unit max-coefficient inputs. For SE(2) x R, where five closure rows span four dimensions,
/// it is |a2 d1 - d2 a1| * |(a1, a2)| * (squared planar factor), the closure volume.
double controllability_margin(const AlgebraVector& v1, const AlgebraVector& v2);

SystemClass classify_se2(const Se2Vector& v1, const Se2Vector& v2);
SystemClass classify_so3(const So3Vector& v1, const So3Vector& v2);
SystemClass classify_se2r_2(const Se2RVector& v1, const Se2RVector& v2);
SystemClass classify_se2r_3(const Se2RVector& v1, const Se2RVector& v2, const Se2RVector& v3);

/// Dispatches on group and field count. Throws std::invalid_argument when the fields
/// are empty, of mixed groups, or more than three.
SystemClass classify(std::span<const AlgebraVector> fields);

/// True when `fields` are in the canonical form of `family`, to `tol`.
bool in_family(Family family, std::span<const AlgebraVector> fields, double tol = 1e-12);

/// Numeric rank of the span of the fields and their left-iterated brackets with at most
/// `depth` factors (depth 1 is the fields alone), on unit max-coefficient inputs, counting
/// singular values above sqrt(kRankEpsilon).
int bracket_closure_rank(std::span<const AlgebraVector> fields, int depth);

// Pose transport between user and canonical coordinates.
GroupElement to_canonical(const NormalizationRecord& record, const GroupElement& g);
GroupElement from_canonical(const NormalizationRecord& record, const GroupElement& g);

/// Rotation R0 with R0 * v/|v| = e_z (identity when v is already along +e_z).
Rotation align_to_z(const So3Vector& v);

}  // namespace lieplan
