#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "lieplan/algebra.hpp"
#include "lieplan/controllability.hpp"
#include "lieplan/planners.hpp"
#include "lieplan/verify.hpp"

namespace lieplan::io {

using nlohmann::json;

/// Raised on malformed or invalid input documents.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSpec {
  Group group = Group::SE2;
  std::vector<AlgebraVector> fields;
  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

// Documents. Every to_json has a matching from_json; parse(serialize(x)) == x.
json to_json(const SystemSpec& s);
SystemSpec system_from_json(const json& j);

/// Target document: {"pose": [...]}, {"rotation": [9 row-major]} or
/// {"axis_angle": {"axis": [3], "angle": a}}. Rotations are written as "rotation".
json target_to_json(const GroupElement& g);
GroupElement target_from_json(const json& j, Group group);

json to_json(const AlgebraVector& v);
AlgebraVector vector_from_json(const json& j, Group group);

json to_json(const SystemClass& c);
SystemClass class_from_json(const json& j, Group group);

json to_json(const DomainVerdict& v);
DomainVerdict verdict_from_json(const json& j);

json to_json(const MotionPlan& p);
MotionPlan plan_from_json(const json& j);

json to_json(const PlanResult& r, const GroupElement& target);
struct PlanDocument {
  PlanResult result;
  GroupElement target;
};
PlanDocument plan_result_from_json(const json& j, Group group);

json to_json(const verify::FuzzReport& r);
verify::FuzzReport fuzz_report_from_json(const json& j);

json to_json(const verify::ImpossibilityScan& s);
verify::ImpossibilityScan scan_from_json(const json& j);

json to_json(const verify::TightnessReport& r);
verify::TightnessReport tightness_from_json(const json& j);

/// Error document emitted with non-zero exit codes.
json error_json(std::string_view kind, std::string_view message,
                const std::optional<DomainVerdict>& verdict = std::nullopt);

/// Parses a file path, or inline JSON when the argument starts with '{'.
json load_json(const std::string& path_or_inline);

// Trajectory export.
void write_csv(std::ostream& os, const std::vector<TrajectorySample>& samples);
void write_svg(std::ostream& os, Group group, const std::vector<TrajectorySample>& samples,
               const GroupElement& target, const std::string& title);

}  // namespace lieplan::io
