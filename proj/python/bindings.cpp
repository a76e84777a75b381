// Python bindings. Structured values cross the boundary as the JSON documents the CLI uses;
// the Python package decodes them into dicts.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lieplan/io.hpp"

namespace py = pybind11;
using namespace lieplan;
using io::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw io::InputError(e.what());
  }
}

Formula formula(bool literal) { return literal ? Formula::PaperLiteral : Formula::Corrected; }

// Planning failures come back as {"error", "message", "verdict"?} documents.
std::string plan_json(const std::string& system, const std::string& target, bool force, bool literal) {
  const io::SystemSpec spec = io::system_from_json(parse(system));
  const GroupElement goal = io::target_from_json(parse(target), spec.group);
  try {
    const PlanResult r = plan(spec.fields, spec.group, goal, {.force = force, .formula = formula(literal)});
    return io::to_json(r, goal).dump();
  } catch (const PlanningError& e) {
    return io::error_json(to_string(e.kind()), e.what(), e.verdict()).dump();
  }
}

std::string classify_json(const std::string& system) {
  return io::to_json(classify(io::system_from_json(parse(system)).fields)).dump();
}

MotionPlan steps_plan(const std::vector<std::pair<int, double>>& steps) {
  MotionPlan p;
  for (const auto& [field, time] : steps) p.steps.push_back({field, time});
  return p;
}

std::string fk_json(const std::string& system, const std::vector<std::pair<int, double>>& steps) {
  const io::SystemSpec spec = io::system_from_json(parse(system));
  return io::target_to_json(fk(spec.fields, steps_plan(steps))).dump();
}

std::vector<std::pair<double, Eigen::MatrixXd>> trajectory(const std::string& system,
                                                           const std::vector<std::pair<int, double>>& steps,
                                                           double dt) {
  const io::SystemSpec spec = io::system_from_json(parse(system));
  std::vector<std::pair<double, Eigen::MatrixXd>> out;
  for (const auto& s : sample_trajectory(spec.fields, steps_plan(steps), dt)) out.emplace_back(s.time, matrix(s.pose));
  return out;
}

AlgebraVector algebra_vector(const std::string& group, const std::vector<double>& coefficients) {
  return io::vector_from_json(json(coefficients), parse_group(group));
}

}  // namespace

PYBIND11_MODULE(_lieplan, m) {
  m.doc() = "Closed-form motion planning on SE(2), SO(3) and SE(2)xR";

  py::register_exception<io::InputError>(m, "InputError", PyExc_ValueError);

  m.def("classify_json", &classify_json, py::arg("system"));
  m.def("plan_json", &plan_json, py::arg("system"), py::arg("target"), py::arg("force") = false,
        py::arg("paper_literal") = false);
  m.def("fk_json", &fk_json, py::arg("system"), py::arg("steps"));
  m.def("trajectory", &trajectory, py::arg("system"), py::arg("steps"), py::arg("dt"),
        "(elapsed time, homogeneous matrix) samples along the plan.");

  m.def(
      "exp",
      [](const std::string& group, const std::vector<double>& v, double t) {
        return matrix(exp_map(algebra_vector(group, v), t));
      },
      py::arg("group"), py::arg("vector"), py::arg("t"), "Closed-form exp(t V) as a matrix.");
  m.def(
      "series_exp", [](const Eigen::MatrixXd& a) { return verify::series_exp(a); }, py::arg("matrix"),
      "Taylor-series matrix exponential with scaling and squaring.");
  m.def(
      "controllability_margin",
      [](const std::string& group, const std::vector<double>& v1, const std::vector<double>& v2) {
        return controllability_margin(algebra_vector(group, v1), algebra_vector(group, v2));
      },
      py::arg("group"), py::arg("v1"), py::arg("v2"));
  m.def(
      "fuzz_json",
      [](const std::string& family, std::size_t systems, std::size_t targets, std::uint64_t seed, bool literal) {
        return io::to_json(verify::fuzz_family(parse_family(family), systems, targets, seed, formula(literal))).dump();
      },
      py::arg("family"), py::arg("systems") = 100, py::arg("targets") = 100, py::arg("seed") = 1,
      py::arg("paper_literal") = false);
  m.def(
      "impossibility_json",
      [](const std::vector<double>& v1, const std::vector<double>& v2, double beta, double bound) {
        const auto f1 = std::get<Se2RVector>(algebra_vector("SE2xR", v1));
        const auto f2 = std::get<Se2RVector>(algebra_vector("SE2xR", v2));
        return io::to_json(verify::impossibility_scan({f1, f2}, beta, bound)).dump();
      },
      py::arg("v1"), py::arg("v2"), py::arg("beta"), py::arg("t3_bound"));
}
