#include "lieplan/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "lieplan/io.hpp"
#include "lieplan/scalar.hpp"

namespace lieplan::cli {

namespace {

using io::json;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

void emit(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw io::InputError("cannot write '" + path.string() + "'");
  f << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_text(const std::vector<TrajectorySample>& samples) {
  std::ostringstream s;
  io::write_csv(s, samples);
  return s.str();
}

std::string svg_text(Group g, const std::vector<TrajectorySample>& samples, const GroupElement& target,
                     const std::string& title) {
  std::ostringstream s;
  io::write_svg(s, g, samples, target, title);
  return s.str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LIE_PLANNER_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw io::InputError("LIE_PLANNER_SEED is not an unsigned integer");
    }
  }
  return 1;
}

Family family_arg(const std::string& s) {
  try {
    const Family f = parse_family(s);
    (void)multiindex(f);
    return f;
  } catch (const std::invalid_argument&) {
    throw io::InputError("unknown planner family '" + s + "'");
  }
}

int report_planning_error(const PlanningError& e, Streams s) {
  emit(s.out, io::error_json(to_string(e.kind()), e.what(), e.verdict()));
  s.err << "lieplan: " << e.what() << '\n';
  switch (e.kind()) {
    case PlanErrorKind::Uncontrollable:
    case PlanErrorKind::OutOfCatalog:
      return kExitUncontrollable;
    case PlanErrorKind::OutsideDomain:
    case PlanErrorKind::DegenerateL:
      return kExitOutsideDomain;
  }
  return kExitInput;
}

// ---------------------------------------------------------------------------- commands

int cmd_classify(const std::string& system_path, Streams s) {
  const io::SystemSpec spec = io::system_from_json(io::load_json(system_path));
  const SystemClass c = classify(spec.fields);
  if (c.family == Family::Uncontrollable || c.family == Family::OutOfCatalog) {
    json j = io::error_json(to_string(c.family), c.note);
    j["family"] = std::string(to_string(c.family));
    emit(s.out, j);
    return kExitUncontrollable;
  }
  emit(s.out, io::to_json(c));
  return kExitOk;
}

struct PlanArgs {
  std::string system;
  std::string target;
  std::string traj;
  std::string svg;
  bool force = false;
  bool paper_literal = false;
  double dt = 0.01;
};

int cmd_plan(const PlanArgs& a, Streams s) {
  const io::SystemSpec spec = io::system_from_json(io::load_json(a.system));
  const GroupElement target = io::target_from_json(io::load_json(a.target), spec.group);
  const PlanOptions opts{a.force, a.paper_literal ? Formula::PaperLiteral : Formula::Corrected};
  const PlanResult r = plan(spec.fields, spec.group, target, opts);
  emit(s.out, io::to_json(r, target));
  if (!a.traj.empty() || !a.svg.empty()) {
    const auto samples = sample_trajectory(spec.fields, r.plan, a.dt);
    if (!a.traj.empty()) write_file(a.traj, csv_text(samples));
    if (!a.svg.empty()) {
      write_file(a.svg, svg_text(spec.group, samples, target,
                                 "family " + std::string(to_string(r.family)) + ", " +
                                     std::to_string(r.plan.steps.size()) + " primitives"));
    }
  }
  if (r.forced) s.err << "lieplan: target outside the domain (" << r.verdict.violated << "), forced\n";
  return kExitOk;
}

int cmd_fuzz(const std::string& family, std::size_t systems, std::size_t targets, std::uint64_t seed,
             bool paper_literal, Streams s) {
  const Family f = family_arg(family);
  const auto rep = verify::fuzz_family(f, systems, targets, seed,
                                       paper_literal ? Formula::PaperLiteral : Formula::Corrected);
  json j = io::to_json(rep);
  if (paper_literal && !rep.failures.empty()) {
    j["note"] = "the literal transcription fails the round trip; the corrected formulas are the default";
  }
  emit(s.out, j);
  return rep.failures.empty() ? kExitOk : kExitFuzzFailures;
}

struct Scenario {
  io::SystemSpec system;
  GroupElement target;
  bool force = false;
  std::string label;
};

std::vector<Scenario> figure_scenarios(int figure) {
  const double pi = std::numbers::pi;
  switch (figure) {
    case 1:
      // The two-rotating-field panel lies outside its proven domain and is forced.
      return {{{Group::SE2, {Se2Vector{1, 0, 0.5}, Se2Vector{0, 1, 0}}}, Se2Pose{pi / 6, 1, 1}, false, "s1"},
              {{Group::SE2, {Se2Vector{1, 0, 0.5}, Se2Vector{1, 1, 0}}}, Se2Pose{pi / 6, 1, 1}, true, "s2"}};
    case 2: {
      const double h = 1.0 / std::sqrt(2.0);
      return {{{Group::SO3, {So3Vector{0, 0, 1}, So3Vector{0, h, h}}},
               exp_so3(So3Vector{pi / 3, pi / 3, 0}, 1.0), false, "so3"}};
    }
    case 3:
      return {{{Group::SE2xR, {Se2RVector{1, 1, 0, 0.5}, Se2RVector{0, -2, 0, 1}}},
               Se2RPose{pi / 6, 10, 0, 1}, false, "t1"}};
    default:
      throw io::InputError("figure must be 1, 2 or 3");
  }
}

int cmd_demo(int figure, const std::string& out_dir, double dt, Streams s) {
  const auto scenarios = figure_scenarios(figure);
  std::filesystem::create_directories(out_dir);
  json summary = {{"figure", figure}, {"panels", json::array()}};
  for (const auto& sc : scenarios) {
    const PlanResult r = plan(sc.system.fields, sc.system.group, sc.target, {sc.force, Formula::Corrected});
    const auto samples = sample_trajectory(sc.system.fields, r.plan, dt);
    const std::string stem = "demo" + std::to_string(figure) + "_" + sc.label;
    const std::filesystem::path dir(out_dir);
    json scenario = {{"system", io::to_json(sc.system)}, {"target", io::target_to_json(sc.target)}};
    write_file(dir / (stem + "_scenario.json"), dump(scenario));
    write_file(dir / (stem + "_plan.json"), dump(io::to_json(r, sc.target)));
    write_file(dir / (stem + "_trajectory.csv"), csv_text(samples));
    write_file(dir / (stem + ".svg"),
               svg_text(sc.system.group, samples, sc.target,
                        "figure " + std::to_string(figure) + ": family " + std::string(to_string(r.family)) +
                            (r.forced ? " (forced outside the proven domain)" : "")));
    summary["panels"].push_back({{"label", sc.label},
                                 {"family", std::string(to_string(r.family))},
                                 {"primitives", r.plan.steps.size()},
                                 {"residual", r.residual},
                                 {"forced", r.forced},
                                 {"files", {stem + "_scenario.json", stem + "_plan.json",
                                            stem + "_trajectory.csv", stem + ".svg"}}});
  }
  emit(s.out, summary);
  return kExitOk;
}

Se2RPair scan_system(const std::string& path) {
  if (path.empty()) return {{1, 1, 0, 0.5}, {0, -2, 0, 1}};
  const io::SystemSpec spec = io::system_from_json(io::load_json(path));
  const SystemClass c = classify(spec.fields);
  if (c.family != Family::T1) throw io::InputError("the impossibility scan needs a T1 system");
  return {std::get<Se2RVector>(c.canonical_fields[0]), std::get<Se2RVector>(c.canonical_fields[1])};
}

std::vector<AlgebraVector> tightness_system(Family f, const std::string& path) {
  if (path.empty()) {
    const double h = 1.0 / std::sqrt(2.0);
    switch (f) {
      case Family::S2: return {Se2Vector{1, 0, 0.5}, Se2Vector{1, 1, 0}};
      case Family::SO3: return {So3Vector{0, 0, 1}, So3Vector{0, h, h}};
      case Family::T2: return {Se2RVector{1, 1, 0, 0}, Se2RVector{1, 0, 1, 1}};
      case Family::T5: return {Se2RVector{1, 1, 0, 1}, Se2RVector{1, 0, 1, 1}, Se2RVector{0, 0, 0, 1}};
      default: throw io::InputError("tightness applies to S2, SO3, T2 and T5");
    }
  }
  const io::SystemSpec spec = io::system_from_json(io::load_json(path));
  const SystemClass c = classify(spec.fields);
  if (c.family != f) {
    throw io::InputError("system classifies as " + std::string(to_string(c.family)) + ", not " +
                         std::string(to_string(f)));
  }
  return c.canonical_fields;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const Streams s{out, err};
  CLI::App app{"Closed-form motion planning for underactuated systems on SE(2), SO(3) and SE(2)xR"};
  app.name("lieplan");
  app.require_subcommand(1);

  std::string system_path;
  auto* classify_cmd = app.add_subcommand("classify", "Classify a system and print its canonical form");
  classify_cmd->add_option("system", system_path, "SystemSpec JSON file (or inline JSON)")->required();

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a motion to a target pose");
  plan_cmd->add_option("system", pa.system, "SystemSpec JSON file (or inline JSON)")->required();
  plan_cmd->add_option("--target", pa.target, "TargetSpec JSON file (or inline JSON)")->required();
  plan_cmd->add_option("--traj", pa.traj, "Write the sampled trajectory as CSV");
  plan_cmd->add_option("--svg", pa.svg, "Write the trajectory as SVG");
  plan_cmd->add_option("--dt", pa.dt, "Trajectory sampling step")->check(CLI::PositiveNumber);
  plan_cmd->add_flag("--force", pa.force, "Evaluate the planner outside its proven domain");
  plan_cmd->add_flag("--paper-literal", pa.paper_literal, "Use the uncorrected literal transcriptions (errata reproduced)");

  std::string family;
  std::size_t systems = 100, targets = 100;
  std::uint64_t seed = 0;
  bool paper_literal = false;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Round-trip fuzzing of one planner family");
  fuzz_cmd->add_option("--family", family, "S1, S2, SO3, T1, T2, T3, T4 or T5")->required();
  fuzz_cmd->add_option("--systems", systems, "Number of sampled systems");
  fuzz_cmd->add_option("--targets", targets, "Targets per system");
  auto* seed_opt = fuzz_cmd->add_option("--seed", seed, "RNG seed (default: $LIE_PLANNER_SEED or 1)");
  fuzz_cmd->add_flag("--paper-literal", paper_literal, "Use the uncorrected literal transcriptions (errata reproduced)");

  int figure = 0;
  std::string out_dir = ".";
  double demo_dt = 0.01;
  auto* demo_cmd = app.add_subcommand("demo", "Write a figure scenario (system, plan, CSV, SVG)");
  demo_cmd->add_option("figure", figure, "1, 2 or 3")->required();
  demo_cmd->add_option("--out", out_dir, "Output directory");
  demo_cmd->add_option("--dt", demo_dt, "Trajectory sampling step")->check(CLI::PositiveNumber);

  double beta = 1.0, bound = 100.0;
  int grid = 2001;
  std::string order = "2121", scan_path;
  auto* imp_cmd = app.add_subcommand("impossibility", "Scan the four-primitive reduced map");
  imp_cmd->add_option("--beta", beta, "Target offset");
  imp_cmd->add_option("--t3-bound", bound, "Bound on the translation time")->check(CLI::PositiveNumber);
  imp_cmd->add_option("--grid", grid, "Angle grid size (odd)")->check(CLI::Range(3, 10000000));
  imp_cmd->add_option("--order", order, "2121 or 1212")->check(CLI::IsMember({"2121", "1212"}));
  imp_cmd->add_option("--system", scan_path, "T1 SystemSpec (default: the figure 3 system)");

  std::string tight_family, tight_path;
  std::size_t samples = 1000;
  std::uint64_t tight_seed = 0;
  auto* tight_cmd = app.add_subcommand("tightness", "Probe targets outside a local planner's domain");
  tight_cmd->add_option("--family", tight_family, "S2, SO3, T2 or T5")->required();
  tight_cmd->add_option("--samples", samples, "Number of outside targets");
  tight_cmd->add_option("--system", tight_path, "SystemSpec (default: a reference system)");
  auto* tight_seed_opt = tight_cmd->add_option("--seed", tight_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*classify_cmd) return cmd_classify(system_path, s);
    if (*plan_cmd) return cmd_plan(pa, s);
    if (*fuzz_cmd) {
      return cmd_fuzz(family, systems, targets, seed_opt->count() ? seed : default_seed(), paper_literal, s);
    }
    if (*demo_cmd) return cmd_demo(figure, out_dir, demo_dt, s);
    if (*imp_cmd) {
      const auto scan = verify::impossibility_scan(
          scan_system(scan_path), beta, bound, grid,
          order == "2121" ? verify::ScanOrder::SecondFirst : verify::ScanOrder::FirstFirst);
      emit(out, io::to_json(scan));
      return kExitOk;
    }
    if (*tight_cmd) {
      const Family f = family_arg(tight_family);
      const auto sys = tightness_system(f, tight_path);
      emit(out, io::to_json(verify::domain_tightness(f, sys, samples,
                                                     tight_seed_opt->count() ? tight_seed : default_seed())));
      return kExitOk;
    }
  } catch (const PlanningError& e) {
    return report_planning_error(e, s);
  } catch (const io::InputError& e) {
    err << "lieplan: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "lieplan: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "lieplan: " << e.what() << '\n';
    return kExitInput;
  } catch (const io::json::exception& e) {
    err << "lieplan: invalid document: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace lieplan::cli
