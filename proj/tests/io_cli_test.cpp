#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lieplan/cli.hpp"
#include "lieplan/io.hpp"

using namespace lieplan;
using io::json;
namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "lieplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lieplan_io_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kFig1 = R"({"group":"SE2","fields":[[1,0,0.5],[0,1,0]]})";
const std::string kFig3 = R"({"group":"SE2xR","fields":[[1,1,0,0.5],[0,-2,0,1]]})";

TEST(Json, SystemAndTargetRoundTrip) {
  const io::SystemSpec spec{Group::SE2xR, {Se2RVector{1, 0.1, 1.0 / 3, -2}, Se2RVector{0, 1e-300, 5, 7}}};
  EXPECT_EQ(io::system_from_json(json::parse(io::to_json(spec).dump())), spec);

  const GroupElement rot = exp_so3({0.3, -1.2, 0.7}, 1.0);
  const GroupElement back = io::target_from_json(json::parse(io::target_to_json(rot).dump()), Group::SO3);
  EXPECT_EQ(pose_distance(rot, back), 0.0);
  const GroupElement pose = Se2Pose{pi / 7, -0.1, 1e-17};
  EXPECT_EQ(pose_distance(pose, io::target_from_json(io::target_to_json(pose), Group::SE2)), 0.0);

  const json aa = json::parse(R"({"axis_angle":{"axis":[0,0,2],"angle":0.5}})");
  EXPECT_LT(pose_distance(io::target_from_json(aa, Group::SO3), exp_so3({0, 0, 1}, 0.5)), 1e-15);
}

TEST(Json, InvalidDocumentsAreInputErrors) {
  EXPECT_THROW(io::system_from_json(json::parse(R"({"group":"SE3","fields":[[1,0,0],[0,1,0]]})")), io::InputError);
  EXPECT_THROW(io::system_from_json(json::parse(R"({"group":"SE2","fields":[[1,0],[0,1,0]]})")), io::InputError);
  EXPECT_THROW(io::system_from_json(json::parse(R"({"group":"SE2","fields":[[1,0,0]]})")), io::InputError);
  EXPECT_THROW(io::system_from_json(json::parse(R"({"fields":[[1,0,0],[0,1,0]]})")), io::InputError);
  EXPECT_THROW(io::target_from_json(json::parse(R"({"pose":[0,0,0],"rotation":[1,0,0,0,1,0,0,0,1]})"), Group::SE2),
               io::InputError);
  EXPECT_THROW(io::target_from_json(json::parse(R"({"pose":[0,0,0,0]})"), Group::SE2), io::InputError);
  EXPECT_THROW(io::target_from_json(json::parse(R"({"rotation":[2,0,0,0,1,0,0,0,1]})"), Group::SO3), io::InputError);
  EXPECT_THROW(io::target_from_json(json::parse(R"({"pose":[0,0,0]})"), Group::SO3), io::InputError);
  EXPECT_THROW(io::target_from_json(json::parse(R"({"axis_angle":{"axis":[0,0,0],"angle":1}})"), Group::SO3),
               io::InputError);
  EXPECT_THROW(io::load_json("{not json"), io::InputError);
  EXPECT_THROW(io::load_json("/nonexistent/file.json"), io::InputError);
}

TEST(Json, ReportsRoundTrip) {
  const std::vector<AlgebraVector> fields{So3Vector{1, 2, 0}, So3Vector{0, 1, 3}};
  const GroupElement target = exp_so3({0.1, 0.05, -0.1}, 1.0);
  const PlanResult r = plan(fields, Group::SO3, target);
  const json j = io::to_json(r, target);
  const auto doc = io::plan_result_from_json(json::parse(j.dump()), Group::SO3);
  EXPECT_EQ(io::to_json(doc.result, doc.target), j);
  EXPECT_EQ(doc.result.plan, r.plan);

  const PlanResult global = plan(std::vector<AlgebraVector>{Se2Vector{1, 0, 0.5}, Se2Vector{0, 1, 0}}, Group::SE2,
                                 Se2Pose{1, 2, 3});
  const json gj = io::to_json(global, Se2Pose{1, 2, 3});
  EXPECT_TRUE(gj["verdict"]["margin"].is_null());
  EXPECT_TRUE(std::isinf(io::plan_result_from_json(gj, Group::SE2).result.verdict.margin));

  const auto fuzz = verify::fuzz_family(Family::T2, 3, 3, 5, Formula::PaperLiteral);
  const json fj = io::to_json(fuzz);
  EXPECT_EQ(io::to_json(io::fuzz_report_from_json(json::parse(fj.dump()))), fj);
  EXPECT_EQ(fj["failure_count"], fuzz.failures.size());

  const auto scan = verify::impossibility_scan({{1, 1, 0, 0.5}, {0, -2, 0, 1}}, 1.0, 100.0, 501);
  const json sj = io::to_json(scan);
  EXPECT_EQ(io::to_json(io::scan_from_json(json::parse(sj.dump()))), sj);

  const auto tight = verify::domain_tightness(Family::S2, std::vector<AlgebraVector>{Se2Vector{1, 0, 0.5}, Se2Vector{1, 1, 0}},
                                              50, 3);
  const json tj = io::to_json(tight);
  EXPECT_EQ(io::to_json(io::tightness_from_json(json::parse(tj.dump()))), tj);
}

TEST(Csv, HeadersAndPrecision) {
  std::ostringstream se2, so3, se2r;
  io::write_csv(se2, {{0.0, Se2Pose{}}, {0.1, Se2Pose{0.1, 1.0 / 3, 0}}});
  io::write_csv(so3, {{0.0, Rotation{}}});
  io::write_csv(se2r, {{0.0, Se2RPose{}}});
  EXPECT_EQ(se2.str().substr(0, se2.str().find('\n')), "t,theta,x,y");
  EXPECT_EQ(so3.str().substr(0, so3.str().find('\n')), "t,r11,r12,r13,r21,r22,r23,r31,r32,r33");
  EXPECT_EQ(se2r.str().substr(0, se2r.str().find('\n')), "t,theta,x,y,z");
  EXPECT_NE(se2.str().find("0.33333333333333331"), std::string::npos);
}

TEST(Svg, IsStandaloneDocument) {
  const std::vector<AlgebraVector> fields{Se2RVector{1, 1, 0, 0.5}, Se2RVector{0, -2, 0, 1}};
  const GroupElement target = Se2RPose{pi / 6, 10, 0, 1};
  const auto samples = sample_trajectory(fields, plan(fields, Group::SE2xR, target).plan, 0.05);
  std::ostringstream s;
  io::write_svg(s, Group::SE2xR, samples, target, "t1 & <test>");
  const std::string svg = s.str();
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("&amp;"), std::string::npos);
  EXPECT_EQ(svg.find("<test>"), std::string::npos);
}

TEST(Cli, Classify) {
  const Outcome fig1 = run({"classify", kFig1});
  EXPECT_EQ(fig1.code, cli::kExitOk);
  EXPECT_EQ(fig1.doc()["family"], "S1");

  const Outcome parallel = run({"classify", R"({"group":"SE2","fields":[[1,2,3],[2,4,6]]})"});
  EXPECT_EQ(parallel.code, cli::kExitUncontrollable);
  EXPECT_EQ(parallel.doc()["family"], "Uncontrollable");

  const Outcome t4 = run({"classify", R"({"group":"SE2xR","fields":[[1,0,1,0],[0,0,1,0],[0,0,0,2]]})"});
  EXPECT_EQ(t4.code, cli::kExitOk);
  EXPECT_EQ(t4.doc()["family"], "T4");
  EXPECT_EQ(t4.doc()["scales"][2], 0.5);

  const auto file = scratch("fig1.json");
  std::ofstream(file) << kFig1;
  EXPECT_EQ(run({"classify", file.string()}).code, cli::kExitOk);
  EXPECT_EQ(run({"classify", "{bad"}).code, cli::kExitInput);
  EXPECT_EQ(run({"classify"}).code, cli::kExitInput);
  EXPECT_EQ(run({}).code, cli::kExitInput);
}

TEST(Cli, Plan) {
  const auto csv = scratch("fig3.csv"), svg = scratch("fig3.svg");
  const Outcome fig3 = run({"plan", kFig3, "--target", R"({"pose":[0.5235987755982988,10,0,1]})", "--traj", csv.string(),
                        "--svg", svg.string()});
  ASSERT_EQ(fig3.code, cli::kExitOk) << fig3.err;
  EXPECT_EQ(fig3.doc()["steps"].size(), 5u);
  EXPECT_LT(fig3.doc()["residual"].get<double>(), 1e-9);
  const std::string text = read_file(csv);
  std::istringstream lines(text);
  std::string line, last;
  while (std::getline(lines, line)) if (!line.empty()) last = line;
  double t, theta, x, y, z;
  char sep;
  std::istringstream row(last);
  row >> t >> sep >> theta >> sep >> x >> sep >> y >> sep >> z;
  EXPECT_NEAR(theta, pi / 6, 1e-9);
  EXPECT_NEAR(x, 10, 1e-9);
  EXPECT_NEAR(y, 0, 1e-9);
  EXPECT_NEAR(z, 1, 1e-9);
  EXPECT_NE(read_file(svg).find("</svg>"), std::string::npos);

  const std::string s2 = R"({"group":"SE2","fields":[[1,0,0.5],[1,1,0]]})";
  const Outcome outside = run({"plan", s2, "--target", R"({"pose":[0,50,0]})"});
  EXPECT_EQ(outside.code, cli::kExitOutsideDomain);
  EXPECT_EQ(outside.doc()["error"], "OutsideDomain");
  EXPECT_EQ(outside.doc()["verdict"]["violated"], "translation bound");
  const Outcome forced = run({"plan", s2, "--target", R"({"pose":[0.5235987755982988,1,1]})", "--force"});
  EXPECT_EQ(forced.code, cli::kExitOk);
  EXPECT_TRUE(forced.doc()["forced"].get<bool>());

  EXPECT_EQ(run({"plan", R"({"group":"SE2","fields":[[1,2,3],[2,4,6]]})", "--target", R"({"pose":[0,1,0]})"}).code,
            cli::kExitUncontrollable);
  EXPECT_EQ(run({"plan", kFig1}).code, cli::kExitInput);
  EXPECT_EQ(run({"plan", kFig1, "--target", R"({"pose":[0,1]})"}).code, cli::kExitInput);
  EXPECT_EQ(run({"plan", kFig1, "--target", R"({"pose":[0,1,0]})", "--dt", "0"}).code, cli::kExitInput);
}

TEST(Cli, FuzzDeterminismAndExitCodes) {
  const Outcome a = run({"fuzz", "--family", "S1", "--systems", "20", "--targets", "10", "--seed", "9"});
  const Outcome b = run({"fuzz", "--family", "S1", "--systems", "20", "--targets", "10", "--seed", "9"});
  EXPECT_EQ(a.code, cli::kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.doc()["failure_count"], 0);

  const Outcome literal = run({"fuzz", "--family", "T2", "--systems", "5", "--targets", "5", "--paper-literal"});
  EXPECT_EQ(literal.code, cli::kExitFuzzFailures);
  EXPECT_TRUE(literal.doc().contains("note"));
  EXPECT_EQ(run({"fuzz", "--family", "T9"}).code, cli::kExitInput);
  EXPECT_EQ(run({"fuzz", "--family", "Uncontrollable"}).code, cli::kExitInput);
}

TEST(Cli, SeedFromEnvironment) {
  ::setenv("LIE_PLANNER_SEED", "123", 1);
  const Outcome env = run({"fuzz", "--family", "T3", "--systems", "3", "--targets", "3"});
  ::unsetenv("LIE_PLANNER_SEED");
  const Outcome flag = run({"fuzz", "--family", "T3", "--systems", "3", "--targets", "3", "--seed", "123"});
  EXPECT_EQ(env.doc()["seed"], 123);
  EXPECT_EQ(env.out, flag.out);
  ::setenv("LIE_PLANNER_SEED", "abc", 1);
  EXPECT_EQ(run({"fuzz", "--family", "T3", "--systems", "1", "--targets", "1"}).code, cli::kExitInput);
  ::unsetenv("LIE_PLANNER_SEED");
}

TEST(Cli, Demos) {
  const auto dir = scratch("demos");
  for (int fig : {1, 2, 3}) {
    const Outcome r = run({"demo", std::to_string(fig), "--out", dir.string()});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    for (const auto& panel : r.doc()["panels"]) {
      EXPECT_LT(panel["residual"].get<double>(), 1e-9);
      for (const auto& f : panel["files"]) EXPECT_TRUE(std::filesystem::exists(dir / f.get<std::string>()));
    }
  }
  const json plan2 = json::parse(read_file(dir / "demo2_so3_plan.json"));
  EXPECT_EQ(plan2["steps"].size(), 3u);
  const auto final_rotation = io::target_from_json(plan2["target"], Group::SO3);
  EXPECT_LT(pose_distance(final_rotation, exp_so3({pi / 3, pi / 3, 0}, 1.0)), 1e-12);
  EXPECT_EQ(run({"demo", "4", "--out", dir.string()}).code, cli::kExitInput);
}

TEST(Cli, ImpossibilityAndTightness) {
  const Outcome scan = run({"impossibility", "--beta", "1", "--t3-bound", "100"});
  ASSERT_EQ(scan.code, cli::kExitOk);
  EXPECT_NEAR(scan.doc()["best_residual"].get<double>(), 0.005, 0.0025);
  const Outcome zero = run({"impossibility", "--beta", "0"});
  EXPECT_EQ(zero.doc()["best_residual"], 0.0);
  EXPECT_EQ(run({"impossibility", "--order", "2112"}).code, cli::kExitInput);
  EXPECT_EQ(run({"impossibility", "--system", kFig1}).code, cli::kExitInput);

  const Outcome tight = run({"tightness", "--family", "S2", "--samples", "100"});
  ASSERT_EQ(tight.code, cli::kExitOk);
  EXPECT_TRUE(tight.doc().contains("excess_fraction"));
  EXPECT_EQ(run({"tightness", "--family", "S1"}).code, cli::kExitInput);
}

}  // namespace
