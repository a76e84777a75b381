#include "lieplan/io.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lieplan/scalar.hpp"

namespace lieplan::io {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// JSON has no NaN/inf; both are written as null and each reader says which one it means.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double read_number(const json& j, double if_null) {
  if (j.is_null()) return if_null;
  if (!j.is_number()) throw InputError("expected a number, got " + j.dump());
  return j.get<double>();
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing key '") + key + "'");
  return j.at(key);
}

std::vector<double> read_array(const json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    throw InputError(std::string(what) + ": expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(std::string(what) + ": non-numeric entry " + x.dump());
    const double v = x.get<double>();
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite entry");
    out.push_back(v);
  }
  return out;
}

json matrix_rows(const Eigen::Matrix3d& r) {
  json a = json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) a.push_back(r(i, k));
  return a;
}

Eigen::Matrix3d matrix_from(const json& j) {
  const auto v = read_array(j, 9, "rotation");
  Eigen::Matrix3d r;
  r << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return r;
}

Group parse_group_checked(const json& j) {
  if (!j.is_string()) throw InputError("group must be a string");
  try {
    return parse_group(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

Family parse_family_checked(const json& j) {
  if (!j.is_string()) throw InputError("family must be a string");
  try {
    return parse_family(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

std::string formula_name(Formula f) { return f == Formula::Corrected ? "corrected" : "paper_literal"; }

Formula parse_formula(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "corrected") return Formula::Corrected;
  if (s == "paper_literal") return Formula::PaperLiteral;
  throw InputError("unknown formula '" + s + "'");
}

json fields_json(const std::vector<AlgebraVector>& fields) {
  json a = json::array();
  for (const auto& f : fields) a.push_back(to_json(f));
  return a;
}

std::vector<AlgebraVector> fields_from(const json& j, Group g) {
  if (!j.is_array()) throw InputError("fields must be an array");
  std::vector<AlgebraVector> out;
  for (const auto& f : j) out.push_back(vector_from_json(f, g));
  return out;
}

}  // namespace

json to_json(const AlgebraVector& v) {
  json a = json::array();
  const Eigen::VectorXd c = coefficients(v);
  for (Eigen::Index i = 0; i < c.size(); ++i) a.push_back(c(i));
  return a;
}

AlgebraVector vector_from_json(const json& j, Group group) {
  const auto n = static_cast<std::size_t>(algebra_dimension(group));
  const auto v = read_array(j, n, "field");
  return from_coefficients(group, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n)));
}

json to_json(const SystemSpec& s) {
  return {{"group", std::string(to_string(s.group))}, {"fields", fields_json(s.fields)}};
}

SystemSpec system_from_json(const json& j) {
  SystemSpec s;
  s.group = parse_group_checked(member(j, "group"));
  s.fields = fields_from(member(j, "fields"), s.group);
  if (s.fields.size() < 2 || s.fields.size() > 3) throw InputError("a system has two or three fields");
  return s;
}

json target_to_json(const GroupElement& g) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Se2Pose>) return {{"pose", {p.theta, p.x, p.y}}};
        else if constexpr (std::is_same_v<T, Se2RPose>) return {{"pose", {p.theta, p.x, p.y, p.z}}};
        else return {{"rotation", matrix_rows(p.r)}};
      },
      g);
}

GroupElement target_from_json(const json& j, Group group) {
  if (!j.is_object()) throw InputError("target must be an object");
  const int present = static_cast<int>(j.contains("pose")) + static_cast<int>(j.contains("rotation")) +
                      static_cast<int>(j.contains("axis_angle"));
  if (present != 1) throw InputError("target needs exactly one of pose, rotation, axis_angle");
  if (j.contains("pose")) {
    if (group == Group::SE2) {
      const auto v = read_array(j.at("pose"), 3, "pose");
      return make_se2_pose(v[0], v[1], v[2]);
    }
    if (group == Group::SE2xR) {
      const auto v = read_array(j.at("pose"), 4, "pose");
      return make_se2r_pose(v[0], v[1], v[2], v[3]);
    }
    throw InputError("SO3 targets use rotation or axis_angle");
  }
  if (group != Group::SO3) throw InputError("rotation targets need group SO3");
  if (j.contains("rotation")) {
    const Eigen::Matrix3d r = matrix_from(j.at("rotation"));
    if (!is_rotation(r)) throw InputError("rotation is not orthonormal with determinant 1");
    return Rotation{r};
  }
  const json& aa = j.at("axis_angle");
  const auto axis = read_array(member(aa, "axis"), 3, "axis");
  const double angle = read_number(member(aa, "angle"), kNaN);
  const Eigen::Vector3d w(axis[0], axis[1], axis[2]);
  if (!(w.norm() > 0.0) || !std::isfinite(angle)) throw InputError("axis_angle needs a nonzero axis and finite angle");
  return exp_so3(from_eigen(w.normalized()), angle);
}

json to_json(const SystemClass& c) {
  json j = {{"family", std::string(to_string(c.family))},
            {"canonical_fields", fields_json(c.canonical_fields)},
            {"permutation", c.record.permutation},
            {"scales", c.record.scales}};
  if (c.record.conjugation) j["conjugation"] = matrix_rows(c.record.conjugation->r);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

SystemClass class_from_json(const json& j, Group group) {
  SystemClass c;
  c.family = parse_family_checked(member(j, "family"));
  c.canonical_fields = fields_from(member(j, "canonical_fields"), group);
  c.record.permutation = member(j, "permutation").get<std::vector<int>>();
  c.record.scales = member(j, "scales").get<std::vector<double>>();
  if (j.contains("conjugation")) c.record.conjugation = Rotation{matrix_from(j.at("conjugation"))};
  if (j.contains("note")) c.note = j.at("note").get<std::string>();
  return c;
}

json to_json(const DomainVerdict& v) {
  return {{"inside", v.inside}, {"violated", v.violated}, {"margin", number(v.margin)}};
}

DomainVerdict verdict_from_json(const json& j) {
  // A null margin is the unbounded slack of a global planner.
  return {member(j, "inside").get<bool>(), member(j, "violated").get<std::string>(),
          read_number(member(j, "margin"), kInf)};
}

json to_json(const MotionPlan& p) {
  json steps = json::array();
  for (const auto& s : p.steps) steps.push_back({{"field", s.field}, {"time", s.time}});
  return steps;
}

MotionPlan plan_from_json(const json& j) {
  if (!j.is_array()) throw InputError("steps must be an array");
  MotionPlan p;
  for (const auto& s : j) p.steps.push_back({member(s, "field").get<int>(), read_number(member(s, "time"), kNaN)});
  return p;
}

json to_json(const PlanResult& r, const GroupElement& target) {
  return {{"family", std::string(to_string(r.family))},
          {"classification", to_json(r.system)},
          {"target", target_to_json(target)},
          {"steps", to_json(r.plan)},
          {"residual", number(r.residual)},
          {"verdict", to_json(r.verdict)},
          {"forced", r.forced}};
}

PlanDocument plan_result_from_json(const json& j, Group group) {
  PlanDocument d;
  d.result.family = parse_family_checked(member(j, "family"));
  d.result.system = class_from_json(member(j, "classification"), group);
  d.target = target_from_json(member(j, "target"), group);
  d.result.plan = plan_from_json(member(j, "steps"));
  d.result.residual = read_number(member(j, "residual"), kNaN);
  d.result.verdict = verdict_from_json(member(j, "verdict"));
  d.result.forced = member(j, "forced").get<bool>();
  return d;
}

json to_json(const verify::FuzzReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    const Group g = group_of(f.target);
    json e = {{"system_index", f.system_index},
              {"system", to_json(SystemSpec{g, f.system})},
              {"target", target_to_json(f.target)},
              {"times", json::array()},
              {"residual", number(f.residual)}};
    for (double t : f.times) e["times"].push_back(number(t));
    if (!f.error.empty()) e["error"] = f.error;
    failures.push_back(std::move(e));
  }
  return {{"family", std::string(to_string(r.family))},
          {"formula", formula_name(r.formula)},
          {"seed", r.seed},
          {"systems", r.systems},
          {"targets_per_system", r.targets_per_system},
          {"trials", r.trials},
          {"tolerance", r.tolerance},
          {"max_residual", number(r.max_residual)},
          {"failure_count", r.failures.size()},
          {"failures", std::move(failures)},
          {"sampling", r.sampling}};
}

verify::FuzzReport fuzz_report_from_json(const json& j) {
  verify::FuzzReport r;
  r.family = parse_family_checked(member(j, "family"));
  r.formula = parse_formula(member(j, "formula"));
  r.seed = member(j, "seed").get<std::uint64_t>();
  r.systems = member(j, "systems").get<std::size_t>();
  r.targets_per_system = member(j, "targets_per_system").get<std::size_t>();
  r.trials = member(j, "trials").get<std::size_t>();
  r.tolerance = member(j, "tolerance").get<double>();
  r.max_residual = read_number(member(j, "max_residual"), kNaN);
  r.sampling = member(j, "sampling").get<std::string>();
  for (const auto& e : member(j, "failures")) {
    verify::FuzzFailure f;
    const SystemSpec s = system_from_json(member(e, "system"));
    f.system_index = member(e, "system_index").get<std::size_t>();
    f.system = s.fields;
    f.target = target_from_json(member(e, "target"), s.group);
    for (const auto& t : member(e, "times")) f.times.push_back(read_number(t, kNaN));
    f.residual = read_number(member(e, "residual"), kNaN);
    if (e.contains("error")) f.error = e.at("error").get<std::string>();
    r.failures.push_back(std::move(f));
  }
  return r;
}

json to_json(const verify::ImpossibilityScan& s) {
  return {{"order", s.order == verify::ScanOrder::SecondFirst ? json({2, 1, 2, 1}) : json({1, 2, 1, 2})},
          {"beta", s.beta},
          {"t3_bound", s.t3_bound},
          {"grid", s.grid},
          {"best_residual", s.best_residual},
          {"angle", s.angle},
          {"length", s.length},
          {"argmin", s.argmin},
          {"pose_residual", s.pose_residual},
          {"estimate", s.beta * s.beta / (2.0 * s.t3_bound)}};
}

verify::ImpossibilityScan scan_from_json(const json& j) {
  verify::ImpossibilityScan s;
  const auto order = member(j, "order").get<std::vector<int>>();
  s.order = order.front() == 2 ? verify::ScanOrder::SecondFirst : verify::ScanOrder::FirstFirst;
  s.beta = member(j, "beta").get<double>();
  s.t3_bound = member(j, "t3_bound").get<double>();
  s.grid = member(j, "grid").get<int>();
  s.best_residual = member(j, "best_residual").get<double>();
  s.angle = member(j, "angle").get<double>();
  s.length = member(j, "length").get<double>();
  s.argmin = member(j, "argmin").get<std::array<double, 4>>();
  s.pose_residual = member(j, "pose_residual").get<double>();
  return s;
}

json to_json(const verify::TightnessReport& r) {
  const Group g = r.system.empty() ? Group::SE2 : group_of(r.system.front());
  return {{"family", std::string(to_string(r.family))},
          {"system", to_json(SystemSpec{g, r.system})},
          {"seed", r.seed},
          {"requested", r.requested},
          {"outside", r.outside},
          {"round_trips", r.round_trips},
          {"excess_fraction", r.excess_fraction},
          {"note", r.note}};
}

verify::TightnessReport tightness_from_json(const json& j) {
  verify::TightnessReport r;
  r.family = parse_family_checked(member(j, "family"));
  r.system = system_from_json(member(j, "system")).fields;
  r.seed = member(j, "seed").get<std::uint64_t>();
  r.requested = member(j, "requested").get<std::size_t>();
  r.outside = member(j, "outside").get<std::size_t>();
  r.round_trips = member(j, "round_trips").get<std::size_t>();
  r.excess_fraction = member(j, "excess_fraction").get<double>();
  r.note = member(j, "note").get<std::string>();
  return r;
}

json error_json(std::string_view kind, std::string_view message,
                const std::optional<DomainVerdict>& verdict) {
  json j = {{"error", std::string(kind)}, {"message", std::string(message)}};
  if (verdict) j["verdict"] = to_json(*verdict);
  return j;
}

json load_json(const std::string& path_or_inline) {
  try {
    const auto first = path_or_inline.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && path_or_inline[first] == '{') return json::parse(path_or_inline);
    std::ifstream in(path_or_inline);
    if (!in) throw InputError("cannot open '" + path_or_inline + "'");
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------- CSV

void write_csv(std::ostream& os, const std::vector<TrajectorySample>& samples) {
  if (samples.empty()) return;
  const Group g = group_of(samples.front().pose);
  switch (g) {
    case Group::SE2: os << "t,theta,x,y\n"; break;
    case Group::SO3: os << "t,r11,r12,r13,r21,r22,r23,r31,r32,r33\n"; break;
    case Group::SE2xR: os << "t,theta,x,y,z\n"; break;
  }
  const auto old_precision = os.precision(17);
  for (const auto& s : samples) {
    os << s.time;
    std::visit(
        [&os](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Se2Pose>) {
            os << ',' << p.theta << ',' << p.x << ',' << p.y;
          } else if constexpr (std::is_same_v<T, Se2RPose>) {
            os << ',' << p.theta << ',' << p.x << ',' << p.y << ',' << p.z;
          } else {
            for (int i = 0; i < 3; ++i)
              for (int k = 0; k < 3; ++k) os << ',' << p.r(i, k);
          }
        },
        s.pose);
    os << '\n';
  }
  os.precision(old_precision);
}

// ---------------------------------------------------------------------------- SVG

namespace {

struct Box {
  double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
  void add(double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  void pad(double frac, double min_extent) {
    const double w = std::max(x1 - x0, min_extent), h = std::max(y1 - y0, min_extent);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double half = 0.5 * std::max(w, h) * (1.0 + frac);
    x0 = cx - half;
    x1 = cx + half;
    y0 = cy - half;
    y1 = cy + half;
  }
};

// Maps a world box onto a square panel with y pointing up.
struct Panel {
  Box box;
  double left, top, size;
  double px(double x) const { return left + (x - box.x0) / (box.x1 - box.x0) * size; }
  double py(double y) const { return top + size - (y - box.y0) / (box.y1 - box.y0) * size; }
};

std::string escape_xml(const std::string& text) {
  std::string out;
  for (const char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

void triangle(std::ostream& os, const Panel& p, double x, double y, double theta, double len,
              const char* fill) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double pts[3][2] = {{len, 0.0}, {-0.5 * len, 0.4 * len}, {-0.5 * len, -0.4 * len}};
  os << "<polygon fill=\"" << fill << "\" stroke=\"black\" stroke-width=\"0.5\" points=\"";
  for (const auto& q : pts) {
    os << fmt(p.px(x + c * q[0] - s * q[1])) << ',' << fmt(p.py(y + s * q[0] + c * q[1])) << ' ';
  }
  os << "\"/>\n";
}

void planar_panel(std::ostream& os, const Panel& p, const std::vector<Se2Pose>& poses,
                  const Se2Pose& target) {
  const double len = 0.04 * (p.box.x1 - p.box.x0);
  os << "<rect x=\"" << fmt(p.left) << "\" y=\"" << fmt(p.top) << "\" width=\"" << fmt(p.size)
     << "\" height=\"" << fmt(p.size) << "\" fill=\"none\" stroke=\"#bbb\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (const auto& q : poses) os << fmt(p.px(q.x)) << ',' << fmt(p.py(q.y)) << ' ';
  os << "\"/>\n";
  const std::size_t every = std::max<std::size_t>(1, poses.size() / 12);
  for (std::size_t i = 0; i < poses.size(); i += every) {
    triangle(os, p, poses[i].x, poses[i].y, poses[i].theta, 0.6 * len, "#9ecae1");
  }
  triangle(os, p, 0.0, 0.0, 0.0, len, "#2ca02c");
  triangle(os, p, target.x, target.y, target.theta, len, "#d62728");
}

}  // namespace

void write_svg(std::ostream& os, Group group, const std::vector<TrajectorySample>& samples,
               const GroupElement& target, const std::string& title) {
  const double size = 480.0, margin = 40.0;
  const double width = group == Group::SE2 ? size + 2 * margin : 2 * size + 3 * margin;
  const double height = size + 2 * margin;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width)
     << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height)
     << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << fmt(margin) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
     << escape_xml(title) << "</text>\n";

  if (group == Group::SE2 || group == Group::SE2xR) {
    std::vector<Se2Pose> poses;
    std::vector<std::pair<double, double>> profile;
    Box box;
    for (const auto& s : samples) {
      if (const auto* q = std::get_if<Se2Pose>(&s.pose)) {
        poses.push_back(*q);
      } else {
        const auto& r = std::get<Se2RPose>(s.pose);
        poses.push_back({r.theta, r.x, r.y});
        profile.emplace_back(s.time, r.z);
      }
      box.add(poses.back().x, poses.back().y);
    }
    Se2Pose goal;
    if (const auto* q = std::get_if<Se2Pose>(&target)) goal = *q;
    else {
      const auto& r = std::get<Se2RPose>(target);
      goal = {r.theta, r.x, r.y};
    }
    box.add(0.0, 0.0);
    box.add(goal.x, goal.y);
    box.pad(0.15, 1.0);
    planar_panel(os, {box, margin, margin, size}, poses, goal);

    if (group == Group::SE2xR && !profile.empty()) {
      // z against elapsed time.
      Box zb;
      for (const auto& [t, z] : profile) zb.add(t, z);
      zb.add(0.0, 0.0);
      const double tw = std::max(zb.x1 - zb.x0, 1e-9), zh = std::max(zb.y1 - zb.y0, 1e-9);
      const double left = 2 * margin + size;
      os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(margin) << "\" width=\"" << fmt(size)
         << "\" height=\"" << fmt(size) << "\" fill=\"none\" stroke=\"#bbb\"/>\n"
         << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(margin - 6)
         << "\" font-family=\"sans-serif\" font-size=\"12\">z vs time</text>\n"
         << "<polyline fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\" points=\"";
      for (const auto& [t, z] : profile) {
        const double x = left + (t - zb.x0) / tw * size;
        const double y = margin + size - (z - zb.y0) / (zh * 1.1) * size - 0.05 * size;
        os << fmt(x) << ',' << fmt(y) << ' ';
      }
      os << "\"/>\n";
    }
  } else {
    // Body axes under an oblique projection, frames translated along x with time.
    const double t_end = samples.empty() ? 1.0 : std::max(samples.back().time, 1e-9);
    const double left = margin, span = width - 2 * margin - 60.0, mid = margin + size / 2.0;
    const double axis_len = 36.0;
    auto project = [](const Eigen::Vector3d& v) {
      return Eigen::Vector2d(v.x() + 0.45 * v.y(), v.z() + 0.3 * v.y());
    };
    const char* colors[3] = {"#d62728", "#2ca02c", "#1f77b4"};
    auto frame = [&](const Eigen::Matrix3d& r, double cx, double width_px) {
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d q = project(r.col(k)) * axis_len;
        os << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(mid) << "\" x2=\"" << fmt(cx + q.x())
           << "\" y2=\"" << fmt(mid - q.y()) << "\" stroke=\"" << colors[k] << "\" stroke-width=\""
           << fmt(width_px) << "\"/>\n";
      }
    };
    const std::size_t every = std::max<std::size_t>(1, samples.size() / 16);
    for (std::size_t i = 0; i < samples.size(); i += every) {
      frame(std::get<Rotation>(samples[i].pose).r, left + samples[i].time / t_end * span, 1.2);
    }
    if (!samples.empty()) frame(std::get<Rotation>(samples.back().pose).r, left + span, 2.0);
    frame(std::get<Rotation>(target).r, left + span + 50.0, 3.0);
  }
  os << "</svg>\n";
}

}  // namespace lieplan::io
