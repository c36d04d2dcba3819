#include "vicopt/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace vicopt {

namespace {

using nlohmann::json;

// Line of the first occurrence of "key" in the source text; 0 if not found.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Strict view over one JSON object: every key must be consumed.
class Reader {
 public:
  Reader(const json& node, std::string path, const std::string& text)
      : node_(node), path_(std::move(path)), text_(text) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  ~Reader() = default;
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  bool has(const std::string& key) {
    used_.insert(key);
    return node_.contains(key);
  }

  const json& at(const std::string& key) {
    used_.insert(key);
    return node_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& field_path, const std::string& message) const {
    const auto dot = field_path.find_last_of('.');
    const std::string key = dot == std::string::npos ? field_path : field_path.substr(dot + 1);
    throw ParseError(message, line_of_key(text_, key), field_path);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) fail(field(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(field(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(field(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(field(key), "expected true or false");
    return v.get<bool>();
  }

  Vector6 vec6(const std::string& key, const Vector6& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (v.is_number()) return Vector6::Constant(v.get<double>());
    if (!v.is_array() || v.size() != kAxes) fail(field(key), "expected a number or an array of 6 numbers");
    Vector6 out;
    for (int i = 0; i < kAxes; ++i) {
      if (!v[i].is_number()) fail(field(key), "expected numbers");
      out(i) = v[i].get<double>();
    }
    return out;
  }

  std::array<bool, kAxes> mask(const std::string& key, const std::array<bool, kAxes>& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array() || v.size() != kAxes) fail(field(key), "expected an array of 6 booleans");
    std::array<bool, kAxes> out{};
    for (int i = 0; i < kAxes; ++i) {
      if (!v[i].is_boolean()) fail(field(key), "expected booleans");
      out[i] = v[i].get<bool>();
    }
    return out;
  }

  std::array<double, 2> range(const std::string& key, const std::array<double, 2>& fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(field(key), "expected [lo, hi]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) fail(field(it.key()), "unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& node_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> used_;
};

SegmentShape parse_shape(Reader& r, const std::string& key, SegmentShape fallback) {
  const std::string s = r.string(key, fallback == SegmentShape::Constant ? "constant" : "half_sine");
  if (s == "constant") return SegmentShape::Constant;
  if (s == "half_sine") return SegmentShape::HalfSine;
  r.fail(r.field(key), "expected \"constant\" or \"half_sine\"");
}

ImpedanceGains parse_gains(const json& node, const std::string& path, const std::string& text,
                           const ImpedanceGains& fallback) {
  Reader r(node, path, text);
  ImpedanceGains g;
  g.mass = r.vec6("mass", fallback.mass);
  g.damping = r.vec6("damping", fallback.damping);
  g.stiffness = r.vec6("stiffness", fallback.stiffness);
  r.finish();
  return g;
}

void parse_environment(const json& node, const std::string& text, Scenario& s) {
  Reader r(node, "environment", text);
  if (r.has("surfaces")) {
    const json& list = r.at("surfaces");
    if (!list.is_array()) r.fail("environment.surfaces", "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      Reader sr(list[k], "environment.surfaces[" + std::to_string(k) + "]", text);
      ContactSurface c;
      c.axis = sr.integer("axis", c.axis);
      c.location = sr.number("location", c.location);
      c.stiffness = sr.number("stiffness", c.stiffness);
      c.damping = sr.number("damping", c.damping);
      c.penetration_sign = sr.integer("penetration_sign", c.penetration_sign);
      sr.finish();
      s.environment.surfaces.push_back(c);
    }
  }
  if (r.has("disturbance")) {
    Reader dr(r.at("disturbance"), "environment.disturbance", text);
    if (dr.has("segments")) {
      const json& list = dr.at("segments");
      if (!list.is_array()) dr.fail("environment.disturbance.segments", "expected an array");
      for (std::size_t k = 0; k < list.size(); ++k) {
        Reader sr(list[k], "environment.disturbance.segments[" + std::to_string(k) + "]", text);
        DisturbanceSegment seg;
        seg.t_start = sr.number("t_start", 0.0);
        seg.t_end = sr.number("t_end", 0.0);
        seg.wrench = sr.vec6("wrench", Wrench::Zero());
        seg.shape = parse_shape(sr, "shape", SegmentShape::Constant);
        sr.finish();
        s.environment.disturbance.segments.push_back(seg);
      }
    }
    if (dr.has("random")) {
      Reader rr(dr.at("random"), "environment.disturbance.random", text);
      RandomDisturbanceSpec spec;
      spec.t_begin = rr.number("t_begin", spec.t_begin);
      spec.t_end = rr.number("t_end", spec.t_end);
      spec.duration = rr.range("duration", spec.duration);
      spec.gap = rr.range("gap", spec.gap);
      spec.magnitude = rr.range("magnitude", spec.magnitude);
      spec.axes = rr.mask("axes", spec.axes);
      spec.shape = parse_shape(rr, "shape", spec.shape);
      rr.finish();
      s.random_disturbance = spec;
    }
    dr.finish();
  }
  if (r.has("reference")) {
    Reader rr(r.at("reference"), "environment.reference", text);
    const std::string interp = rr.string("interpolation", "hold");
    if (interp == "hold") {
      s.environment.reference.interpolation = Interpolation::Hold;
    } else if (interp == "linear") {
      s.environment.reference.interpolation = Interpolation::Linear;
    } else {
      rr.fail("environment.reference.interpolation", "expected \"hold\" or \"linear\"");
    }
    if (rr.has("waypoints")) {
      const json& list = rr.at("waypoints");
      if (!list.is_array()) rr.fail("environment.reference.waypoints", "expected an array");
      for (std::size_t k = 0; k < list.size(); ++k) {
        Reader wr(list[k], "environment.reference.waypoints[" + std::to_string(k) + "]", text);
        Waypoint w;
        w.t = wr.number("t", 0.0);
        w.position = wr.vec6("position", Vector6::Zero());
        wr.finish();
        s.environment.reference.waypoints.push_back(w);
      }
    }
    rr.finish();
  }
  r.finish();
}

void parse_loop(const json& node, const std::string& text, LoopConfig& loop) {
  Reader r(node, "loop", text);
  loop.tick_rate = r.number("tick_rate", loop.tick_rate);
  loop.buffer_period = r.number("buffer_period", loop.buffer_period);
  loop.gamma = r.number("gamma", loop.gamma);
  if (r.has("mode")) {
    try {
      loop.mode = parse_control_mode(r.string("mode", ""));
    } catch (const ValidationError& e) {
      r.fail("loop.mode", e.what());
    }
  }
  loop.solve_latency = r.number("solve_latency", loop.solve_latency);
  loop.substeps = r.integer("substeps", loop.substeps);
  const std::string cost = r.string("cost", loop.cost == CostKind::Fitave ? "fitave" : "itae");
  if (cost == "fitave") {
    loop.cost = CostKind::Fitave;
  } else if (cost == "itae") {
    loop.cost = CostKind::Itae;
  } else {
    r.fail("loop.cost", "expected \"fitave\" or \"itae\"");
  }
  const std::string mode = r.string("rollout", loop.rollout == RolloutMode::Resimulate ? "resimulate" : "recorded_state");
  if (mode == "resimulate") {
    loop.rollout = RolloutMode::Resimulate;
  } else if (mode == "recorded_state") {
    loop.rollout = RolloutMode::RecordedState;
  } else {
    r.fail("loop.rollout", "expected \"resimulate\" or \"recorded_state\"");
  }
  if (r.has("qp")) {
    Reader q(r.at("qp"), "loop.qp", text);
    loop.qp.tol = q.number("tol", loop.qp.tol);
    loop.qp.max_iter = q.integer("max_iter", loop.qp.max_iter);
    q.finish();
  }
  if (r.has("sqp")) {
    Reader q(r.at("sqp"), "loop.sqp", text);
    loop.sqp.max_iter = q.integer("max_iter", loop.sqp.max_iter);
    loop.sqp.tol = q.number("tol", loop.sqp.tol);
    loop.sqp.fd_step = q.number("fd_step", loop.sqp.fd_step);
    loop.sqp.max_resample = q.integer("max_resample", loop.sqp.max_resample);
    q.finish();
  }
  r.finish();
}

void parse_gain_section(const json& node, const std::string& text, Scenario& s) {
  Reader r(node, "gains", text);
  if (r.has("bounds")) {
    Reader b(r.at("bounds"), "gains.bounds", text);
    const double u_min = b.number("u_min", 1e-6);
    const double u_max = b.number("u_max", 1e6);
    s.bounds.lower.setConstant(u_min);
    s.bounds.upper.setConstant(u_max);
    const std::pair<const char*, int> blocks[] = {
        {"kd_prime", kDampingBlock}, {"kp_prime", kStiffnessBlock}, {"inv_mass", kInvMassBlock}};
    for (const auto& [key, offset] : blocks) {
      if (!b.has(key)) continue;
      const auto range = b.range(key, {u_min, u_max});
      s.bounds.lower.segment<kAxes>(offset).setConstant(range[0]);
      s.bounds.upper.segment<kAxes>(offset).setConstant(range[1]);
    }
    b.finish();
  }
  if (r.has("initial")) {
    Reader i(r.at("initial"), "gains.initial", text);
    const bool has_random = i.has("random");
    const bool has_fixed = i.has("fixed");
    if (has_random && has_fixed) i.fail("gains.initial", "give either \"random\" or \"fixed\"");
    if (has_random) {
      Reader rr(i.at("random"), "gains.initial.random", text);
      s.initial_gains.randomize = true;
      s.initial_gains.mass = rr.range("mass", s.initial_gains.mass);
      s.initial_gains.damping = rr.range("damping", s.initial_gains.damping);
      s.initial_gains.stiffness = rr.range("stiffness", s.initial_gains.stiffness);
      rr.finish();
    }
    if (has_fixed) {
      s.initial_gains.randomize = false;
      s.initial_gains.fixed = parse_gains(i.at("fixed"), "gains.initial.fixed", text, s.initial_gains.fixed);
    }
    i.finish();
  }
  if (r.has("constant")) s.constant_gains = parse_gains(r.at("constant"), "gains.constant", text, s.constant_gains);
  r.finish();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    throw ParseError(std::string("malformed scenario: ") + e.what(), line);
  }

  Scenario s;
  Reader r(root, "", text);
  if (!r.has("name")) throw ParseError("missing required key", 0, "name");
  s.name = r.string("name", "");
  s.seed = r.unsigned_integer("seed", s.seed);
  s.episode_length = r.number("episode_length", s.episode_length);
  if (r.has("initial_state")) {
    Reader i(r.at("initial_state"), "initial_state", text);
    s.initial.e = i.vec6("e", s.initial.e);
    s.initial.e_dot = i.vec6("e_dot", s.initial.e_dot);
    i.finish();
  }
  if (r.has("environment")) parse_environment(r.at("environment"), text, s);
  if (r.has("safe_set")) {
    Reader b(r.at("safe_set"), "safe_set", text);
    BoxSafeSet set;
    set.lower = b.vec6("d_lb", set.lower);
    set.upper = b.vec6("d_ub", set.upper);
    set.active = b.mask("active", set.active);
    b.finish();
    s.safe_set = set;
  }
  if (r.has("loop")) parse_loop(r.at("loop"), text, s.loop);
  if (r.has("gains")) parse_gain_section(r.at("gains"), text, s);
  if (r.has("metrics")) {
    Reader m(r.at("metrics"), "metrics", text);
    s.metrics.touch_force = m.number("touch_force", s.metrics.touch_force);
    s.metrics.settling_band = m.number("settling_band", s.metrics.settling_band);
    s.metrics.settling_floor = m.number("settling_floor", s.metrics.settling_floor);
    s.metrics.dwell = m.number("dwell", s.metrics.dwell);
    s.metrics.steady_window = m.number("steady_window", s.metrics.steady_window);
    s.metrics.contact_axis = m.integer("contact_axis", s.metrics.contact_axis);
    m.finish();
  }
  if (r.has("output")) {
    Reader o(r.at("output"), "output", text);
    s.output_dir = o.string("dir", "");
    o.finish();
  }
  r.finish();

  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("scenario '") + s.name + "': " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

namespace {

json vec(const Vector6& v) {
  json a = json::array();
  for (int i = 0; i < kAxes; ++i) a.push_back(v(i));
  return a;
}

json gains_json(const ImpedanceGains& g) {
  return {{"mass", vec(g.mass)}, {"damping", vec(g.damping)}, {"stiffness", vec(g.stiffness)}};
}

const char* shape_name(SegmentShape s) { return s == SegmentShape::Constant ? "constant" : "half_sine"; }

}  // namespace

std::string scenario_to_json(const Scenario& s, int indent) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["episode_length"] = s.episode_length;
  j["initial_state"] = {{"e", vec(s.initial.e)}, {"e_dot", vec(s.initial.e_dot)}};

  json env;
  json surfaces = json::array();
  for (const auto& c : s.environment.surfaces) {
    surfaces.push_back({{"axis", c.axis},
                        {"location", c.location},
                        {"stiffness", c.stiffness},
                        {"damping", c.damping},
                        {"penetration_sign", c.penetration_sign}});
  }
  env["surfaces"] = surfaces;
  json dist;
  json segments = json::array();
  for (const auto& seg : s.environment.disturbance.segments) {
    segments.push_back({{"t_start", seg.t_start},
                        {"t_end", seg.t_end},
                        {"wrench", vec(seg.wrench)},
                        {"shape", shape_name(seg.shape)}});
  }
  dist["segments"] = segments;
  if (s.random_disturbance) {
    const auto& r = *s.random_disturbance;
    dist["random"] = {{"t_begin", r.t_begin},
                      {"t_end", r.t_end},
                      {"duration", r.duration},
                      {"gap", r.gap},
                      {"magnitude", r.magnitude},
                      {"axes", r.axes},
                      {"shape", shape_name(r.shape)}};
  }
  env["disturbance"] = dist;
  json waypoints = json::array();
  for (const auto& w : s.environment.reference.waypoints) waypoints.push_back({{"t", w.t}, {"position", vec(w.position)}});
  env["reference"] = {{"interpolation", s.environment.reference.interpolation == Interpolation::Hold ? "hold" : "linear"},
                      {"waypoints", waypoints}};
  j["environment"] = env;

  if (s.safe_set) {
    j["safe_set"] = {{"d_lb", vec(s.safe_set->lower)}, {"d_ub", vec(s.safe_set->upper)}, {"active", s.safe_set->active}};
  }

  const auto& l = s.loop;
  j["loop"] = {{"tick_rate", l.tick_rate},
               {"buffer_period", l.buffer_period},
               {"gamma", l.gamma},
               {"mode", std::string(to_string(l.mode))},
               {"solve_latency", l.solve_latency},
               {"substeps", l.substeps},
               {"cost", l.cost == CostKind::Fitave ? "fitave" : "itae"},
               {"rollout", l.rollout == RolloutMode::Resimulate ? "resimulate" : "recorded_state"},
               {"qp", {{"tol", l.qp.tol}, {"max_iter", l.qp.max_iter}}},
               {"sqp",
                {{"max_iter", l.sqp.max_iter},
                 {"tol", l.sqp.tol},
                 {"fd_step", l.sqp.fd_step},
                 {"max_resample", l.sqp.max_resample}}}};

  // Bounds are stored per block; the loader broadcasts each block range.
  auto block = [&s](int offset) {
    return json::array({s.bounds.lower(offset), s.bounds.upper(offset)});
  };
  json gains;
  gains["bounds"] = {{"kd_prime", block(kDampingBlock)},
                     {"kp_prime", block(kStiffnessBlock)},
                     {"inv_mass", block(kInvMassBlock)}};
  if (s.initial_gains.randomize) {
    gains["initial"] = {{"random",
                         {{"mass", s.initial_gains.mass},
                          {"damping", s.initial_gains.damping},
                          {"stiffness", s.initial_gains.stiffness}}}};
  } else {
    gains["initial"] = {{"fixed", gains_json(s.initial_gains.fixed)}};
  }
  gains["constant"] = gains_json(s.constant_gains);
  j["gains"] = gains;

  const auto& m = s.metrics;
  j["metrics"] = {{"touch_force", m.touch_force},
                  {"settling_band", m.settling_band},
                  {"settling_floor", m.settling_floor},
                  {"dwell", m.dwell},
                  {"steady_window", m.steady_window},
                  {"contact_axis", m.contact_axis}};
  if (!s.output_dir.empty()) j["output"] = {{"dir", s.output_dir}};
  return j.dump(indent);
}

}  // namespace vicopt
