#include "swarmtele/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "swarmtele/simulator.hpp"

namespace swarmtele {

using nlohmann::json;

namespace {

// Field access with path-qualified SchemaError messages.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : obj_.items()) {
      if (!allowed.count(key)) throw SchemaError(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& at(const char* key) const {
    if (!obj_.contains(key)) throw SchemaError(path_ + ": missing required key '" + key + "'");
    return obj_.at(key);
  }
  std::string sub(const char* key) const { return path_ + "." + key; }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) throw SchemaError(sub(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(sub(key) + ": expected a finite number");
    return d;
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(sub(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::uint64_t uint(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw SchemaError(sub(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

 private:
  const json& obj_;
  std::string path_;
};

Eigen::VectorXd vector_of(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path + ": expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) throw SchemaError(path + "[" + std::to_string(k) + "]: expected a number");
    out[static_cast<Eigen::Index>(k)] = v[k].get<double>();
  }
  return out;
}

Eigen::MatrixXd columns_of(const json& v, const std::string& path, int n) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    throw SchemaError(path + ": expected one entry per robot (" + std::to_string(n) + ")");
  }
  Eigen::MatrixXd out;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd col = vector_of(v[i], path + "[" + std::to_string(i) + "]");
    if (i == 0) out.resize(col.size(), n);
    if (col.size() != out.rows() || col.size() == 0) {
      throw SchemaError(path + ": every robot needs the same positive number of coordinates");
    }
    out.col(i) = col;
  }
  return out;
}

json columns_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    out.push_back(std::vector<double>(m.col(i).data(), m.col(i).data() + m.rows()));
  }
  return out;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

RobotModel parse_robot(const json& doc, const std::string& path) {
  Reader r(doc, path);
  const std::string kind = r.string("kind");
  if (kind == "point_mass") {
    r.allow({"kind", "mass"});
    const double m = r.number("mass", 1.0);
    if (!(m > 0.0)) throw SchemaError(r.sub("mass") + ": must be > 0");
    return RobotModel::point_mass(m);
  }
  if (kind == "two_link") {
    r.allow({"kind", "m1", "m2", "l1", "l2"});
    const double m1 = r.number("m1", 1.0), m2 = r.number("m2", 1.0);
    const double l1 = r.number("l1", 1.0), l2 = r.number("l2", 1.0);
    if (!(m1 > 0.0 && m2 > 0.0 && l1 > 0.0 && l2 > 0.0)) {
      throw SchemaError(path + ": two_link masses and lengths must be > 0");
    }
    return RobotModel::two_link(m1, m2, l1, l2);
  }
  throw SchemaError(r.sub("kind") + ": expected 'point_mass' or 'two_link', got '" + kind + "'");
}

json robot_to_json(const RobotModel& model) {
  return std::visit(detail::Overloaded{
                        [](const PointMass& p) { return json{{"kind", "point_mass"}, {"mass", p.mass}}; },
                        [](const TwoLinkArm& a) {
                          return json{{"kind", "two_link"}, {"m1", a.m1}, {"m2", a.m2},
                                      {"l1", a.l1}, {"l2", a.l2}};
                        }},
                    model.kind());
}

ForceKind force_kind(const std::string& name, const std::string& path) {
  for (ForceKind k : {ForceKind::zero, ForceKind::step, ForceKind::sinusoid, ForceKind::bounded_random,
                      ForceKind::live}) {
    if (name == to_string(k)) return k;
  }
  throw SchemaError(path + ": unknown force profile '" + name + "'");
}

GainSchedule gain_schedule(const std::string& name, const std::string& path) {
  for (GainSchedule s : {GainSchedule::dynamic, GainSchedule::frozen, GainSchedule::no_lambda}) {
    if (name == to_string(s)) return s;
  }
  throw SchemaError(path + ": unknown gain schedule '" + name + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Scenario parse_scenario(const json& doc) {
  Reader r(doc, "scenario");
  r.allow({"schema_version", "name", "robots", "edges", "initial_state", "r", "epsilon", "f_bar",
           "force", "dt", "duration", "seed", "design", "negative_control"});
  if (r.uint("schema_version", 0) != static_cast<std::uint64_t>(kScenarioSchemaVersion)) {
    throw SchemaError("scenario.schema_version: expected " + std::to_string(kScenarioSchemaVersion));
  }
  Scenario s;
  s.name = r.has("name") ? r.string("name") : "unnamed";

  const json& robots = r.at("robots");
  if (!robots.is_array() || robots.size() < 2) {
    throw SchemaError("scenario.robots: expected an array of at least 2 robots");
  }
  for (std::size_t i = 0; i < robots.size(); ++i) {
    s.models.push_back(parse_robot(robots[i], "scenario.robots[" + std::to_string(i) + "]"));
  }
  const int n = static_cast<int>(s.models.size());

  const json& edges = r.at("edges");
  if (!edges.is_array()) throw SchemaError("scenario.edges: expected an array of [a, b] pairs");
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const json& e = edges[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw SchemaError("scenario.edges[" + std::to_string(k) + "]: expected [a, b] integer labels");
    }
    pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  try {
    s.tree = build_tree(n, pairs);
  } catch (const Error& e) {
    throw SchemaError(std::string("scenario.edges: ") + e.what());
  }

  Reader init(r.at("initial_state"), r.sub("initial_state"));
  init.allow({"positions", "velocities"});
  s.initial_positions = columns_of(init.at("positions"), init.sub("positions"), n);
  s.initial_velocities = init.has("velocities")
                             ? columns_of(init.at("velocities"), init.sub("velocities"), n)
                             : Eigen::MatrixXd::Zero(s.initial_positions.rows(), n);

  s.r = r.number("r");
  s.epsilon = r.number("epsilon");
  s.f_bar = r.number("f_bar");
  s.dt = r.number("dt", s.dt);
  s.duration = r.number("duration", s.duration);
  s.seed = r.uint("seed", 0);

  if (r.has("force")) {
    Reader f(r.at("force"), r.sub("force"));
    f.allow({"profile", "direction", "magnitude", "onset", "frequency", "phase", "hold"});
    s.force.kind = force_kind(f.string("profile"), f.sub("profile"));
    if (f.has("direction")) {
      s.force.direction = vector_of(f.at("direction"), f.sub("direction"));
      const double norm = s.force.direction.norm();
      if (!(norm > 0.0)) throw SchemaError(f.sub("direction") + ": must be non-zero");
      // Already-unit vectors are kept bit-for-bit so that a dumped scenario
      // parses back to the same document.
      if (std::abs(norm - 1.0) > 4 * std::numeric_limits<double>::epsilon()) s.force.direction /= norm;
    } else if (s.force.kind == ForceKind::step || s.force.kind == ForceKind::sinusoid) {
      throw SchemaError(f.sub("direction") + ": required for step and sinusoid profiles");
    }
    s.force.magnitude = f.number("magnitude", s.force.kind == ForceKind::zero ? 0.0 : s.f_bar);
    s.force.onset = f.number("onset", 0.0);
    s.force.frequency = f.number("frequency", 0.0);
    s.force.phase = f.number("phase", 0.0);
    s.force.hold = f.number("hold", 0.25);
  }

  if (r.has("design")) {
    Reader d(r.at("design"), r.sub("design"));
    d.allow({"rho", "sigma", "eta", "gamma", "zeta", "Gamma", "B"});
    DesignHeuristics& h = s.heuristics;
    h.rho = d.number("rho", h.rho);
    h.sigma = d.number("sigma", h.sigma);
    h.eta = d.number("eta", h.eta);
    h.gamma = d.number("gamma", h.gamma);
    h.zeta = d.number("zeta", h.zeta);
    h.Gamma = d.number("Gamma", h.Gamma);
    h.B = d.number("B", h.B);
    for (double v : {h.rho, h.sigma, h.eta, h.gamma, h.zeta, h.Gamma, h.B}) {
      if (!(v > 0.0)) throw SchemaError("scenario.design: every heuristic must be > 0");
    }
  }

  if (r.has("negative_control")) {
    Reader c(r.at("negative_control"), r.sub("negative_control"));
    c.allow({"gain_schedule", "force_scale", "controller"});
    NegativeControl& nc = s.negative_control;
    if (c.has("gain_schedule")) nc.schedule = gain_schedule(c.string("gain_schedule"), c.sub("gain_schedule"));
    nc.force_scale = c.number("force_scale", 1.0);
    if (c.has("controller")) {
      const std::string mode = c.string("controller");
      if (mode != "enabled" && mode != "disabled") {
        throw SchemaError(c.sub("controller") + ": expected 'enabled' or 'disabled'");
      }
      nc.controller_disabled = mode == "disabled";
    }
  }

  check_scenario_shape(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["name"] = s.name;
  doc["robots"] = json::array();
  for (const auto& m : s.models) doc["robots"].push_back(robot_to_json(m));
  doc["edges"] = json::array();
  for (const auto& [a, b] : s.tree.one_based_edges()) doc["edges"].push_back({a, b});
  doc["initial_state"] = {{"positions", columns_to_json(s.initial_positions)},
                          {"velocities", columns_to_json(s.initial_velocities)}};
  doc["r"] = s.r;
  doc["epsilon"] = s.epsilon;
  doc["f_bar"] = s.f_bar;
  json force = {{"profile", to_string(s.force.kind)}};
  if (s.force.direction.size()) force["direction"] = vec_json(s.force.direction);
  force["magnitude"] = s.force.magnitude;
  force["onset"] = s.force.onset;
  force["frequency"] = s.force.frequency;
  force["phase"] = s.force.phase;
  force["hold"] = s.force.hold;
  doc["force"] = force;
  doc["dt"] = s.dt;
  doc["duration"] = s.duration;
  doc["seed"] = s.seed;
  const DesignHeuristics& h = s.heuristics;
  doc["design"] = {{"rho", h.rho},   {"sigma", h.sigma}, {"eta", h.eta}, {"gamma", h.gamma},
                   {"zeta", h.zeta}, {"Gamma", h.Gamma}, {"B", h.B}};
  doc["negative_control"] = {
      {"gain_schedule", to_string(s.negative_control.schedule)},
      {"force_scale", s.negative_control.force_scale},
      {"controller", s.negative_control.controller_disabled ? "disabled" : "enabled"}};
  return doc;
}

std::string scenario_hash(const Scenario& scenario) {
  return scenario_fingerprint(scenario_to_json(scenario).dump());
}

json design_to_json(const DesignResult& r) {
  const GainDesign& d = r.design;
  return {{"gains",
           {{"rho", d.rho},
            {"sigma", d.sigma},
            {"eta", vec_json(d.eta)},
            {"gamma", vec_json(d.gamma)},
            {"zeta", vec_json(d.zeta)},
            {"Gamma", d.Gamma},
            {"B", vec_json(d.B)},
            {"D", vec_json(d.D)},
            {"Delta", d.Delta},
            {"f_bar", d.f_bar}}},
          {"potential",
           {{"P", r.params.P},
            {"Q", r.params.Q},
            {"r", r.params.r},
            {"epsilon", r.params.epsilon},
            {"psi_max", r.params.psi_max()}}},
          {"spectral", {{"lambda_L", r.spectral.lambda_L}, {"lambda_L_max", r.spectral.lambda_L_max}}},
          {"rounds", r.rounds},
          {"sigma_halvings", r.sigma_halvings}};
}

DesignResult design_from_json(const json& doc) {
  try {
    DesignResult r;
    const json& g = doc.at("gains");
    GainDesign& d = r.design;
    auto vec = [&](const char* key) { return vector_of(g.at(key), std::string("design.gains.") + key); };
    d.rho = g.at("rho").get<double>();
    d.sigma = g.at("sigma").get<double>();
    d.eta = vec("eta");
    d.gamma = vec("gamma");
    d.zeta = vec("zeta");
    d.Gamma = g.at("Gamma").get<double>();
    d.B = vec("B");
    d.D = vec("D");
    d.Delta = g.at("Delta").get<double>();
    d.f_bar = g.at("f_bar").get<double>();
    const json& p = doc.at("potential");
    r.params = {p.at("P").get<double>(), p.at("Q").get<double>(), p.at("r").get<double>(),
                p.at("epsilon").get<double>()};
    r.spectral = {doc.at("spectral").at("lambda_L").get<double>(),
                  doc.at("spectral").at("lambda_L_max").get<double>()};
    r.rounds = doc.at("rounds").get<int>();
    r.sigma_halvings = doc.at("sigma_halvings").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("design document: ") + e.what());
  }
}

std::vector<std::string> trace_columns(const Scenario& s) {
  std::vector<std::string> cols{"t"};
  const int dof = s.dof();
  for (int i = 1; i <= s.n_robots(); ++i) {
    const std::string id = std::to_string(i);
    for (const char* q : {"x", "xdot", "u"}) {
      for (int k = 0; k < dof; ++k) cols.push_back(q + id + "_" + std::to_string(k + 1));
    }
    cols.push_back("K" + id);
  }
  for (int k = 0; k < dof; ++k) cols.push_back("f_" + std::to_string(k + 1));
  for (const auto& [a, b] : s.tree.one_based_edges()) {
    cols.push_back("d" + std::to_string(a) + "_" + std::to_string(b));
  }
  cols.push_back("V_p");
  cols.push_back("V");
  return cols;
}

void write_trace(const SimTrace& trace, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Scenario& s = trace.scenario;
  const std::vector<std::string> cols = trace_columns(s);
  {
    std::ofstream out(dir / "trace.csv");
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    std::string row;
    for (const TraceSample& smp : trace.samples) {
      row = format_double(smp.t);
      auto put = [&row](double v) {
        row += ',';
        row += format_double(v);
      };
      for (int i = 0; i < s.n_robots(); ++i) {
        for (int k = 0; k < s.dof(); ++k) put(smp.x(k, i));
        for (int k = 0; k < s.dof(); ++k) put(smp.xdot(k, i));
        for (int k = 0; k < s.dof(); ++k) put(smp.u(k, i));
        put(smp.K[i]);
      }
      for (int k = 0; k < s.dof(); ++k) put(smp.f[k]);
      for (Eigen::Index e = 0; e < smp.edge_dist.size(); ++e) put(smp.edge_dist[e]);
      put(smp.V_p);
      put(smp.V);
      out << row << '\n';
    }
    if (!out) throw Error("failed writing " + (dir / "trace.csv").string());
  }
  json meta;
  meta["format"] = "swarmtele-trace";
  meta["version"] = 1;
  meta["scenario"] = scenario_to_json(s);
  meta["scenario_hash"] = trace.scenario_hash.empty() ? scenario_hash(s) : trace.scenario_hash;
  meta["seed"] = s.seed;
  meta["design"] = design_to_json(trace.design);
  meta["link_broken"] = trace.link_broken;
  meta["broken_time"] = nullable(trace.broken_time);
  meta["failure"] = trace.failure;
  meta["columns"] = cols;
  meta["samples"] = trace.samples.size();
  std::ofstream out(dir / "metadata.json");
  out << meta.dump(2) << '\n';
  if (!out) throw Error("failed writing " + (dir / "metadata.json").string());
}

SimTrace load_trace(const std::filesystem::path& dir) {
  SimTrace trace;
  json meta;
  {
    std::ifstream in(dir / "metadata.json");
    if (!in) throw TraceLoadError("missing " + (dir / "metadata.json").string());
    try {
      meta = json::parse(in);
    } catch (const json::parse_error& e) {
      throw TraceLoadError(std::string("metadata.json: ") + e.what());
    }
  }
  try {
    trace.scenario = parse_scenario(meta.at("scenario"));
    trace.design = design_from_json(meta.at("design"));
    trace.scenario_hash = meta.at("scenario_hash").get<std::string>();
    trace.link_broken = meta.at("link_broken").get<bool>();
    const json& bt = meta.at("broken_time");
    trace.broken_time = bt.is_null() ? std::numeric_limits<double>::quiet_NaN() : bt.get<double>();
    trace.failure = meta.at("failure").get<std::string>();
  } catch (const json::exception& e) {
    throw TraceLoadError(std::string("metadata.json: ") + e.what());
  } catch (const SchemaError& e) {
    throw TraceLoadError(std::string("metadata.json: ") + e.what());
  }
  if (trace.design.design.n_robots() != trace.scenario.n_robots()) {
    throw TraceLoadError("metadata.json: design and scenario disagree on the robot count");
  }

  const Scenario& s = trace.scenario;
  const std::vector<std::string> cols = trace_columns(s);
  std::ifstream in(dir / "trace.csv");
  if (!in) throw TraceLoadError("missing " + (dir / "trace.csv").string());
  std::string line;
  std::getline(in, line);
  std::string expected;
  for (std::size_t c = 0; c < cols.size(); ++c) expected += (c ? "," : "") + cols[c];
  if (line != expected) throw TraceLoadError("trace.csv: header does not match the documented column order");

  const int n = s.n_robots(), dof = s.dof(), m = s.tree.n_edges();
  std::vector<double> row(cols.size());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      char* parsed = nullptr;
      const std::string cell(first, last);
      row[c] = std::strtod(cell.c_str(), &parsed);
      if (cell.empty() || parsed != cell.c_str() + cell.size() || !std::isfinite(row[c])) {
        throw TraceLoadError("trace.csv line " + std::to_string(line_no) + ", column '" + cols[c] +
                             "': bad value '" + cell + "'");
      }
      if (c + 1 < cols.size() && end == line.size()) {
        throw TraceLoadError("trace.csv line " + std::to_string(line_no) + ": too few columns");
      }
      pos = end + 1;
    }
    if (pos <= line.size()) {
      throw TraceLoadError("trace.csv line " + std::to_string(line_no) + ": too many columns");
    }
    TraceSample smp;
    smp.x.resize(dof, n);
    smp.xdot.resize(dof, n);
    smp.u.resize(dof, n);
    smp.K.resize(n);
    smp.f.resize(dof);
    smp.edge_dist.resize(m);
    std::size_t c = 0;
    smp.t = row[c++];
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < dof; ++k) smp.x(k, i) = row[c++];
      for (int k = 0; k < dof; ++k) smp.xdot(k, i) = row[c++];
      for (int k = 0; k < dof; ++k) smp.u(k, i) = row[c++];
      smp.K[i] = row[c++];
    }
    for (int k = 0; k < dof; ++k) smp.f[k] = row[c++];
    for (int e = 0; e < m; ++e) smp.edge_dist[e] = row[c++];
    smp.V_p = row[c++];
    smp.V = row[c++];
    trace.samples.push_back(std::move(smp));
  }
  if (meta.contains("samples") && meta["samples"].get<std::size_t>() != trace.samples.size()) {
    throw TraceLoadError("trace.csv: row count disagrees with metadata.json");
  }
  return trace;
}

json design_report_json(const Scenario& scenario, const DesignResult& result,
                        const std::vector<DesignCondition>& conditions) {
  json conds = json::array();
  bool feasible = true;
  for (const auto& c : conditions) {
    conds.push_back({{"name", c.name}, {"margin", c.margin}, {"satisfied", c.satisfied}, {"detail", c.detail}});
    feasible = feasible && c.satisfied;
  }
  json robots = json::array();
  for (const auto& m : scenario.models) {
    const InertiaBounds& b = m.bounds();
    robots.push_back({{"kind", m.kind_name()},
                      {"lambda_min", b.lambda_min},
                      {"lambda_max", b.lambda_max},
                      {"coriolis", b.coriolis}});
  }
  return {{"scenario", scenario_to_json(scenario)},
          {"scenario_hash", scenario_hash(scenario)},
          {"design", design_to_json(result)},
          {"robots", robots},
          {"conditions", conds},
          {"feasible", feasible}};
}

std::string design_report_text(const Scenario& scenario, const DesignResult& result,
                               const std::vector<DesignCondition>& conditions) {
  const GainDesign& d = result.design;
  std::ostringstream os;
  os.precision(10);
  os << "scenario " << scenario.name << " (" << scenario.n_robots() << " robots, "
     << scenario.tree.n_edges() << " edges)\n";
  os << "potential  P=" << result.params.P << " Q=" << result.params.Q << " r=" << result.params.r
     << " epsilon=" << result.params.epsilon << " psi_max=" << result.params.psi_max() << '\n';
  os << "spectrum   lambda_L=" << result.spectral.lambda_L
     << " lambda_L_max=" << result.spectral.lambda_L_max << '\n';
  os << "gains      rho=" << d.rho << " sigma=" << d.sigma << " Gamma=" << d.Gamma
     << " Delta=" << d.Delta << " f_bar=" << d.f_bar << '\n';
  for (int i = 0; i < d.n_robots(); ++i) {
    os << "  robot " << i + 1 << (i == 0 ? " (informed)" : "") << ": eta=" << d.eta[i]
       << " gamma=" << d.gamma[i] << " zeta=" << d.zeta[i] << " B=" << d.B[i] << " D=" << d.D[i]
       << '\n';
  }
  os << "fixed point: " << result.rounds << " rounds, " << result.sigma_halvings
     << " sigma halvings\n";
  bool feasible = true;
  for (const auto& c : conditions) {
    os << (c.satisfied ? "  ok    " : "  FAIL  ") << c.name << "  margin=" << c.margin << "  "
       << c.detail << '\n';
    feasible = feasible && c.satisfied;
  }
  os << (feasible ? "design feasible\n" : "design INFEASIBLE\n");
  return os.str();
}

json certificate_json(const CertificateReport& report, const SimTrace& trace) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"applicable", c.applicable},
                      {"passed", c.passed},
                      {"worst_margin", nullable(c.worst_margin)},
                      {"worst_index", c.worst_index},
                      {"worst_time", nullable(c.worst_time)},
                      {"detail", c.detail}});
  }
  return {{"scenario", trace.scenario.name},
          {"scenario_hash", trace.scenario_hash},
          {"samples", trace.samples.size()},
          {"link_broken", trace.link_broken},
          {"checks", checks},
          {"verdict", report.verdict()}};
}

std::string certificate_text(const CertificateReport& report, const SimTrace& trace) {
  std::ostringstream os;
  os.precision(6);
  os << "certificate for " << trace.scenario.name << " (" << trace.samples.size() << " samples"
     << (trace.link_broken ? ", LINK BROKEN" : "") << ")\n";
  for (const auto& c : report.checks) {
    const char* tag = !c.applicable ? "  n/a   " : c.passed ? "  pass  " : "  FAIL  ";
    os << tag << c.name;
    if (c.applicable) os << "  worst margin " << c.worst_margin << " at t=" << c.worst_time;
    os << "\n        " << c.detail << '\n';
  }
  os << "verdict: " << (report.verdict() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace swarmtele
