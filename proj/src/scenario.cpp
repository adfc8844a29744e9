#include "impulse/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace impulse {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::Parse, "scenario: " + path + ": " + msg);
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "/" + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "not finite");
  return v;
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  return number(field(j, key, path), path + "/" + key);
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Vector6 vec6(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 6) fail(path, "expected an array of 6 numbers");
  Vector6 v;
  for (std::size_t k = 0; k < 6; ++k) v(static_cast<Index>(k)) = number(j[k], path + "/" + std::to_string(k));
  return v;
}

MatrixXd matrix(const json& j, Index cols, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  MatrixXd m(static_cast<Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != static_cast<std::size_t>(cols))
      fail(rp, "expected " + std::to_string(cols) + " numbers");
    for (std::size_t c = 0; c < j[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

json to_json(const Vector6& v) {
  json a = json::array();
  for (Index k = 0; k < 6; ++k) a.push_back(v(k));
  return a;
}

json to_json(const MatrixXd& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

CostSpec parse_cost(const json& j, const std::string& path) {
  CostSpec c;
  c.type = text(field(j, "type", path), path + "/type");
  if (j.contains("dim")) c.dim = integer(j["dim"], path + "/dim");
  if (c.dim < 1) fail(path + "/dim", "must be positive");
  if (c.type == "two_norm" || c.type == "one_norm") return c;
  if (c.type == "thrusters") {
    const json& rows = field(j, "rows", path);
    if (rows.is_string()) {
      if (rows.get<std::string>() != "tetrahedral") fail(path + "/rows", "unknown thruster layout '" + rows.get<std::string>() + "'");
      c.tetrahedral = true;
      c.dim = 3;
    } else {
      c.rows = matrix(rows, c.dim, path + "/rows");
    }
    return c;
  }
  if (c.type == "mixed_axis") {
    c.fixed_axis = integer(field(j, "fixed_axis", path), path + "/fixed_axis");
    if (c.fixed_axis < 0 || c.fixed_axis >= c.dim) fail(path + "/fixed_axis", "outside the input dimension");
    return c;
  }
  fail(path + "/type", "unknown cost type '" + c.type + "'");
}

json cost_json(const CostSpec& c) {
  json j{{"type", c.type}};
  if (c.dim != 3) j["dim"] = c.dim;
  if (c.type == "thrusters") j["rows"] = c.tetrahedral ? json("tetrahedral") : to_json(c.rows);
  if (c.type == "mixed_axis") j["fixed_axis"] = c.fixed_axis;
  return j;
}

WindowSpec parse_windows(const json& j, const std::string& path) {
  WindowSpec w;
  const std::string kind = text(field(j, "kind", path), path + "/kind");
  if (kind == "always") {
    w.kind = WindowSpec::Kind::Always;
  } else if (kind == "perigee") {
    w.kind = WindowSpec::Kind::Perigee;
    w.half_width = number_at(j, "half_width_sec", path);
  } else if (kind == "periodic") {
    w.kind = WindowSpec::Kind::Periodic;
    w.half_width = number_at(j, "half_width_sec", path);
    w.first_center = number_at(j, "first_center_sec", path);
    if (j.contains("period_sec")) w.period = number(j["period_sec"], path + "/period_sec");
    if (w.period < 0.0) fail(path + "/period_sec", "must be nonnegative");
  } else if (kind == "intervals") {
    w.kind = WindowSpec::Kind::Intervals;
    const json& list = field(j, "intervals_sec", path);
    if (!list.is_array()) fail(path + "/intervals_sec", "expected an array of [lo, hi] pairs");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string ip = path + "/intervals_sec/" + std::to_string(k);
      if (!list[k].is_array() || list[k].size() != 2) fail(ip, "expected [lo, hi]");
      const double lo = number(list[k][0], ip + "/0");
      const double hi = number(list[k][1], ip + "/1");
      if (hi < lo) fail(ip, "hi < lo");
      w.intervals.emplace_back(lo, hi);
    }
  } else if (kind == "complement_of") {
    w.kind = WindowSpec::Kind::ComplementOf;
    w.complement_of = integer(field(j, "mode", path), path + "/mode");
  } else {
    fail(path + "/kind", "unknown window kind '" + kind + "'");
  }
  if (w.half_width < 0.0) fail(path + "/half_width_sec", "must be nonnegative");
  return w;
}

json windows_json(const WindowSpec& w) {
  switch (w.kind) {
    case WindowSpec::Kind::Always:
      return {{"kind", "always"}};
    case WindowSpec::Kind::Perigee:
      return {{"kind", "perigee"}, {"half_width_sec", w.half_width}};
    case WindowSpec::Kind::Periodic: {
      json j{{"kind", "periodic"}, {"half_width_sec", w.half_width}, {"first_center_sec", w.first_center}};
      if (w.period > 0.0) j["period_sec"] = w.period;
      return j;
    }
    case WindowSpec::Kind::Intervals: {
      json list = json::array();
      for (const auto& [lo, hi] : w.intervals) list.push_back({lo, hi});
      return {{"kind", "intervals"}, {"intervals_sec", list}};
    }
    case WindowSpec::Kind::ComplementOf:
      return {{"kind", "complement_of"}, {"mode", w.complement_of}};
  }
  return {};
}

void parse_planner(const json& j, const std::string& path, PlannerConfig& p) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = it.key();
    const std::string kp = path + "/" + key;
    if (key == "eps_cost") p.eps_cost = number(*it, kp);
    else if (key == "eps_remove") p.eps_remove = number(*it, kp);
    else if (key == "n_init") p.n_init = integer(*it, kp);
    else if (key == "n_seed_grid") p.n_seed_grid = integer(*it, kp);
    else if (key == "alpha_min_mps") p.alpha_min = number(*it, kp);
    else if (key == "max_iters") p.max_iters = integer(*it, kp);
    else if (key == "residual_tol") p.residual_tol = number(*it, kp);
    else if (key == "q_weight") p.q_weight = matrix(*it, 6, kp);
    else fail(kp, "unknown planner option");
  }
}

json planner_json(const PlannerConfig& p) {
  const PlannerConfig d;
  json j = json::object();
  if (p.eps_cost != d.eps_cost) j["eps_cost"] = p.eps_cost;
  if (p.eps_remove != d.eps_remove) j["eps_remove"] = p.eps_remove;
  if (p.n_init != d.n_init) j["n_init"] = p.n_init;
  if (p.n_seed_grid != d.n_seed_grid) j["n_seed_grid"] = p.n_seed_grid;
  if (p.alpha_min != d.alpha_min) j["alpha_min_mps"] = p.alpha_min;
  if (p.max_iters != d.max_iters) j["max_iters"] = p.max_iters;
  if (p.residual_tol != d.residual_tol) j["residual_tol"] = p.residual_tol;
  if (p.q_weight.size()) j["q_weight"] = to_json(p.q_weight);
  return j;
}

using Span = std::pair<double, double>;

std::vector<Span> merge_clip(std::vector<Span> spans, double lo, double hi) {
  std::vector<Span> out;
  std::sort(spans.begin(), spans.end());
  for (auto [a, b] : spans) {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (a > b) continue;
    if (!out.empty() && a <= out.back().second)
      out.back().second = std::max(out.back().second, b);
    else
      out.emplace_back(a, b);
  }
  return out;
}

std::vector<Span> periodic_spans(double first, double period, double half, double t_i, double t_f) {
  if (!(period > 0.0)) throw Error(ErrorKind::Parse, "scenario: window period must be positive");
  std::vector<Span> out;
  const double k0 = std::floor((t_i - half - first) / period);
  for (double k = k0;; k += 1.0) {
    const double c = first + k * period;
    if (c - half > t_f) break;
    if (c + half >= t_i) out.emplace_back(c - half, c + half);
  }
  return out;
}

}  // namespace

CostModel CostSpec::build() const {
  if (type == "two_norm") return CostModel::two_norm(dim);
  if (type == "one_norm") return CostModel::one_norm(dim);
  if (type == "thrusters") return CostModel::thrusters(tetrahedral ? CostModel::tetrahedral_rows() : rows);
  if (type == "mixed_axis") return CostModel::mixed_axis(fixed_axis, dim);
  throw Error(ErrorKind::Parse, "scenario: unknown cost type '" + type + "'");
}

bool CostSpec::operator==(const CostSpec& o) const {
  return type == o.type && dim == o.dim && tetrahedral == o.tetrahedral && fixed_axis == o.fixed_axis &&
         rows.rows() == o.rows.rows() && rows.cols() == o.rows.cols() && rows == o.rows;
}

bool Scenario::operator==(const Scenario& o) const {
  auto same_q = [](const MatrixXd& a, const MatrixXd& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; };
  return schema_version == o.schema_version && name == o.name && orbit == o.orbit && t_i == o.t_i && t_f == o.t_f &&
         step == o.step && times == o.times && modes == o.modes && w_m == o.w_m && roe_initial_m == o.roe_initial_m &&
         roe_final_m == o.roe_final_m && planner.eps_cost == o.planner.eps_cost &&
         planner.eps_remove == o.planner.eps_remove && planner.n_init == o.planner.n_init &&
         planner.n_seed_grid == o.planner.n_seed_grid && planner.alpha_min == o.planner.alpha_min &&
         planner.max_iters == o.planner.max_iters && planner.residual_tol == o.planner.residual_tol &&
         same_q(planner.q_weight, o.planner.q_weight);
}

std::vector<double> Scenario::grid() const {
  if (!times.empty()) return times;
  const double span = t_f - t_i;
  const double n = std::round(span / step);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (double k = 0; k <= n; k += 1.0) out.push_back(k == n ? t_f : t_i + k * step);
  return out;
}

Vector6 Scenario::target() const {
  if (w_m) return *w_m;
  const auto oe = orbit.elements();
  return astro::target_pseudostate<double>(*roe_initial_m / oe.a, *roe_final_m / oe.a, oe, t_i, t_f);
}

std::vector<CostPiece> Scenario::pieces() const {
  std::vector<std::vector<Span>> spans(modes.size());
  const auto oe = orbit.elements();
  auto find = [&](int id) {
    for (std::size_t k = 0; k < modes.size(); ++k)
      if (modes[k].id == id) return k;
    throw Error(ErrorKind::Parse, "scenario: complement_of refers to unknown mode " + std::to_string(id));
  };
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto& w = modes[k].windows;
    switch (w.kind) {
      case WindowSpec::Kind::Always:
        spans[k] = {{t_i, t_f}};
        break;
      case WindowSpec::Kind::Perigee: {
        const double rate = astro::secular_rates(oe).mean_anomaly;
        const double period = 2.0 * std::numbers::pi / rate;
        const double m0 = std::fmod(oe.mean_anomaly, 2.0 * std::numbers::pi);
        const double first = t_i + (2.0 * std::numbers::pi - (m0 < 0 ? m0 + 2.0 * std::numbers::pi : m0)) / rate;
        spans[k] = merge_clip(periodic_spans(first, period, w.half_width, t_i, t_f), t_i, t_f);
        break;
      }
      case WindowSpec::Kind::Periodic: {
        const double period = w.period > 0.0 ? w.period : astro::anomalistic_period(oe);
        spans[k] = merge_clip(periodic_spans(w.first_center, period, w.half_width, t_i, t_f), t_i, t_f);
        break;
      }
      case WindowSpec::Kind::Intervals:
        spans[k] = merge_clip(w.intervals, t_i, t_f);
        break;
      case WindowSpec::Kind::ComplementOf:
        break;
    }
  }

  std::vector<CostPiece> out;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const CostModel cost = modes[k].cost.build();
    if (modes[k].windows.kind != WindowSpec::Kind::ComplementOf) {
      for (const auto& [a, b] : spans[k]) out.push_back({{a, b, true, true}, cost, modes[k].id});
      continue;
    }
    const std::size_t other = find(modes[k].windows.complement_of);
    if (modes[other].windows.kind == WindowSpec::Kind::ComplementOf)
      throw Error(ErrorKind::Parse, "scenario: complement_of must name a mode with explicit windows");
    double lo = t_i;
    bool lo_closed = true;
    for (const auto& [a, b] : spans[other]) {
      if (a > lo) out.push_back({{lo, a, lo_closed, false}, cost, modes[k].id});
      lo = b;
      lo_closed = false;
    }
    if (lo < t_f) out.push_back({{lo, t_f, lo_closed, true}, cost, modes[k].id});
  }
  return out;
}

ModeSchedule Scenario::schedule() const { return decompose_schedule(pieces(), grid()); }

GammaProvider Scenario::gamma_provider() const {
  const auto oe = orbit.elements();
  const double ti = t_i;
  const double tf = t_f;
  return [oe, ti, tf](double t) -> MatrixXd { return astro::gamma<double>(oe, ti, t, tf); };
}

SampledProblem Scenario::sample() const {
  SampledProblem p = sample_problem(schedule(), gamma_provider());
  p.t_i = t_i;
  p.t_f = t_f;
  return p;
}

Scenario Scenario::with_grid_size(Index count) const {
  if (count < 2) throw Error(ErrorKind::InvalidArgument, "grid size must be at least 2");
  Scenario s = *this;
  s.times.clear();
  s.step = (t_f - t_i) / static_cast<double>(count - 1);
  return s;
}

Scenario parse_scenario_text(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("scenario: invalid JSON: ") + e.what());
  }
  Scenario s;
  s.schema_version = integer(field(j, "schema_version", ""), "/schema_version");
  if (s.schema_version != 1) fail("/schema_version", "unsupported version " + std::to_string(s.schema_version));
  if (j.contains("name")) s.name = text(j["name"], "/name");

  const json& o = field(j, "orbit", "");
  s.orbit.a_m = number_at(o, "a_m", "/orbit");
  s.orbit.e = number_at(o, "e", "/orbit");
  s.orbit.i_deg = number_at(o, "i_deg", "/orbit");
  s.orbit.raan_deg = number_at(o, "raan_deg", "/orbit");
  s.orbit.argp_deg = number_at(o, "argp_deg", "/orbit");
  s.orbit.mean_anomaly_deg = number_at(o, "mean_anomaly_deg", "/orbit");
  try {
    s.orbit.elements().validate();
  } catch (const Error& e) {
    fail("/orbit", e.what());
  }

  const json& t = field(j, "time", "");
  s.t_i = number_at(t, "t_i_sec", "/time");
  s.t_f = number_at(t, "t_f_sec", "/time");
  if (!(s.t_f > s.t_i)) fail("/time", "t_f_sec must exceed t_i_sec");
  const bool has_step = t.contains("step_sec");
  const bool has_list = t.contains("times_sec");
  if (has_step == has_list) fail("/time", "give exactly one of step_sec and times_sec");
  if (has_step) {
    s.step = number(t["step_sec"], "/time/step_sec");
    if (!(s.step > 0.0)) fail("/time/step_sec", "must be positive");
    const double n = (s.t_f - s.t_i) / s.step;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) fail("/time/step_sec", "does not divide t_f_sec - t_i_sec");
  } else {
    const json& list = t["times_sec"];
    if (!list.is_array() || list.empty()) fail("/time/times_sec", "expected a nonempty array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const double v = number(list[k], "/time/times_sec/" + std::to_string(k));
      if (!s.times.empty() && !(v > s.times.back())) fail("/time/times_sec/" + std::to_string(k), "times must increase strictly");
      if (v < s.t_i || v > s.t_f) fail("/time/times_sec/" + std::to_string(k), "outside [t_i_sec, t_f_sec]");
      s.times.push_back(v);
    }
  }

  const json& modes = field(j, "modes", "");
  if (!modes.is_array() || modes.empty()) fail("/modes", "expected a nonempty array");
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const std::string mp = "/modes/" + std::to_string(k);
    ModeSpec m;
    m.id = integer(field(modes[k], "id", mp), mp + "/id");
    m.cost = parse_cost(field(modes[k], "cost", mp), mp + "/cost");
    m.windows = modes[k].contains("windows") ? parse_windows(modes[k]["windows"], mp + "/windows") : WindowSpec{};
    for (const auto& prev : s.modes)
      if (prev.id == m.id) fail(mp + "/id", "duplicate mode id " + std::to_string(m.id));
    s.modes.push_back(std::move(m));
  }

  const json& target = field(j, "target", "");
  const bool has_w = target.contains("w_m");
  const bool has_roe = target.contains("roe_initial_m") || target.contains("roe_final_m");
  if (has_w && has_roe) fail("/target", "ambiguous target: give either w_m or the roe_initial_m/roe_final_m pair");
  if (has_w) {
    s.w_m = vec6(target["w_m"], "/target/w_m");
  } else if (has_roe) {
    s.roe_initial_m = vec6(field(target, "roe_initial_m", "/target"), "/target/roe_initial_m");
    s.roe_final_m = vec6(field(target, "roe_final_m", "/target"), "/target/roe_final_m");
  } else {
    fail("/target", "missing w_m or roe_initial_m/roe_final_m");
  }

  if (j.contains("planner")) parse_planner(j["planner"], "/planner", s.planner);
  try {
    s.planner.validate(6);
  } catch (const Error& e) {
    fail("/planner", e.what());
  }

  try {
    s.schedule();
  } catch (const Error& e) {
    fail("/modes", e.what());
  }
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "scenario: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  if (!s.name.empty()) j["name"] = s.name;
  j["orbit"] = {{"a_m", s.orbit.a_m},         {"e", s.orbit.e},
                {"i_deg", s.orbit.i_deg},     {"raan_deg", s.orbit.raan_deg},
                {"argp_deg", s.orbit.argp_deg}, {"mean_anomaly_deg", s.orbit.mean_anomaly_deg}};
  json t{{"t_i_sec", s.t_i}, {"t_f_sec", s.t_f}};
  if (s.times.empty())
    t["step_sec"] = s.step;
  else
    t["times_sec"] = s.times;
  j["time"] = t;
  json modes = json::array();
  for (const auto& m : s.modes) modes.push_back({{"id", m.id}, {"cost", cost_json(m.cost)}, {"windows", windows_json(m.windows)}});
  j["modes"] = modes;
  if (s.w_m)
    j["target"] = {{"w_m", to_json(*s.w_m)}};
  else
    j["target"] = {{"roe_initial_m", to_json(*s.roe_initial_m)}, {"roe_final_m", to_json(*s.roe_final_m)}};
  const json p = planner_json(s.planner);
  if (!p.empty()) j["planner"] = p;
  return j.dump(2);
}

}  // namespace impulse
