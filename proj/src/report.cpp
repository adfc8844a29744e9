#include "impulse/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace impulse {

using nlohmann::json;

namespace {

constexpr double kMms = 1e3;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool RunReport::same_results(const RunReport& o) const {
  return schema_version == o.schema_version && scenario == o.scenario && impulses == o.impulses &&
         total_cost_mms == o.total_cost_mms && lower_bound_mms == o.lower_bound_mms && gap == o.gap &&
         iterations == o.iterations && residual == o.residual && certificate_ok == o.certificate_ok &&
         lambda == o.lambda && trace == o.trace && profile == o.profile;
}

RunReport make_report(const std::string& scenario, const ManeuverPlan& plan, double solve_sec) {
  RunReport r;
  r.scenario = scenario;
  for (const auto& imp : plan.impulses) {
    ReportImpulse ri;
    ri.t_sec = imp.t;
    ri.mode = imp.mode_id;
    for (Index k = 0; k < imp.u.size(); ++k) ri.u_mms.push_back(kMms * imp.u(k));
    ri.cost_mms = kMms * imp.cost;
    r.impulses.push_back(std::move(ri));
  }
  r.total_cost_mms = kMms * plan.total_cost;
  r.lower_bound_mms = kMms * plan.lower_bound;
  r.gap = plan.gap();
  r.iterations = plan.iterations;
  r.residual = plan.residual;
  r.certificate_ok = plan.certificate_ok;
  r.lambda.assign(plan.dual.lambda.data(), plan.dual.lambda.data() + plan.dual.lambda.size());
  for (const auto& it : plan.trace)
    r.trace.push_back({it.iteration, kMms * it.objective, it.max_profile, it.candidates, it.removed, it.added});
  r.solve_sec = solve_sec;
  return r;
}

void attach_profile(RunReport& report, const ManeuverPlan& plan, const SampledProblem& problem) {
  report.profile.clear();
  if (plan.dual.lambda.size() != problem.state_dim) return;
  for (const auto& mode : problem.modes)
    for (const auto& s : profile(plan.dual.lambda, mode)) report.profile.push_back(s);
  std::stable_sort(report.profile.begin(), report.profile.end(),
                   [](const ProfileSample& a, const ProfileSample& b) { return a.t < b.t; });
}

std::string report_json(const RunReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["scenario"] = r.scenario;
  j["total_cost_mms"] = r.total_cost_mms;
  j["lower_bound_mms"] = r.lower_bound_mms;
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["certificate_ok"] = r.certificate_ok;
  j["lambda"] = r.lambda;
  json imps = json::array();
  for (const auto& i : r.impulses) imps.push_back({{"t_sec", i.t_sec}, {"mode", i.mode}, {"u_mms", i.u_mms}, {"cost_mms", i.cost_mms}});
  j["impulses"] = imps;
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"iteration", t.iteration},
                     {"objective_mms", t.objective_mms},
                     {"max_profile", t.max_profile},
                     {"candidates", t.candidates},
                     {"removed", t.removed},
                     {"added", t.added}});
  j["trace"] = trace;
  if (!r.profile.empty()) {
    json prof = json::array();
    for (const auto& s : r.profile) prof.push_back({s.t, s.mode_id, s.p});
    j["profile"] = prof;
  }
  j["timing"] = {{"solve_sec", r.solve_sec}};
  return j.dump(2);
}

RunReport parse_report(const std::string& text) {
  RunReport r;
  try {
    const json j = json::parse(text);
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != 1) throw Error(ErrorKind::Parse, "report: unsupported schema version");
    r.scenario = j.at("scenario").get<std::string>();
    r.total_cost_mms = j.at("total_cost_mms").get<double>();
    r.lower_bound_mms = j.at("lower_bound_mms").get<double>();
    r.gap = j.at("gap").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.residual = j.at("residual").get<double>();
    r.certificate_ok = j.at("certificate_ok").get<bool>();
    r.lambda = j.at("lambda").get<std::vector<double>>();
    for (const auto& i : j.at("impulses"))
      r.impulses.push_back({i.at("t_sec").get<double>(), i.at("mode").get<int>(), i.at("u_mms").get<std::vector<double>>(),
                            i.at("cost_mms").get<double>()});
    for (const auto& t : j.at("trace"))
      r.trace.push_back({t.at("iteration").get<int>(), t.at("objective_mms").get<double>(), t.at("max_profile").get<double>(),
                         t.at("candidates").get<Index>(), t.at("removed").get<Index>(), t.at("added").get<Index>()});
    if (j.contains("profile"))
      for (const auto& s : j["profile"]) r.profile.push_back({s.at(0).get<double>(), s.at(1).get<int>(), s.at(2).get<double>()});
    r.solve_sec = j.at("timing").at("solve_sec").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
  return r;
}

std::string maneuver_csv(const RunReport& r) {
  std::ostringstream out;
  out << "t_sec,mode,uR_mms,uT_mms,uN_mms,cost_mms\n";
  for (const auto& i : r.impulses) {
    out << num(i.t_sec) << ',' << i.mode;
    for (std::size_t k = 0; k < 3; ++k) out << ',' << (k < i.u_mms.size() ? num(i.u_mms[k]) : "");
    out << ',' << num(i.cost_mms) << '\n';
  }
  return out.str();
}

std::string profile_csv(const std::vector<ProfileSample>& samples) {
  std::ostringstream out;
  out << "t_sec,mode,p\n";
  for (const auto& s : samples) out << num(s.t) << ',' << s.mode_id << ',' << num(s.p) << '\n';
  return out.str();
}

std::string compare_json(const CompareReport& report) {
  json j;
  j["repetitions"] = report.repetitions;
  j["lower_bound_mms"] = kMms * report.lower_bound;
  j["rho"] = report.rho;
  double planner_mean = 0.0;
  for (const auto& r : report.rows)
    if (r.solver == "planner") planner_mean = r.mean_seconds;
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"solver", r.solver}, {"ok", r.ok}, {"cost_mms", kMms * r.cost}, {"iterations", r.iterations},
             {"min_sec", r.min_seconds}, {"mean_sec", r.mean_seconds}, {"max_sec", r.max_seconds}};
    if (!r.ok) row["error"] = r.error;
    if (planner_mean > 0.0) row["time_vs_planner"] = r.mean_seconds / planner_mean;
    if (report.lower_bound > 0.0 && r.ok) row["cost_vs_bound"] = r.cost / report.lower_bound;
    rows.push_back(row);
  }
  j["solvers"] = rows;
  return j.dump(2);
}

std::string trace_text(const std::vector<IterationRecord>& trace) {
  std::ostringstream out;
  for (const auto& t : trace)
    out << "iter " << t.iteration << ": objective " << num(t.objective) << " m/s, max p " << num(t.max_profile)
        << ", candidates " << t.candidates << " (-" << t.removed << " +" << t.added << ")\n";
  return out.str();
}

}  // namespace impulse
