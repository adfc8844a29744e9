#include "impulse/experiments.hpp"
#include "impulse/reference.hpp"
#include "impulse/report.hpp"
#include "impulse/scenario.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace impulse;

namespace {

enum Exit { kOk = 0, kParse = 2, kSolver = 3, kCertificate = 4 };

void emit(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    if (!body.empty() && body.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << body;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Common {
  std::string scenario;
  std::string init = "six";
};

int run_solve(const Common& c, const std::string& report_path, const std::string& csv_path, const std::string& profile_path) {
  const Scenario s = parse_scenario(c.scenario);
  const SampledProblem problem = s.sample();
  const VectorXd w = s.target();
  const auto t0 = std::chrono::steady_clock::now();
  const ManeuverPlan p = plan(w, problem, s.planner, parse_init_scheme(c.init));
  RunReport r = make_report(s.name, p, elapsed(t0));
  if (!profile_path.empty()) {
    attach_profile(r, p, problem);
    emit(profile_path, profile_csv(r.profile));
  }
  emit(report_path, report_json(r));
  if (!csv_path.empty()) emit(csv_path, maneuver_csv(r));
  if (!p.certificate_ok || (w.norm() > 0.0 && !audit_plan(p, w, problem, s.planner).ok())) {
    std::cerr << "certificate violation: cost " << r.total_cost_mms << " mm/s, bound " << r.lower_bound_mms << " mm/s\n";
    return kCertificate;
  }
  return kOk;
}

int run_lower_bound(const Common& c, int samples, std::uint64_t seed) {
  const Scenario s = parse_scenario(c.scenario);
  const SampledProblem problem = s.sample();
  const VectorXd w = s.target();
  const auto along_w = lower_bound(w, {w.normalized()}, problem);
  std::vector<VectorXd> lambdas;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int k = 0; k < samples; ++k) lambdas.push_back(VectorXd::NullaryExpr(problem.state_dim, [&] { return g(rng); }).normalized());
  std::ostringstream out;
  out.precision(17);
  out << "{\n  \"bound_along_w_mms\": " << 1e3 * along_w.bound << ",\n  \"samples\": " << samples;
  if (samples > 0) {
    try {
      const auto best = lower_bound(w, lambdas, problem);
      out << ",\n  \"best_sampled_bound_mms\": " << 1e3 * best.bound << ",\n  \"samples_used\": " << best.used;
    } catch (const Error&) {
      out << ",\n  \"best_sampled_bound_mms\": null,\n  \"samples_used\": 0";
    }
  }
  out << "\n}\n";
  std::cout << out.str();
  return kOk;
}

int run_montecarlo(const Common& c, int count, std::uint64_t seed, const std::string& csv_path, const std::string& hist_path) {
  const Scenario s = parse_scenario(c.scenario);
  const SampledProblem problem = s.sample();
  const McResult r = monte_carlo(problem, s.planner, parse_init_scheme(c.init), count, seed);
  if (!csv_path.empty()) emit(csv_path, montecarlo_csv(r));
  if (!hist_path.empty()) emit(hist_path, histogram_csv(r));
  std::cout << "init " << c.init << ": " << count << " cases, mean iterations " << r.mean_iterations() << ", max "
            << r.max_iterations() << ", failures " << r.failures() << ", within 10: " << 100.0 * r.fraction_within(10)
            << "%, max residual " << r.max_residual() << '\n';
  if (hist_path.empty()) std::cout << histogram_csv(r);
  return r.failures() ? kSolver : kOk;
}

int run_sweep(const Common& c, const std::vector<Index>& sizes, int repetitions, const std::string& csv_path) {
  const Scenario s = parse_scenario(c.scenario);
  emit(csv_path, sweep_csv(sweep(s, sizes, repetitions, parse_init_scheme(c.init))));
  return kOk;
}

int run_compare(const Common& c, int repetitions, int facets, const std::string& json_path) {
  const Scenario s = parse_scenario(c.scenario);
  const SampledProblem problem = s.sample();
  const CompareReport r = compare(s.target(), problem, s.planner, repetitions, facets);
  emit(json_path, compare_json(r));
  for (const auto& row : r.rows)
    if (!row.ok) return kSolver;
  return kOk;
}

int run_profile(const Common& c, const std::string& report_path, const std::string& out_path) {
  const Scenario s = parse_scenario(c.scenario);
  const SampledProblem problem = s.sample();
  const RunReport r = parse_report(slurp(report_path));
  if (static_cast<Index>(r.lambda.size()) != problem.state_dim)
    throw Error(ErrorKind::Parse, "report: lambda has the wrong dimension for this scenario");
  const VectorXd lambda = Eigen::Map<const VectorXd>(r.lambda.data(), problem.state_dim);
  std::vector<ProfileSample> samples;
  for (const auto& mode : problem.modes)
    for (const auto& p : profile(lambda, mode)) samples.push_back(p);
  std::stable_sort(samples.begin(), samples.end(), [](const ProfileSample& a, const ProfileSample& b) { return a.t < b.t; });
  emit(out_path, profile_csv(samples));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuel-optimal impulsive maneuver planner"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", common.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--init", common.init, "initial candidates: two, six or ten")->check(CLI::IsMember({"two", "six", "ten"}));
  };

  std::string report_path, csv_path, profile_path, hist_path, json_path, out_path;
  int samples = 100, count = 1000, repetitions = 20, facets = 162;
  std::uint64_t seed = 1;
  std::vector<Index> sizes{10, 100, 1000, 10000, 100000, 1000000};

  auto* solve = app.add_subcommand("solve", "plan the scenario and print the run report");
  add_common(solve);
  solve->add_option("--report", report_path, "report JSON path (default stdout)");
  solve->add_option("--csv", csv_path, "maneuver table CSV path");
  solve->add_option("--profile", profile_path, "profile CSV path; also embeds the profile in the report");

  auto* lb = app.add_subcommand("lower-bound", "certified lower bound for w-hat and sampled directions");
  add_common(lb);
  lb->add_option("--samples", samples, "random unit directions")->check(CLI::NonNegativeNumber);
  lb->add_option("--seed", seed);

  auto* mc = app.add_subcommand("montecarlo", "random targets on the scenario grid");
  add_common(mc);
  mc->add_option("--count", count)->check(CLI::NonNegativeNumber);
  mc->add_option("--seed", seed);
  mc->add_option("--csv", csv_path, "per-case CSV path");
  mc->add_option("--histogram", hist_path, "iteration histogram CSV path");

  auto* sw = app.add_subcommand("sweep", "planner time against grid size");
  add_common(sw);
  sw->add_option("--sizes", sizes, "grid sizes")->delimiter(',');
  sw->add_option("--repetitions", repetitions)->check(CLI::PositiveNumber);
  sw->add_option("--csv", csv_path, "CSV path (default stdout)");

  auto* cmp = app.add_subcommand("compare", "timing table of planner, naive indirect and direct LP");
  add_common(cmp);
  cmp->add_option("--repetitions", repetitions)->check(CLI::PositiveNumber);
  cmp->add_option("--facets", facets, "points on the unit sphere for smooth costs")->check(CLI::Range(4, 100000));
  cmp->add_option("--json", json_path, "JSON path (default stdout)");

  auto* prof = app.add_subcommand("profile", "support profile of a solved plan");
  add_common(prof);
  prof->add_option("--report", report_path, "run report from solve")->required()->check(CLI::ExistingFile);
  prof->add_option("--out", out_path, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*solve) return run_solve(common, report_path, csv_path, profile_path);
    if (*lb) return run_lower_bound(common, samples, seed);
    if (*mc) return run_montecarlo(common, count, seed, csv_path, hist_path);
    if (*sw) return run_sweep(common, sizes, repetitions, csv_path);
    if (*cmp) return run_compare(common, repetitions, facets, json_path);
    if (*prof) return run_profile(common, report_path, out_path);
  } catch (const PlanningError& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n' << trace_text(e.trace());
    return kSolver;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::Parse ? kParse : kSolver;
  }
  return kOk;
}
