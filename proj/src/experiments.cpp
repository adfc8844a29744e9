#include "impulse/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace impulse {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

}  // namespace

Vector6 random_target(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  std::uniform_real_distribution<double> ul(-10000.0, 10000.0);
  Vector6 w;
  w << u(rng), ul(rng), u(rng), u(rng), u(rng), u(rng);
  return w;
}

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double McResult::mean_iterations() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : cases)
    if (c.ok) {
      sum += c.iterations;
      ++n;
    }
  return n ? sum / n : 0.0;
}

int McResult::max_iterations() const {
  int m = 0;
  for (const auto& c : cases) m = std::max(m, c.iterations);
  return m;
}

int McResult::failures() const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const McCase& c) { return !c.ok; }));
}

double McResult::fraction_within(int iterations) const {
  if (cases.empty()) return 0.0;
  const auto n = std::count_if(cases.begin(), cases.end(), [&](const McCase& c) { return c.ok && c.iterations <= iterations; });
  return static_cast<double>(n) / static_cast<double>(cases.size());
}

double McResult::max_residual() const {
  double m = 0.0;
  for (const auto& c : cases) m = std::max(m, c.residual);
  return m;
}

int default_threads() {
  if (const char* env = std::getenv("IMPULSE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

McResult monte_carlo(const SampledProblem& problem, const PlannerConfig& config, InitScheme scheme, int count,
                     std::uint64_t seed, int threads) {
  if (count < 0) throw Error(ErrorKind::InvalidArgument, "monte carlo: count must be nonnegative");
  config.validate(problem.state_dim);
  McResult out;
  out.scheme = scheme;
  out.cases.resize(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      McCase& c = out.cases[static_cast<std::size_t>(k)];
      c.seed = case_seed(seed, static_cast<std::uint64_t>(k));
      std::mt19937_64 rng(c.seed);
      const VectorXd w = random_target(rng);
      try {
        const auto p = plan(w, problem, config, scheme);
        c.ok = true;
        c.iterations = p.iterations;
        c.cost = p.total_cost;
        c.bound = p.lower_bound;
        c.gap = p.gap();
        c.residual = p.residual;
      } catch (const PlanningError& e) {
        c.error = e.what();
        c.iterations = static_cast<int>(e.trace().size());
        c.cost = e.best_upper();
        c.bound = e.best_lower();
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min(threads > 0 ? threads : default_threads(), std::max(count, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& c : out.cases)
    if (c.ok) ++out.histogram[static_cast<std::size_t>(std::clamp(c.iterations, 1, 15) - 1)];
  return out;
}

std::string montecarlo_csv(const McResult& r) {
  std::ostringstream out;
  out << "seed,ok,iterations,cost_mms,bound_mms,gap,residual\n";
  for (const auto& c : r.cases)
    out << c.seed << ',' << (c.ok ? 1 : 0) << ',' << c.iterations << ',' << num(1e3 * c.cost) << ',' << num(1e3 * c.bound)
        << ',' << num(c.gap) << ',' << num(c.residual) << '\n';
  return out.str();
}

std::string histogram_csv(const McResult& r) {
  std::ostringstream out;
  out << "iterations,count\n";
  for (std::size_t k = 0; k < r.histogram.size(); ++k)
    out << (k + 1 == r.histogram.size() ? std::string("15+") : std::to_string(k + 1)) << ',' << r.histogram[k] << '\n';
  return out.str();
}

std::vector<SweepRow> sweep(const Scenario& scenario, const std::vector<Index>& grid_sizes, int repetitions,
                            InitScheme scheme) {
  if (repetitions < 1) throw Error(ErrorKind::InvalidArgument, "sweep: repetitions must be at least 1");
  std::vector<SweepRow> rows;
  const VectorXd w = scenario.target();
  for (Index n : grid_sizes) {
    SweepRow row;
    row.grid_size = n;
    const Scenario s = scenario.with_grid_size(n);
    double t0 = now();
    const SampledProblem problem = s.sample();
    row.sample_seconds = now() - t0;
    row.min_seconds = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (int r = 0; r < repetitions; ++r) {
      t0 = now();
      const auto p = plan(w, problem, scenario.planner, scheme);
      const double dt = now() - t0;
      total += dt;
      row.min_seconds = std::min(row.min_seconds, dt);
      row.cost = p.total_cost;
      row.iterations = p.iterations;
    }
    row.seconds = total / repetitions;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "grid_size,seconds,min_seconds,sample_seconds,cost_mms,iterations\n";
  for (const auto& r : rows)
    out << r.grid_size << ',' << num(r.seconds) << ',' << num(r.min_seconds) << ',' << num(r.sample_seconds) << ','
        << num(1e3 * r.cost) << ',' << r.iterations << '\n';
  return out.str();
}

InitScheme parse_init_scheme(const std::string& name) {
  if (name == "two") return InitScheme::Endpoints;
  if (name == "six") return InitScheme::Seeded;
  if (name == "ten") return InitScheme::Uniform;
  throw Error(ErrorKind::InvalidArgument, "unknown init scheme '" + name + "' (expected two, six or ten)");
}

const char* init_scheme_name(InitScheme scheme) {
  switch (scheme) {
    case InitScheme::Endpoints:
      return "two";
    case InitScheme::Seeded:
      return "six";
    case InitScheme::Uniform:
      return "ten";
  }
  return "?";
}

}  // namespace impulse
