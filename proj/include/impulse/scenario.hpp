#pragma once

// Scenario description: chief orbit, time grid, piecewise cost schedule, target and planner overrides.

#include "impulse/astro.hpp"
#include "impulse/dual.hpp"
#include "impulse/planner.hpp"
#include "impulse/schedule.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace impulse {

struct CostSpec {
  std::string type = "two_norm";  // two_norm | one_norm | thrusters | mixed_axis
  Index dim = 3;
  bool tetrahedral = false;       // thrusters: use the built-in layout
  MatrixXd rows;                  // thrusters: k x 3
  Index fixed_axis = 0;           // mixed_axis

  CostModel build() const;
  bool operator==(const CostSpec& o) const;
};

struct WindowSpec {
  enum class Kind { Always, Perigee, Periodic, Intervals, ComplementOf };
  Kind kind = Kind::Always;
  double half_width = 0.0;    // [s]
  double first_center = 0.0;  // [s] periodic
  double period = 0.0;        // [s] periodic; 0 selects the anomalistic period
  std::vector<std::pair<double, double>> intervals;  // [s] closed
  int complement_of = 0;      // mode id

  bool operator==(const WindowSpec& o) const = default;
};

struct ModeSpec {
  int id = 0;
  CostSpec cost;
  WindowSpec windows;
  bool operator==(const ModeSpec& o) const = default;
};

/// Chief mean elements as entered; angles in degrees.
struct OrbitSpec {
  double a_m = 0.0;
  double e = 0.0;
  double i_deg = 0.0;
  double raan_deg = 0.0;
  double argp_deg = 0.0;
  double mean_anomaly_deg = 0.0;

  astro::Elements elements() const {
    return astro::Elements::from_degrees(a_m, e, i_deg, raan_deg, argp_deg, mean_anomaly_deg);
  }
  bool operator==(const OrbitSpec& o) const = default;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  OrbitSpec orbit;
  double t_i = 0.0;
  double t_f = 0.0;
  double step = 0.0;           // [s]; 0 when an explicit list is given
  std::vector<double> times;   // explicit grid [s]
  std::vector<ModeSpec> modes;
  std::optional<Vector6> w_m;           // pseudostate [m]
  std::optional<Vector6> roe_initial_m; // a_c * delta alpha [m]
  std::optional<Vector6> roe_final_m;
  PlannerConfig planner;

  std::vector<double> grid() const;
  Vector6 target() const;
  /// Closed windows and open complements, expanded over [t_i, t_f].
  std::vector<CostPiece> pieces() const;
  ModeSchedule schedule() const;
  GammaProvider gamma_provider() const;
  SampledProblem sample() const;
  /// Same scenario on an evenly spaced grid of `count` times.
  Scenario with_grid_size(Index count) const;

  bool operator==(const Scenario& o) const;
};

/// Throws Error(Parse) with a JSON-pointer-like field path.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);
std::string serialize_scenario(const Scenario& scenario);

}  // namespace impulse
