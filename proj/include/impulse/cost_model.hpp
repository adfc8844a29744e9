#pragma once

// Norm-like impulse costs with analytic support (contact) and argmax oracles.

#include "impulse/types.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace impulse {

struct TwoNorm {};
struct OneNorm {};

/// Fixed-attitude thrusters: the unit-cost set is conv({0} u rows).
struct PolyhedralThrusters {
  MatrixXd rows;                    // k x m, unit rows
  bool positively_spanning = false; // every direction of R^m admissible
  MatrixXd facets;                  // f x m; cost = max(facets * u) when positively spanning
};

/// |u_f| + ||u_rest||_2 where f is the fixed axis.
struct MixedAxis {
  Index fixed_axis = 0;
  Index dim = 3;
};

/// User-supplied cost through its oracles. The caller guarantees consistency.
struct CustomCost {
  std::string name;
  Index dim = 3;
  std::function<double(const VectorXd&)> support;
  std::function<std::vector<VectorXd>(const VectorXd&)> generators;
  std::function<double(const VectorXd&)> cost;
};

class CostModel {
 public:
  using Variant = std::variant<TwoNorm, OneNorm, PolyhedralThrusters, MixedAxis, CustomCost>;

  static CostModel two_norm(Index dim = 3);
  static CostModel one_norm(Index dim = 3);
  /// Rows are normalized; throws on zero rows.
  static CostModel thrusters(const MatrixXd& rows);
  static CostModel mixed_axis(Index fixed_axis, Index dim = 3);
  static CostModel custom(CustomCost cost);

  /// Rows of the tetrahedral thruster layout used for the fixed-attitude mode.
  static MatrixXd tetrahedral_rows();

  const Variant& variant() const noexcept { return variant_; }
  Index input_dim() const noexcept { return dim_; }
  std::string name() const;

  /// True when the unit-cost set is a polytope with a finite vertex list.
  bool is_polyhedral() const noexcept;
  /// Vertices of U(1) other than the origin (polyhedral variants only).
  std::vector<VectorXd> vertices() const;

  bool operator==(const CostModel& other) const;

 private:
  CostModel(Variant v, Index dim) : variant_(std::move(v)), dim_(dim) {}
  Variant variant_;
  Index dim_;
};

/// Relative tie tolerance on the maximal inner product in support_generators.
inline constexpr double kGeneratorTieTolerance = 1e-9;

/// max over u in U(1) of v^T u.
double support(const CostModel& cost, const Eigen::Ref<const VectorXd>& v);

/// Unit-cost maximizers of v^T u over U(1). Ties return every extreme maximizer.
/// Throws NoAscentDirection when support(v) == 0.
std::vector<VectorXd> support_generators(const CostModel& cost, const Eigen::Ref<const VectorXd>& v);

/// Cost of applying u. Throws InvalidArgument for inadmissible u.
double cost_of(const CostModel& cost, const Eigen::Ref<const VectorXd>& u);

}  // namespace impulse
