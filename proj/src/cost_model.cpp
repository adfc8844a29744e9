#include "impulse/cost_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace impulse {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NoAscentDirection: return "no ascent direction";
    case ErrorKind::TrivialProblem: return "trivial problem";
    case ErrorKind::InsufficientCandidates: return "insufficient candidates";
    case ErrorKind::DualUnbounded: return "dual unbounded";
    case ErrorKind::IterationLimit: return "iteration limit";
    case ErrorKind::ExtractionFailed: return "extraction failed";
    case ErrorKind::Unreachable: return "target unreachable";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Internal: return "internal error";
  }
  return "unknown";
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const CostModel& cost, Index n, const char* what) {
  if (n != cost.input_dim()) {
    std::ostringstream os;
    os << what << ": vector has dimension " << n << ", cost model expects " << cost.input_dim();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

// Minimum total thrust sum(alpha) with rows^T alpha = u, alpha >= 0. An optimal vertex
// uses at most m linearly independent rows, so enumerating row subsets is exact.
std::optional<double> thruster_gauge(const MatrixXd& rows, const Eigen::Ref<const VectorXd>& u) {
  const Index k = rows.rows();
  const Index m = rows.cols();
  const double unorm = u.norm();
  if (unorm == 0.0) return 0.0;
  if (k > 30) throw Error(ErrorKind::InvalidArgument, "thrusters: exact cost limited to 30 rows");

  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
  using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;
  if (m > 8) throw Error(ErrorKind::InvalidArgument, "thrusters: exact cost limited to 8 input axes");

  std::optional<double> best;
  std::vector<Index> idx;
  const Index max_size = std::min(k, m);
  Small a;
  for (Index s = 1; s <= max_size; ++s) {
    idx.resize(static_cast<std::size_t>(s));
    for (Index j = 0; j < s; ++j) idx[static_cast<std::size_t>(j)] = j;
    while (true) {
      a.resize(m, s);
      for (Index j = 0; j < s; ++j) a.col(j) = rows.row(idx[static_cast<std::size_t>(j)]).transpose();
      Eigen::ColPivHouseholderQR<Small> qr(a);
      if (qr.rank() == s) {
        const SmallVec alpha = qr.solve(u);
        const double fit = (a * alpha - u).norm();
        if (fit <= 1e-10 * unorm && alpha.minCoeff() >= -1e-12 * unorm) {
          const double total = alpha.cwiseMax(0.0).sum();
          if (!best || total < *best) best = total;
        }
      }
      // next combination
      Index pos = s - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == k - s + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (Index j = pos + 1; j < s; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

// Facets {x : n^T x <= 1} of conv(rows) when the origin is interior.
MatrixXd hull_facets(const MatrixXd& rows) {
  const Index k = rows.rows();
  const Index m = rows.cols();
  std::vector<VectorXd> found;
  std::vector<Index> idx(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) idx[static_cast<std::size_t>(j)] = j;
  while (true) {
    MatrixXd p(m, m);
    for (Index j = 0; j < m; ++j) p.row(j) = rows.row(idx[static_cast<std::size_t>(j)]);
    Eigen::FullPivLU<MatrixXd> lu(p);
    if (lu.rank() == m) {
      const VectorXd normal = lu.solve(VectorXd::Ones(m));
      if ((rows * normal).maxCoeff() <= 1.0 + 1e-12) found.push_back(normal);
    }
    Index pos = m - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == k - m + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < m; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  MatrixXd out(static_cast<Index>(found.size()), m);
  for (Index f = 0; f < out.rows(); ++f) out.row(f) = found[static_cast<std::size_t>(f)].transpose();
  return out;
}

}  // namespace

CostModel CostModel::two_norm(Index dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "two_norm: dimension must be positive");
  return CostModel(TwoNorm{}, dim);
}

CostModel CostModel::one_norm(Index dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "one_norm: dimension must be positive");
  return CostModel(OneNorm{}, dim);
}

CostModel CostModel::thrusters(const MatrixXd& rows) {
  if (rows.rows() < 1 || rows.cols() < 1) throw Error(ErrorKind::InvalidArgument, "thrusters: empty row matrix");
  PolyhedralThrusters t;
  t.rows = rows;
  for (Index r = 0; r < rows.rows(); ++r) {
    const double n = rows.row(r).norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::InvalidArgument, "thrusters: rows must be finite and nonzero");
    t.rows.row(r) /= n;
  }
  t.positively_spanning = true;
  for (Index axis = 0; axis < rows.cols() && t.positively_spanning; ++axis) {
    for (double sign : {1.0, -1.0}) {
      VectorXd d = VectorXd::Zero(rows.cols());
      d(axis) = sign;
      if (!thruster_gauge(t.rows, d)) {
        t.positively_spanning = false;
        break;
      }
    }
  }
  if (t.positively_spanning) t.facets = hull_facets(t.rows);
  const Index dim = rows.cols();
  return CostModel(std::move(t), dim);
}

CostModel CostModel::mixed_axis(Index fixed_axis, Index dim) {
  if (dim < 2 || fixed_axis < 0 || fixed_axis >= dim)
    throw Error(ErrorKind::InvalidArgument, "mixed_axis: fixed axis out of range");
  return CostModel(MixedAxis{fixed_axis, dim}, dim);
}

CostModel CostModel::custom(CustomCost cost) {
  if (!cost.support || !cost.generators || !cost.cost)
    throw Error(ErrorKind::InvalidArgument, "custom cost: all three oracles are required");
  const Index dim = cost.dim;
  return CostModel(std::move(cost), dim);
}

MatrixXd CostModel::tetrahedral_rows() {
  const double s23 = std::sqrt(2.0 / 3.0);
  const double s13 = std::sqrt(1.0 / 3.0);
  MatrixXd rows(4, 3);
  rows << s23, 0.0, -s13,
          -s23, 0.0, -s13,
          0.0, s23, s13,
          0.0, -s23, s13;
  return rows;
}

std::string CostModel::name() const {
  return std::visit(Overloaded{
                        [](const TwoNorm&) { return std::string("two_norm"); },
                        [](const OneNorm&) { return std::string("one_norm"); },
                        [](const PolyhedralThrusters&) { return std::string("thrusters"); },
                        [](const MixedAxis&) { return std::string("mixed_axis"); },
                        [](const CustomCost& c) { return c.name.empty() ? std::string("custom") : c.name; },
                    },
                    variant_);
}

bool CostModel::is_polyhedral() const noexcept {
  return std::holds_alternative<OneNorm>(variant_) || std::holds_alternative<PolyhedralThrusters>(variant_);
}

std::vector<VectorXd> CostModel::vertices() const {
  std::vector<VectorXd> out;
  if (std::holds_alternative<OneNorm>(variant_)) {
    for (Index k = 0; k < dim_; ++k) {
      for (double sign : {1.0, -1.0}) {
        VectorXd v = VectorXd::Zero(dim_);
        v(k) = sign;
        out.push_back(std::move(v));
      }
    }
  } else if (const auto* t = std::get_if<PolyhedralThrusters>(&variant_)) {
    for (Index r = 0; r < t->rows.rows(); ++r) out.emplace_back(t->rows.row(r).transpose());
  } else {
    throw Error(ErrorKind::InvalidArgument, "vertices: cost model " + name() + " is not polyhedral");
  }
  return out;
}

bool CostModel::operator==(const CostModel& other) const {
  if (dim_ != other.dim_ || variant_.index() != other.variant_.index()) return false;
  if (const auto* a = std::get_if<PolyhedralThrusters>(&variant_)) {
    const auto& b = std::get<PolyhedralThrusters>(other.variant_);
    return a->rows.rows() == b.rows.rows() && a->rows == b.rows;
  }
  if (const auto* a = std::get_if<MixedAxis>(&variant_)) return a->fixed_axis == std::get<MixedAxis>(other.variant_).fixed_axis;
  if (std::holds_alternative<CustomCost>(variant_)) return false;
  return true;
}

double support(const CostModel& cost, const Eigen::Ref<const VectorXd>& v) {
  check_dim(cost, v.size(), "support");
  return std::visit(Overloaded{
                        [&](const TwoNorm&) { return v.norm(); },
                        [&](const OneNorm&) { return v.cwiseAbs().maxCoeff(); },
                        [&](const PolyhedralThrusters& t) { return std::max(0.0, (t.rows * v).maxCoeff()); },
                        [&](const MixedAxis& mx) {
                          const double fixed = std::abs(v(mx.fixed_axis));
                          const double rest = std::sqrt(std::max(0.0, v.squaredNorm() - fixed * fixed));
                          return std::max(fixed, rest);
                        },
                        [&](const CustomCost& c) { return c.support(v); },
                    },
                    cost.variant());
}

std::vector<VectorXd> support_generators(const CostModel& cost, const Eigen::Ref<const VectorXd>& v) {
  check_dim(cost, v.size(), "support_generators");
  const double h = support(cost, v);
  if (!(h > 0.0)) throw Error(ErrorKind::NoAscentDirection, "support_generators: no ascent direction (support is zero)");
  const double cutoff = h - kGeneratorTieTolerance * h;
  const Index m = v.size();

  return std::visit(
      Overloaded{
          [&](const TwoNorm&) { return std::vector<VectorXd>{v / h}; },
          [&](const OneNorm&) {
            std::vector<VectorXd> out;
            for (Index k = 0; k < m; ++k) {
              if (std::abs(v(k)) >= cutoff) {
                VectorXd g = VectorXd::Zero(m);
                g(k) = v(k) > 0.0 ? 1.0 : -1.0;
                out.push_back(std::move(g));
              }
            }
            return out;
          },
          [&](const PolyhedralThrusters& t) {
            const VectorXd dots = t.rows * v;
            std::vector<VectorXd> out;
            for (Index r = 0; r < dots.size(); ++r)
              if (dots(r) >= cutoff) out.emplace_back(t.rows.row(r).transpose());
            return out;
          },
          [&](const MixedAxis& mx) {
            std::vector<VectorXd> out;
            const double fixed = v(mx.fixed_axis);
            VectorXd rest = v;
            rest(mx.fixed_axis) = 0.0;
            const double rest_norm = rest.norm();
            if (std::abs(fixed) >= cutoff) {
              VectorXd g = VectorXd::Zero(m);
              g(mx.fixed_axis) = fixed > 0.0 ? 1.0 : -1.0;
              out.push_back(std::move(g));
            }
            if (rest_norm >= cutoff) out.push_back(rest / rest_norm);
            return out;
          },
          [&](const CustomCost& c) { return c.generators(v); },
      },
      cost.variant());
}

double cost_of(const CostModel& cost, const Eigen::Ref<const VectorXd>& u) {
  check_dim(cost, u.size(), "cost_of");
  if (!u.allFinite()) throw Error(ErrorKind::InvalidArgument, "cost_of: non-finite input");
  return std::visit(Overloaded{
                        [&](const TwoNorm&) { return u.norm(); },
                        [&](const OneNorm&) { return u.lpNorm<1>(); },
                        [&](const PolyhedralThrusters& t) {
                          if (t.facets.rows() > 0) return std::max(0.0, (t.facets * u).maxCoeff());
                          const auto gauge = thruster_gauge(t.rows, u);
                          if (!gauge) throw Error(ErrorKind::InvalidArgument, "cost_of: impulse outside the thruster cone");
                          return *gauge;
                        },
                        [&](const MixedAxis& mx) {
                          const double fixed = std::abs(u(mx.fixed_axis));
                          return fixed + std::sqrt(std::max(0.0, u.squaredNorm() - fixed * fixed));
                        },
                        [&](const CustomCost& c) { return c.cost(u); },
                    },
                    cost.variant());
}

}  // namespace impulse
