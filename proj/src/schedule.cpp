#include "impulse/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace impulse {

namespace {

std::string fmt_time(double t) {
  std::ostringstream os;
  os.precision(12);
  os << t;
  return os.str();
}

// Unit directions used to probe smooth unit balls.
std::vector<VectorXd> probe_directions(Index dim) {
  std::vector<VectorXd> dirs;
  for (Index k = 0; k < dim; ++k) {
    for (double s : {1.0, -1.0}) {
      VectorXd d = VectorXd::Zero(dim);
      d(k) = s;
      dirs.push_back(std::move(d));
    }
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (int n = 0; n < 2000; ++n) {
    VectorXd d(dim);
    for (Index k = 0; k < dim; ++k) d(k) = normal(rng);
    dirs.push_back(d.normalized());
  }
  return dirs;
}

// Extreme points of U(1) (polyhedral) or a dense sample of its boundary (smooth).
std::vector<VectorXd> unit_set_points(const CostModel& c) {
  if (c.is_polyhedral()) return c.vertices();
  std::vector<VectorXd> pts;
  for (const auto& d : probe_directions(c.input_dim())) {
    for (auto& g : support_generators(c, d)) pts.push_back(std::move(g));
  }
  return pts;
}

// Directions spanning the cone C of a model.
std::vector<VectorXd> cone_generators(const CostModel& c) {
  if (const auto* t = std::get_if<PolyhedralThrusters>(&c.variant()); t && !t->positively_spanning) {
    return c.vertices();
  }
  std::vector<VectorXd> dirs;
  for (Index k = 0; k < c.input_dim(); ++k) {
    for (double s : {1.0, -1.0}) {
      VectorXd d = VectorXd::Zero(c.input_dim());
      d(k) = s;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

bool admissible(const CostModel& c, const VectorXd& u, double* value) {
  try {
    *value = cost_of(c, u);
    return true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidArgument) throw;
    return false;
  }
}

}  // namespace

BoundaryReport validate_boundary(const CostModel& left, const CostModel& mid, const CostModel& right) {
  for (const CostModel* c : {&left, &mid, &right}) {
    if (std::holds_alternative<CustomCost>(c->variant()))
      return {BoundaryStatus::Unavailable, "check unavailable for custom cost " + c->name()};
  }
  if (left.input_dim() != mid.input_dim() || right.input_dim() != mid.input_dim())
    return {BoundaryStatus::Unavailable, "check unavailable: input dimensions differ"};

  for (const CostModel* side : {&left, &right}) {
    const char* label = side == &left ? "left" : "right";
    for (const auto& g : cone_generators(*side)) {
      double value = 0.0;
      if (!admissible(mid, g, &value)) {
        std::ostringstream os;
        os << label << " cone direction [" << g.transpose() << "] is inadmissible in the middle mode";
        return {BoundaryStatus::Violation, os.str()};
      }
    }
    for (const auto& p : unit_set_points(*side)) {
      double value = 0.0;
      if (!admissible(mid, p, &value) || value > 1.0 + 1e-9) {
        std::ostringstream os;
        os << label << " unit-cost point [" << p.transpose() << "] costs " << value << " in the middle mode";
        return {BoundaryStatus::Violation, os.str()};
      }
    }
  }
  return {BoundaryStatus::Ok, "ok"};
}

ModeSchedule decompose_schedule(const std::vector<CostPiece>& pieces, const std::vector<double>& grid) {
  if (pieces.empty()) throw Error(ErrorKind::InvalidArgument, "decompose_schedule: no cost pieces");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "decompose_schedule: grid must be strictly increasing");
  }

  std::map<int, std::size_t> first_piece;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto& iv = pieces[p].interval;
    if (!(iv.hi >= iv.lo)) throw Error(ErrorKind::InvalidArgument, "decompose_schedule: interval with hi < lo");
    auto [it, inserted] = first_piece.emplace(pieces[p].mode_id, p);
    if (!inserted && !(pieces[it->second].cost == pieces[p].cost))
      throw Error(ErrorKind::InvalidArgument,
                  "decompose_schedule: pieces of mode " + std::to_string(pieces[p].mode_id) + " have different costs");
  }
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    for (std::size_t q = p + 1; q < pieces.size(); ++q) {
      const auto& a = pieces[p].interval;
      const auto& b = pieces[q].interval;
      if (std::max(a.lo, b.lo) < std::min(a.hi, b.hi))
        throw Error(ErrorKind::InvalidArgument, "decompose_schedule: pieces " + std::to_string(p) + " and " +
                                                    std::to_string(q) + " have overlapping interiors");
    }
  }

  std::map<int, ControlMode> modes;
  std::vector<int> order;
  for (const auto& pc : pieces) {
    if (modes.find(pc.mode_id) == modes.end()) {
      modes.emplace(pc.mode_id, ControlMode{pc.mode_id, pc.cost, {}});
      order.push_back(pc.mode_id);
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, bool> boundary_cache;
  std::vector<std::size_t> owners;
  for (double t : grid) {
    owners.clear();
    for (std::size_t p = 0; p < pieces.size(); ++p)
      if (pieces[p].interval.contains(t)) owners.push_back(p);
    if (owners.empty()) throw Error(ErrorKind::InvalidArgument, "decompose_schedule: grid time " + fmt_time(t) + " s is not covered");
    if (owners.size() > 2)
      throw Error(ErrorKind::InvalidArgument, "decompose_schedule: grid time " + fmt_time(t) + " s lies in more than two pieces");

    if (owners.size() == 1) {
      modes.at(pieces[owners[0]].mode_id).times.push_back(t);
      continue;
    }
    std::size_t earlier = owners[0];
    std::size_t later = owners[1];
    if (pieces[later].interval.lo < pieces[earlier].interval.lo) std::swap(earlier, later);
    modes.at(pieces[earlier].mode_id).times.push_back(t);
    if (pieces[later].mode_id == pieces[earlier].mode_id) continue;
    auto key = std::make_pair(earlier, later);
    auto hit = boundary_cache.find(key);
    if (hit == boundary_cache.end()) {
      const auto rep = validate_boundary(pieces[earlier].cost, pieces[earlier].cost, pieces[later].cost);
      hit = boundary_cache.emplace(key, rep.ok()).first;
    }
    if (hit->second) modes.at(pieces[later].mode_id).times.push_back(t);
  }

  ModeSchedule out;
  for (int id : order) {
    auto& m = modes.at(id);
    if (m.times.empty()) continue;
    std::sort(m.times.begin(), m.times.end());
    m.times.erase(std::unique(m.times.begin(), m.times.end()), m.times.end());
    out.push_back(std::move(m));
  }
  return out;
}

void validate_schedule(const ModeSchedule& schedule) {
  if (schedule.empty()) throw Error(ErrorKind::InvalidArgument, "schedule has no modes");
  std::vector<int> ids;
  const Index dim = schedule.front().cost.input_dim();
  for (const auto& m : schedule) {
    if (m.times.empty()) throw Error(ErrorKind::InvalidArgument, "mode " + std::to_string(m.id) + " has no admissible times");
    for (std::size_t k = 1; k < m.times.size(); ++k) {
      if (!(m.times[k] > m.times[k - 1]))
        throw Error(ErrorKind::InvalidArgument, "mode " + std::to_string(m.id) + " times are not strictly increasing");
    }
    if (m.cost.input_dim() != dim) throw Error(ErrorKind::InvalidArgument, "modes disagree on input dimension");
    ids.push_back(m.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw Error(ErrorKind::InvalidArgument, "duplicate mode id");
}

}  // namespace impulse
