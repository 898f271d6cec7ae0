#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dsgrn/error.hpp"
#include "dsgrn/morse.hpp"
#include "dsgrn/network.hpp"
#include "dsgrn/phase_graphs.hpp"
#include "dsgrn/witness.hpp"

namespace dsgrn {

/// Smooth counterpart of a switching system: every step function replaced
/// by a Hill function with its own exponent.
struct HillSystem {
  const RegulatoryNetwork* net = nullptr;
  ConcreteParameter<double> z;
  std::vector<std::vector<double>> exponent;  // [node][source position]

  HillSystem(const RegulatoryNetwork& network, ConcreteParameter<double> params, double n)
      : net(&network), z(std::move(params)) {
    for (const auto& node : network.nodes()) exponent.emplace_back(node.n_inputs(), n);
    validate();
  }

  void validate() const {
    for (std::size_t j = 0; j < net->size(); ++j)
      for (std::size_t k = 0; k < net->node(j).n_inputs(); ++k) {
        if (!(exponent[j][k] >= 1)) fail(ErrorCode::InvalidArgument, "Hill exponent must be at least 1");
        if (!(z.low[j][k] > 0 && z.low[j][k] < z.high[j][k]))
          fail(ErrorCode::InvalidArgument, "need 0 < l < u for every edge");
      }
  }

  double threshold(std::size_t target, std::size_t k) const {
    const std::size_t i = net->node(target).sources[k].node;
    return z.theta[i][*net->node(i).target_position(target)];
  }

  /// Hill response of source k of node j at level x.
  double response(std::size_t j, std::size_t k, double x) const {
    const double l = z.low[j][k], u = z.high[j][k];
    const double r = x <= 0 ? 0.0 : std::pow(x / threshold(j, k), exponent[j][k]);
    const double up = std::isinf(r) ? 1.0 : r / (1.0 + r);
    const bool activating = net->node(j).sources[k].sign == Sign::Activation;
    return l + (u - l) * (activating ? up : 1.0 - up);
  }

  std::vector<double> rhs(const std::vector<double>& x) const {
    std::vector<double> dx(x.size());
    std::vector<double> values;
    for (std::size_t j = 0; j < net->size(); ++j) {
      const auto& node = net->node(j);
      values.resize(node.n_inputs());
      for (std::size_t k = 0; k < node.n_inputs(); ++k) values[k] = response(j, k, x[node.sources[k].node]);
      dx[j] = -z.gamma[j] * x[j] + logic_eval<double>(node.logic, values);
    }
    return dx;
  }
};

struct Trajectory {
  double step = 0;
  std::size_t dimension = 0;
  std::vector<double> states;  // row-major, one row per time step

  std::size_t size() const { return dimension ? states.size() / dimension : 0; }
  double time(std::size_t s) const { return static_cast<double>(s) * step; }
  double at(std::size_t s, std::size_t d) const { return states[s * dimension + d]; }
};

/// Classical fixed-step fourth-order Runge-Kutta for any right-hand side.
template <class Rhs>
Trajectory integrate(const Rhs& f, std::vector<double> x, double horizon, double step) {
  if (!(step > 0) || !(horizon > 0)) fail(ErrorCode::InvalidArgument, "step and horizon must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / step));
  Trajectory traj;
  traj.step = step;
  traj.dimension = x.size();
  traj.states.reserve((steps + 1) * x.size());
  traj.states.insert(traj.states.end(), x.begin(), x.end());
  std::vector<double> tmp(x.size());
  for (std::size_t s = 0; s < steps; ++s) {
    auto k1 = f(x);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * step * k1[i];
    auto k2 = f(tmp);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * step * k2[i];
    auto k3 = f(tmp);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + step * k3[i];
    auto k4 = f(tmp);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += step / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!std::isfinite(x[i]))
        fail(ErrorCode::NonFiniteState, "state became non-finite at t=" + std::to_string((s + 1) * step));
    }
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  }
  return traj;
}

inline Trajectory integrate(const HillSystem& sys, std::vector<double> x0, double horizon = 500,
                            double step = 0.01) {
  if (x0.size() != sys.net->size()) fail(ErrorCode::ArityMismatch, "initial state has the wrong dimension");
  for (double v : x0)
    if (!(v >= 0)) fail(ErrorCode::InvalidArgument, "initial state must be nonnegative");
  return integrate([&](const std::vector<double>& x) { return sys.rhs(x); }, std::move(x0), horizon, step);
}

struct OscillationCriteria {
  double transient = 0.5;
  std::size_t min_crossings = 4;
  double amplitude_retention = 0.5;
  double hysteresis = 1e-6;  // relative to the threshold
};

namespace detail {

/// Crossings of one level with a small dead band, so that rounding noise
/// around an equilibrium sitting on the threshold is not counted.
inline std::size_t count_crossings(const Trajectory& traj, std::size_t d, std::size_t from, double level,
                                   double band) {
  int side = 0;
  std::size_t crossings = 0;
  for (std::size_t s = from; s < traj.size(); ++s) {
    const double x = traj.at(s, d);
    int now = x > level + band ? 1 : x < level - band ? -1 : 0;
    if (now == 0) continue;
    if (side != 0 && now != side) ++crossings;
    side = now;
  }
  return crossings;
}

inline double amplitude(const Trajectory& traj, std::size_t d, std::size_t from, std::size_t to) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t s = from; s < to; ++s) {
    lo = std::min(lo, traj.at(s, d));
    hi = std::max(hi, traj.at(s, d));
  }
  return hi - lo;
}

}  // namespace detail

/// Sustained oscillation through the thresholds: after the transient every
/// variable crosses one of its thresholds often enough, and its range over
/// the final quarter keeps a fixed share of the post-transient range.
inline bool detect_oscillation(const Trajectory& traj, const std::vector<std::vector<double>>& thresholds,
                               const OscillationCriteria& c = {}) {
  const std::size_t n = traj.size();
  const auto from = static_cast<std::size_t>(c.transient * static_cast<double>(n));
  if (n < 8 || from + 4 > n) return false;
  const std::size_t last_quarter = from + (n - from) * 3 / 4;
  for (std::size_t d = 0; d < traj.dimension; ++d) {
    std::size_t best = 0;
    for (double level : thresholds[d])
      best = std::max(best, detail::count_crossings(traj, d, from, level, c.hysteresis * level));
    if (best < c.min_crossings) return false;
    const double total = detail::amplitude(traj, d, from, n);
    if (!(total > 0)) return false;
    if (detail::amplitude(traj, d, last_quarter, n) < c.amplitude_retention * total) return false;
  }
  return true;
}

/// Times of the maxima of the excursions of variable d above level, after `from`.
inline std::vector<double> excursion_peaks(const Trajectory& traj, std::size_t d, double level,
                                           std::size_t from = 0) {
  std::vector<double> peaks;
  bool inside = false;
  double best = 0;
  std::size_t best_step = 0;
  for (std::size_t s = from; s < traj.size(); ++s) {
    const double x = traj.at(s, d);
    if (x > level) {
      if (!inside || x > best) {
        best = x;
        best_step = s;
      }
      inside = true;
    } else if (inside) {
      peaks.push_back(traj.time(best_step));
      inside = false;
    }
  }
  return peaks;
}

/// Longest run of consecutive follower peaks whose nearest leader peak comes
/// strictly before them.
inline std::size_t leading_peak_run(const std::vector<double>& leader, const std::vector<double>& follower) {
  std::size_t run = 0, best = 0;
  for (double t : follower) {
    double nearest = std::numeric_limits<double>::infinity();
    double signed_gap = 0;
    for (double s : leader)
      if (std::abs(t - s) < nearest) {
        nearest = std::abs(t - s);
        signed_gap = t - s;
      }
    if (std::isfinite(nearest) && signed_gap > 0) {
      best = std::max(best, ++run);
    } else {
      run = 0;
    }
  }
  return best;
}

/// Representative point of a cell: midpoints between consecutive
/// thresholds, half the lowest threshold below it, 1.5 times the highest
/// above it.
inline std::vector<double> cell_center(const CellGrid& grid, const std::vector<std::vector<double>>& thresholds,
                                       std::size_t cell) {
  std::vector<double> x(grid.dimension());
  for (std::size_t d = 0; d < grid.dimension(); ++d) {
    auto t = thresholds[d];
    std::sort(t.begin(), t.end());
    const std::size_t c = grid.coordinate(cell, d);
    if (c == 0) x[d] = t.front() / 2;
    else if (c == t.size()) x[d] = t.back() * 1.5;
    else x[d] = (t[c - 1] + t[c]) / 2;
  }
  return x;
}

/// Starting point for a simulation: the centre of a cell in a recurrent set
/// that is not a fixed point (falling back to any non-attracting cell),
/// pushed up by 1% so it does not sit on an equilibrium. Parameters on a
/// region boundary have no phase space of their own; they start from the
/// middle cell of the grid.
inline std::vector<double> default_initial_state(const RegulatoryNetwork& net, const ConcreteParameter<double>& z) {
  const CellGrid grid(net);
  std::optional<std::size_t> cell;
  try {
    PhaseSpace ps(net, omega(net, z));
    auto mg = morse_graph(ps, domain_graph(ps));
    for (std::size_t s = 0; s < mg.size() && !cell; ++s)
      if (auto k = mg.annotations[s].kind; k == Annotation::Kind::FC || k == Annotation::Kind::PC)
        cell = mg.cells[s].front();
    for (std::size_t c = 0; c < grid.size() && !cell; ++c)
      if (!ps.attracting(c)) cell = c;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotRegular) throw;
    std::vector<std::size_t> middle(grid.dimension());
    for (std::size_t d = 0; d < grid.dimension(); ++d) middle[d] = grid.limit(d) / 2;
    cell = grid.index(middle);
  }
  auto x = cell_center(grid, z.theta, cell.value_or(0));
  for (auto& v : x) v *= 1.01;
  return x;
}

}  // namespace dsgrn
