#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsgrn/digraph.hpp"
#include "dsgrn/error.hpp"
#include "dsgrn/network.hpp"
#include "dsgrn/parameter_graph.hpp"

namespace dsgrn {

/// Fundamental cells: coordinate c_i in {0..m_i} counts thresholds of
/// variable i below the cell. Index is mixed radix, dimension 0 first.
class CellGrid {
 public:
  CellGrid() = default;
  explicit CellGrid(const RegulatoryNetwork& net) {
    std::size_t stride = 1;
    for (const auto& n : net.nodes()) {
      limits_.push_back(n.n_outputs());
      strides_.push_back(stride);
      stride *= n.n_outputs() + 1;
    }
    size_ = stride;
  }

  std::size_t dimension() const { return limits_.size(); }
  std::size_t size() const { return size_; }
  std::size_t limit(std::size_t d) const { return limits_[d]; }
  std::size_t stride(std::size_t d) const { return strides_[d]; }

  std::size_t coordinate(std::size_t cell, std::size_t d) const {
    return (cell / strides_[d]) % (limits_[d] + 1);
  }

  std::vector<std::size_t> coordinates(std::size_t cell) const {
    std::vector<std::size_t> c(dimension());
    for (std::size_t d = 0; d < dimension(); ++d) c[d] = coordinate(cell, d);
    return c;
  }

  std::size_t index(const std::vector<std::size_t>& coords) const {
    if (coords.size() != dimension()) fail(ErrorCode::IndexOutOfRange, "cell dimension mismatch");
    std::size_t idx = 0;
    for (std::size_t d = 0; d < dimension(); ++d) {
      if (coords[d] > limits_[d]) fail(ErrorCode::IndexOutOfRange, "cell coordinate out of range");
      idx += coords[d] * strides_[d];
    }
    return idx;
  }

  /// Interior faces: the face between cell and cell + e_d, for c_d < m_d.
  std::size_t face_count() const {
    std::size_t total = 0;
    for (std::size_t d = 0; d < dimension(); ++d) total += size_ / (limits_[d] + 1) * limits_[d];
    return total;
  }

 private:
  std::vector<std::size_t> limits_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

enum class Side { Left, Right };

/// Wall labels: +1 entrance, -1 absorbing.
enum WallLabel : int { Absorbing = -1, Entrance = 1 };

/// Per-parameter view of the phase space: which combination each node sees
/// in each cell, and the resulting target slab. Keeps a pointer to the
/// network, which must outlive it.
class PhaseSpace {
 public:
  PhaseSpace(const RegulatoryNetwork& net, const CombinatorialParameter& phi)
      : net_(&net), grid_(net) {
    if (phi.size() != net.size()) fail(ErrorCode::InvalidArgument, "parameter/network mismatch");
    rank_.resize(net.size());
    for (std::size_t j = 0; j < net.size(); ++j)
      for (const auto& s : net.node(j).sources) {
        // Rank (1-based) of threshold theta_{j,i} in the order of source i.
        std::size_t tp = *net.node(s.node).target_position(j);
        rank_[j].push_back(phi.orders[s.node].rank_of(tp) + 1);
      }
    slabs_.resize(grid_.size() * net.size());
    for (std::size_t cell = 0; cell < grid_.size(); ++cell)
      for (std::size_t j = 0; j < net.size(); ++j)
        slabs_[cell * net.size() + j] =
            static_cast<std::uint8_t>(phi.bands[j][input_combination(cell, j)]);
  }

  const CellGrid& grid() const { return grid_; }
  const RegulatoryNetwork& network() const { return *net_; }

  InputCombination input_combination(std::size_t cell, std::size_t j) const {
    const auto& node = net_->node(j);
    InputCombination a = 0;
    for (std::size_t k = 0; k < node.sources.size(); ++k) {
      const auto& s = node.sources[k];
      bool above = grid_.coordinate(cell, s.node) >= rank_[j][k];
      bool on = (s.sign == Sign::Activation) == above;
      if (on) a |= InputCombination{1} << k;
    }
    return a;
  }

  /// Band of node j's output in the cell: the cell it is heading for along dimension j.
  std::size_t target(std::size_t cell, std::size_t j) const { return slabs_[cell * net_->size() + j]; }

  WallLabel wall_label(std::size_t cell, std::size_t d, Side side) const {
    const std::size_t c = grid_.coordinate(cell, d);
    const std::size_t t = target(cell, d);
    if (side == Side::Left) {
      if (c == 0) fail(ErrorCode::IndexOutOfRange, "no left wall at coordinate 0");
      return t >= c ? Entrance : Absorbing;
    }
    if (c == grid_.limit(d)) fail(ErrorCode::IndexOutOfRange, "no right wall at the top cell");
    return t <= c ? Entrance : Absorbing;
  }

  bool attracting(std::size_t cell) const {
    for (std::size_t d = 0; d < grid_.dimension(); ++d)
      if (target(cell, d) != grid_.coordinate(cell, d)) return false;
    return true;
  }

 private:
  const RegulatoryNetwork* net_;
  CellGrid grid_;
  std::vector<std::vector<std::size_t>> rank_;
  std::vector<std::uint8_t> slabs_;
};

inline InputCombination cell_input_combination(const RegulatoryNetwork& net,
                                               const CombinatorialParameter& phi,
                                               const std::vector<std::size_t>& cell, std::size_t j) {
  PhaseSpace ps(net, phi);
  return ps.input_combination(ps.grid().index(cell), j);
}

/// A state transition graph together with the cells its vertices stand for.
/// Face vertices have no cell of their own.
struct StateTransitionGraph {
  Digraph graph;
  std::vector<std::optional<std::size_t>> cell;  // per vertex
  // Per face vertex: its two cells (lower, upper along the face's dimension).
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> face;
};

inline StateTransitionGraph domain_graph(const PhaseSpace& ps) {
  const auto& grid = ps.grid();
  StateTransitionGraph stg;
  stg.cell.resize(grid.size());
  stg.face.resize(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    stg.cell[cell] = cell;
    stg.graph.add_vertex();
    std::vector<Digraph::Vertex> out;
    for (std::size_t d = 0; d < grid.dimension(); ++d) {
      const std::size_t c = grid.coordinate(cell, d);
      const std::size_t t = ps.target(cell, d);
      if (t > c) out.push_back(static_cast<Digraph::Vertex>(cell + grid.stride(d)));
      if (t < c) out.push_back(static_cast<Digraph::Vertex>(cell - grid.stride(d)));
    }
    if (out.empty()) out.push_back(static_cast<Digraph::Vertex>(cell));  // attracting
    std::sort(out.begin(), out.end());
    for (auto v : out) stg.graph.add_edge(v);
  }
  return stg;
}

inline StateTransitionGraph domain_graph(const RegulatoryNetwork& net, const CombinatorialParameter& phi) {
  return domain_graph(PhaseSpace(net, phi));
}

namespace detail {

struct FaceTable {
  // face id of (cell, d) for the face between cell and cell + e_d
  std::vector<std::int64_t> id;
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::vector<std::size_t> dim;

  explicit FaceTable(const CellGrid& grid) : id(grid.size() * grid.dimension(), -1) {
    for (std::size_t cell = 0; cell < grid.size(); ++cell)
      for (std::size_t d = 0; d < grid.dimension(); ++d)
        if (grid.coordinate(cell, d) < grid.limit(d)) {
          id[cell * grid.dimension() + d] = static_cast<std::int64_t>(cells.size());
          cells.emplace_back(cell, cell + grid.stride(d));
          dim.push_back(d);
        }
  }
};

/// (face id, label for this cell) for every interior face of the cell.
inline std::vector<std::pair<std::size_t, WallLabel>> cell_walls(const PhaseSpace& ps,
                                                                 const FaceTable& faces,
                                                                 std::size_t cell) {
  const auto& grid = ps.grid();
  std::vector<std::pair<std::size_t, WallLabel>> out;
  for (std::size_t d = 0; d < grid.dimension(); ++d) {
    const std::size_t c = grid.coordinate(cell, d);
    if (c > 0)
      out.emplace_back(faces.id[(cell - grid.stride(d)) * grid.dimension() + d],
                       ps.wall_label(cell, d, Side::Left));
    if (c < grid.limit(d))
      out.emplace_back(faces.id[cell * grid.dimension() + d], ps.wall_label(cell, d, Side::Right));
  }
  return out;
}

}  // namespace detail

/// Vertices: interior faces, then attracting cells. tau -> tau' whenever
/// some cell has tau as an entrance wall and tau' as an absorbing wall.
inline StateTransitionGraph wall_graph(const PhaseSpace& ps) {
  const auto& grid = ps.grid();
  detail::FaceTable faces(grid);
  const std::size_t n_faces = faces.cells.size();
  StateTransitionGraph stg;
  for (std::size_t f = 0; f < n_faces; ++f) {
    stg.cell.emplace_back();
    stg.face.emplace_back(faces.cells[f]);
  }
  std::vector<std::pair<Digraph::Vertex, Digraph::Vertex>> edges;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    auto walls = detail::cell_walls(ps, faces, cell);
    if (ps.attracting(cell)) {
      auto v = static_cast<Digraph::Vertex>(stg.cell.size());
      stg.cell.emplace_back(cell);
      stg.face.emplace_back();
      edges.emplace_back(v, v);
      for (auto [f, label] : walls) edges.emplace_back(static_cast<Digraph::Vertex>(f), v);
      continue;
    }
    for (auto [f, lf] : walls)
      for (auto [g, lg] : walls)
        if (lf == Entrance && lg == Absorbing)
          edges.emplace_back(static_cast<Digraph::Vertex>(f), static_cast<Digraph::Vertex>(g));
  }
  stg.graph = Digraph::from_edges(stg.cell.size(), std::move(edges));
  return stg;
}

/// Vertices: every cell, then every interior face. kappa -> tau for
/// absorbing walls, tau -> kappa for entrance walls, kappa -> kappa when
/// attracting.
inline StateTransitionGraph wall_domain_graph(const PhaseSpace& ps) {
  const auto& grid = ps.grid();
  detail::FaceTable faces(grid);
  StateTransitionGraph stg;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    stg.cell.emplace_back(cell);
    stg.face.emplace_back();
  }
  for (const auto& fc : faces.cells) {
    stg.cell.emplace_back();
    stg.face.emplace_back(fc);
  }
  std::vector<std::pair<Digraph::Vertex, Digraph::Vertex>> edges;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const auto kv = static_cast<Digraph::Vertex>(cell);
    if (ps.attracting(cell)) edges.emplace_back(kv, kv);
    for (auto [f, label] : detail::cell_walls(ps, faces, cell)) {
      const auto fv = static_cast<Digraph::Vertex>(grid.size() + f);
      if (label == Absorbing)
        edges.emplace_back(kv, fv);
      else
        edges.emplace_back(fv, kv);
    }
  }
  stg.graph = Digraph::from_edges(stg.cell.size(), std::move(edges));
  return stg;
}

}  // namespace dsgrn
