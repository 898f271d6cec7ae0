#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace dsgrn {

/// Compressed adjacency lists; successors of v are targets[offsets[v] .. offsets[v+1]).
class Digraph {
 public:
  using Vertex = std::uint32_t;

  Digraph() : offsets_{0} {}

  static Digraph from_edges(std::size_t n, std::vector<std::pair<Vertex, Vertex>> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    Digraph g;
    g.offsets_.assign(n + 1, 0);
    for (auto [u, v] : edges) ++g.offsets_[u + 1];
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.reserve(edges.size());
    for (auto [u, v] : edges) g.targets_.push_back(v);
    return g;
  }

  /// Incremental construction with vertices added in order.
  void add_vertex() { offsets_.push_back(static_cast<Vertex>(targets_.size())); }
  void add_edge(Vertex v) {
    targets_.push_back(v);
    ++offsets_.back();
  }

  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size(); }

  struct Range {
    const Vertex* b;
    const Vertex* e;
    const Vertex* begin() const { return b; }
    const Vertex* end() const { return e; }
    std::size_t size() const { return static_cast<std::size_t>(e - b); }
  };

  Range successors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  bool has_edge(Vertex u, Vertex v) const {
    auto r = successors(u);
    return std::find(r.begin(), r.end(), v) != r.end();
  }

  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < size(); ++u)
      for (Vertex v : successors(u)) out.emplace_back(u, v);
    return out;
  }

 private:
  std::vector<Vertex> offsets_;
  std::vector<Vertex> targets_;
};

}  // namespace dsgrn
