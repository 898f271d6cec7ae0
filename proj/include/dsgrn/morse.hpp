#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsgrn/digraph.hpp"
#include "dsgrn/network.hpp"
#include "dsgrn/phase_graphs.hpp"

namespace dsgrn {

/// Strongly connected components, emitted sinks first (Tarjan order).
/// comp[v] is the component of v.
struct SccDecomposition {
  std::vector<std::uint32_t> comp;
  std::vector<std::vector<Digraph::Vertex>> components;
};

inline SccDecomposition strongly_connected_components(const Digraph& g) {
  const std::size_t n = g.size();
  constexpr std::uint32_t unvisited = UINT32_MAX;
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<Digraph::Vertex> stack;
  SccDecomposition out;
  out.comp.assign(n, unvisited);
  std::uint32_t counter = 0;
  struct Frame {
    Digraph::Vertex v;
    const Digraph::Vertex* next;
  };
  std::vector<Frame> call;
  for (Digraph::Vertex root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, g.successors(root).begin()});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next != g.successors(f.v).end()) {
        Digraph::Vertex w = *f.next++;
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, g.successors(w).begin()});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const Digraph::Vertex v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        const auto id = static_cast<std::uint32_t>(out.components.size());
        out.components.emplace_back();
        Digraph::Vertex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.comp[w] = id;
          out.components.back().push_back(w);
        } while (w != v);
        std::sort(out.components.back().begin(), out.components.back().end());
      }
    }
  }
  return out;
}

/// Nontrivial components and self-looped singletons, ordered by smallest vertex.
inline std::vector<std::vector<Digraph::Vertex>> recurrent_components(const Digraph& g) {
  auto scc = strongly_connected_components(g);
  std::vector<std::vector<Digraph::Vertex>> out;
  for (auto& c : scc.components)
    if (c.size() > 1 || g.has_edge(c[0], c[0])) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

struct Annotation {
  enum class Kind { FP, FP_ON, FP_OFF, FC, PC };
  Kind kind = Kind::FP;
  std::vector<std::string> variables;  // PC only, in node order

  std::string str() const {
    switch (kind) {
      case Kind::FP: return "FP";
      case Kind::FP_ON: return "FP_ON";
      case Kind::FP_OFF: return "FP_OFF";
      case Kind::FC: return "FC";
      case Kind::PC: {
        std::string s = "PC(";
        for (std::size_t i = 0; i < variables.size(); ++i) s += (i ? "," : "") + variables[i];
        return s + ")";
      }
    }
    return "?";
  }

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

inline Annotation annotate(const RegulatoryNetwork& net, const CellGrid& grid,
                           const std::vector<std::size_t>& cells) {
  Annotation a;
  if (cells.size() == 1) {
    auto c = grid.coordinates(cells[0]);
    if (std::all_of(c.begin(), c.end(), [](std::size_t v) { return v == 0; }))
      a.kind = Annotation::Kind::FP_OFF;
    else if (std::all_of(c.begin(), c.end(), [](std::size_t v) { return v >= 1; }))
      a.kind = Annotation::Kind::FP_ON;
    else
      a.kind = Annotation::Kind::FP;
    return a;
  }
  std::vector<std::string> varying;
  for (std::size_t d = 0; d < grid.dimension(); ++d) {
    const std::size_t first = grid.coordinate(cells[0], d);
    if (std::any_of(cells.begin(), cells.end(),
                    [&](std::size_t c) { return grid.coordinate(c, d) != first; }))
      varying.push_back(net.node(d).name);
  }
  if (varying.size() == grid.dimension()) {
    a.kind = Annotation::Kind::FC;
  } else {
    a.kind = Annotation::Kind::PC;
    a.variables = std::move(varying);
  }
  return a;
}

/// Hasse diagram of recurrent components under reachability. Edges point
/// from a Morse set to the sets directly below it.
struct MorseGraph {
  std::vector<std::vector<Digraph::Vertex>> sets;
  std::vector<std::vector<std::size_t>> cells;  // per Morse set, sorted cell ids
  std::vector<Annotation> annotations;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t size() const { return sets.size(); }

  std::vector<std::size_t> minimal() const {
    std::vector<bool> has_out(size(), false);
    for (auto [a, b] : edges) has_out[a] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (!has_out[i]) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> maximal() const {
    std::vector<bool> has_in(size(), false);
    for (auto [a, b] : edges) has_in[b] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (!has_in[i]) out.push_back(i);
    return out;
  }
};

/// Reachability among the Morse sets of g: reach[i][j] iff a path leads
/// from set i to set j (i != j).
inline std::vector<std::vector<bool>> morse_reachability(
    const Digraph& g, const std::vector<std::vector<Digraph::Vertex>>& sets) {
  auto scc = strongly_connected_components(g);
  const std::size_t n_sets = sets.size();
  const std::size_t words = (n_sets + 63) / 64;
  std::vector<std::int64_t> set_of_comp(scc.components.size(), -1);
  for (std::size_t i = 0; i < n_sets; ++i) set_of_comp[scc.comp[sets[i][0]]] = static_cast<std::int64_t>(i);
  // Components arrive sinks first, so successors are finished before use.
  std::vector<std::uint64_t> below(scc.components.size() * words, 0);
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    std::uint64_t* mine = &below[c * words];
    for (auto v : scc.components[c])
      for (auto w : g.successors(v)) {
        const std::uint32_t d = scc.comp[w];
        if (d == c) continue;
        const std::uint64_t* theirs = &below[d * words];
        for (std::size_t k = 0; k < words; ++k) mine[k] |= theirs[k];
        if (set_of_comp[d] >= 0) mine[set_of_comp[d] / 64] |= std::uint64_t{1} << (set_of_comp[d] % 64);
      }
  }
  std::vector<std::vector<bool>> reach(n_sets, std::vector<bool>(n_sets, false));
  for (std::size_t i = 0; i < n_sets; ++i) {
    const std::uint64_t* row = &below[scc.comp[sets[i][0]] * words];
    for (std::size_t j = 0; j < n_sets; ++j) reach[i][j] = (row[j / 64] >> (j % 64)) & 1;
  }
  return reach;
}

/// Cells represented by a Morse set: its cell vertices, plus each cell that
/// has both an entrance face and an absorbing face inside the set.
inline std::vector<std::size_t> morse_set_cells(const StateTransitionGraph& stg,
                                                const std::vector<Digraph::Vertex>& set) {
  std::set<std::size_t> cells;
  std::set<Digraph::Vertex> members(set.begin(), set.end());
  std::map<std::size_t, int> seen;  // cell -> bitmask of (entered from set, exits into set)
  for (auto v : set) {
    if (stg.cell[v]) cells.insert(*stg.cell[v]);
    if (!stg.face[v]) continue;
    for (auto w : stg.graph.successors(v))
      if (members.count(w) && stg.face[w]) {
        // An edge between faces passes through the cell they share.
        auto [a1, b1] = *stg.face[v];
        auto [a2, b2] = *stg.face[w];
        for (std::size_t c : {a1, b1})
          if (c == a2 || c == b2) cells.insert(c);
      }
  }
  return {cells.begin(), cells.end()};
}

inline MorseGraph morse_graph(const RegulatoryNetwork& net, const CellGrid& grid,
                              const StateTransitionGraph& stg) {
  MorseGraph mg;
  mg.sets = recurrent_components(stg.graph);
  auto reach = morse_reachability(stg.graph, mg.sets);
  const std::size_t n = mg.sets.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !reach[i][j]) continue;
      bool direct = true;
      for (std::size_t k = 0; k < n && direct; ++k)
        if (k != i && k != j && reach[i][k] && reach[k][j]) direct = false;
      if (direct) mg.edges.emplace_back(i, j);
    }
  for (const auto& s : mg.sets) {
    mg.cells.push_back(morse_set_cells(stg, s));
    mg.annotations.push_back(annotate(net, grid, mg.cells.back()));
  }
  return mg;
}

inline MorseGraph morse_graph(const PhaseSpace& ps, const StateTransitionGraph& stg) {
  return morse_graph(ps.network(), ps.grid(), stg);
}

namespace detail {

inline std::vector<std::uint32_t> refine_colours(const MorseGraph& mg, std::vector<std::uint32_t> colour) {
  const std::size_t n = mg.size();
  std::vector<std::vector<std::size_t>> out(n), in(n);
  for (auto [a, b] : mg.edges) {
    out[a].push_back(b);
    in[b].push_back(a);
  }
  std::size_t classes = std::set<std::uint32_t>(colour.begin(), colour.end()).size();
  for (;;) {
    std::vector<std::vector<std::uint32_t>> sig(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::uint32_t> o, i;
      for (auto w : out[v]) o.push_back(colour[w]);
      for (auto w : in[v]) i.push_back(colour[w]);
      std::sort(o.begin(), o.end());
      std::sort(i.begin(), i.end());
      sig[v].push_back(colour[v]);
      sig[v].push_back(static_cast<std::uint32_t>(o.size()));
      sig[v].insert(sig[v].end(), o.begin(), o.end());
      sig[v].push_back(static_cast<std::uint32_t>(i.size()));
      sig[v].insert(sig[v].end(), i.begin(), i.end());
    }
    auto sorted = sig;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t v = 0; v < n; ++v)
      colour[v] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) -
                                             sorted.begin());
    if (sorted.size() == classes) return colour;
    classes = sorted.size();
  }
}

inline std::string serialise(const MorseGraph& mg, const std::vector<std::uint32_t>& position) {
  std::vector<std::string> labels(mg.size());
  for (std::size_t v = 0; v < mg.size(); ++v) labels[position[v]] = mg.annotations[v].str();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (auto [a, b] : mg.edges) edges.emplace_back(position[a], position[b]);
  std::sort(edges.begin(), edges.end());
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? ";" : "") + labels[i];
  s += '|';
  for (std::size_t i = 0; i < edges.size(); ++i)
    s += (i ? ";" : "") + std::to_string(edges[i].first) + ">" + std::to_string(edges[i].second);
  return s;
}

inline void canonical_search(const MorseGraph& mg, std::vector<std::uint32_t> colour,
                             std::string& best) {
  colour = refine_colours(mg, std::move(colour));
  const std::size_t n = mg.size();
  std::map<std::uint32_t, std::vector<std::size_t>> cls;
  for (std::size_t v = 0; v < n; ++v) cls[colour[v]].push_back(v);
  for (auto& [c, members] : cls) {
    if (members.size() < 2) continue;
    // Individualise each member of the first non-trivial class in turn.
    for (std::size_t v : members) {
      std::vector<std::uint32_t> next(n);
      for (std::size_t u = 0; u < n; ++u) next[u] = 2 * colour[u] + (colour[u] == c && u != v ? 1 : 0);
      canonical_search(mg, next, best);
    }
    return;
  }
  std::string s = serialise(mg, colour);
  if (best.empty() || s < best) best = s;
}

}  // namespace detail

/// Labelling-independent string form: "ann;ann;...|a>b;..." with nodes in
/// canonical position order.
inline std::string canonical_form(const MorseGraph& mg) {
  if (mg.size() == 0) return "|";
  std::vector<std::string> anns;
  for (const auto& a : mg.annotations) anns.push_back(a.str());
  auto sorted = anns;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> colour(mg.size());
  for (std::size_t v = 0; v < mg.size(); ++v)
    colour[v] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), anns[v]) -
                                           sorted.begin());
  std::string best;
  detail::canonical_search(mg, colour, best);
  return best;
}

/// A canonical form split back into annotations and edges.
struct CanonicalMorseGraph {
  std::vector<std::string> annotations;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::vector<std::size_t> minimal() const {
    std::vector<bool> has_out(annotations.size(), false);
    for (auto [a, b] : edges) has_out[a] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < annotations.size(); ++i)
      if (!has_out[i]) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> maximal() const {
    std::vector<bool> has_in(annotations.size(), false);
    for (auto [a, b] : edges) has_in[b] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < annotations.size(); ++i)
      if (!has_in[i]) out.push_back(i);
    return out;
  }

  /// "node <k>: <annotation>" then "edge <a> <b>" lines.
  std::string render() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < annotations.size(); ++i) out << "node " << i << ": " << annotations[i] << '\n';
    for (auto [a, b] : edges) out << "edge " << a << ' ' << b << '\n';
    return out.str();
  }
};

inline CanonicalMorseGraph parse_canonical(std::string_view form) {
  CanonicalMorseGraph g;
  auto bar = form.find('|');
  if (bar == std::string_view::npos) fail(ErrorCode::SyntaxError, "bad canonical Morse graph");
  auto split = [](std::string_view s) {
    std::vector<std::string> parts;
    if (s.empty()) return parts;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i < s.size() && s[i] == '(') ++depth;
      if (i < s.size() && s[i] == ')') --depth;
      if (i == s.size() || (s[i] == ';' && depth == 0)) {
        parts.emplace_back(s.substr(start, i - start));
        start = i + 1;
      }
    }
    return parts;
  };
  g.annotations = split(form.substr(0, bar));
  for (const auto& e : split(form.substr(bar + 1))) {
    auto gt = e.find('>');
    if (gt == std::string::npos) fail(ErrorCode::SyntaxError, "bad canonical Morse graph edge");
    g.edges.emplace_back(std::stoul(e.substr(0, gt)), std::stoul(e.substr(gt + 1)));
  }
  return g;
}

}  // namespace dsgrn
