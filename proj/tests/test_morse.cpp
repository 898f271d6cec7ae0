#include <map>
#include <numeric>
#include <queue>
#include <random>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace dsgrn;

namespace {

using Vertex = Digraph::Vertex;

MorseGraph abstract_graph(std::vector<std::string> labels, std::vector<std::pair<std::size_t, std::size_t>> edges) {
  MorseGraph mg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    mg.sets.push_back({static_cast<Vertex>(i)});
    mg.cells.push_back({i});
    Annotation a;
    if (labels[i] == "FP_ON") a.kind = Annotation::Kind::FP_ON;
    else if (labels[i] == "FP_OFF") a.kind = Annotation::Kind::FP_OFF;
    else if (labels[i] == "FC") a.kind = Annotation::Kind::FC;
    else if (labels[i].starts_with("PC")) {
      a.kind = Annotation::Kind::PC;
      a.variables = {labels[i].substr(2)};
    }
    mg.annotations.push_back(a);
  }
  mg.edges = std::move(edges);
  return mg;
}

// Brute force: is there a label-preserving bijection carrying one edge set onto the other?
bool isomorphic(const MorseGraph& a, const MorseGraph& b) {
  if (a.size() != b.size() || a.edges.size() != b.edges.size()) return false;
  std::vector<std::size_t> p(a.size());
  std::iota(p.begin(), p.end(), 0);
  std::set<std::pair<std::size_t, std::size_t>> target(b.edges.begin(), b.edges.end());
  do {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) ok = a.annotations[i] == b.annotations[p[i]];
    for (auto [u, v] : a.edges) ok = ok && target.count({p[u], p[v]});
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

MorseGraph random_dag(std::mt19937& rng, std::size_t n) {
  const char* labels[] = {"FP", "FP_ON", "FC", "PCx"};
  std::vector<std::string> ann;
  for (std::size_t i = 0; i < n; ++i) ann.push_back(labels[rng() % 3 == 0 ? rng() % 4 : 0]);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng() % 3 == 0) edges.emplace_back(i, j);
  return abstract_graph(ann, edges);
}

MorseGraph relabel(const MorseGraph& mg, const std::vector<std::size_t>& p) {
  MorseGraph out = mg;
  for (std::size_t i = 0; i < mg.size(); ++i) out.annotations[p[i]] = mg.annotations[i];
  out.edges.clear();
  for (auto [u, v] : mg.edges) out.edges.emplace_back(p[u], p[v]);
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::vector<std::vector<bool>> closure(const Digraph& g) {
  std::vector<std::vector<bool>> reach(g.size(), std::vector<bool>(g.size(), false));
  for (std::size_t s = 0; s < g.size(); ++s) {
    std::queue<Vertex> todo;
    todo.push(static_cast<Vertex>(s));
    while (!todo.empty()) {
      auto v = todo.front();
      todo.pop();
      for (auto w : g.successors(v))
        if (!reach[s][w]) {
          reach[s][w] = true;
          todo.push(w);
        }
    }
  }
  return reach;
}

std::map<std::string, std::size_t> census(const SignatureDatabase& db) {
  std::map<std::string, std::size_t> out;
  auto mult = db.multiplicities();
  for (std::size_t i = 0; i < db.morse_graphs.size(); ++i) out[db.morse_graphs[i]] = mult[i];
  return out;
}

}  // namespace

TEST(Morse, RecurrentComponents) {
  // 0 -> 1 -> 2 -> 1, 3 -> 3, 4 -> 0
  auto g = Digraph::from_edges(5, {{0, 1}, {1, 2}, {2, 1}, {3, 3}, {4, 0}});
  EXPECT_EQ(recurrent_components(g), (std::vector<std::vector<Vertex>>{{1, 2}, {3}}));
  auto dag = Digraph::from_edges(3, {{0, 1}, {1, 2}});
  EXPECT_TRUE(recurrent_components(dag).empty());
}

TEST(Morse, ChainGraph) {
  // a -> b -> c with self-edges at a and c
  auto g = Digraph::from_edges(3, {{0, 0}, {0, 1}, {1, 2}, {2, 2}});
  CellGrid grid(fixtures::network("selfactivator"));
  StateTransitionGraph stg;
  stg.graph = g;
  stg.cell = {0, 0, 1};
  stg.face.resize(3);
  auto mg = morse_graph(fixtures::network("selfactivator"), grid, stg);
  ASSERT_EQ(mg.size(), 2u);
  EXPECT_EQ(mg.edges, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
  EXPECT_EQ(mg.minimal(), std::vector<std::size_t>{1});
  EXPECT_EQ(mg.maximal(), std::vector<std::size_t>{0});
}

TEST(Morse, Annotations) {
  auto net = fixtures::network("repressilator");
  CellGrid grid(net);
  EXPECT_EQ(annotate(net, grid, {grid.index({0, 0, 0})}).kind, Annotation::Kind::FP_OFF);
  EXPECT_EQ(annotate(net, grid, {grid.index({1, 1, 1})}).kind, Annotation::Kind::FP_ON);
  EXPECT_EQ(annotate(net, grid, {grid.index({1, 0, 1})}).kind, Annotation::Kind::FP);
  std::vector<std::size_t> all(grid.size());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(annotate(net, grid, all).kind, Annotation::Kind::FC);
  auto pc = annotate(net, grid, {grid.index({0, 0, 0}), grid.index({0, 1, 0}), grid.index({0, 1, 1})});
  EXPECT_EQ(pc.kind, Annotation::Kind::PC);
  EXPECT_EQ(pc.str(), "PC(x2,x3)");
}

TEST(Morse, SelfActivatorBistability) {
  const auto& pg = fixtures::parameter_graph("selfactivator");
  auto mg = parameter_morse_graph(pg, 1);
  ASSERT_EQ(mg.size(), 2u);
  EXPECT_TRUE(mg.edges.empty());
  EXPECT_EQ(canonical_form(mg), "FP_OFF;FP_ON|");
  EXPECT_EQ(canonical_form(parameter_morse_graph(pg, 0)), "FP_OFF|");
  EXPECT_EQ(canonical_form(parameter_morse_graph(pg, 2)), "FP_ON|");
}

TEST(Morse, CanonicalFormExamples) {
  EXPECT_EQ(canonical_form(abstract_graph({"FP"}, {})), canonical_form(abstract_graph({"FP"}, {})));
  EXPECT_NE(canonical_form(abstract_graph({"FP_ON"}, {})), canonical_form(abstract_graph({"FP_OFF"}, {})));
  EXPECT_EQ(canonical_form(abstract_graph({"FP", "FC"}, {{1, 0}})), "FC;FP|0>1");
  auto parsed = parse_canonical("FC;FP|0>1");
  EXPECT_EQ(parsed.minimal(), std::vector<std::size_t>{1});
  EXPECT_EQ(parsed.render(), "node 0: FC\nnode 1: FP\nedge 0 1\n");
  EXPECT_THROW(parse_canonical("FP"), Error);
}

// Canonical forms agree exactly when the graphs are isomorphic.
TEST(Morse, CanonicalFormDecidesIsomorphism) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    auto a = random_dag(rng, n);
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    auto shuffled = relabel(a, p);
    EXPECT_EQ(canonical_form(a), canonical_form(shuffled));
    auto b = random_dag(rng, n);
    EXPECT_EQ(canonical_form(a) == canonical_form(b), isomorphic(a, b)) << canonical_form(a) << " vs " << canonical_form(b);
  }
}

// Hasse edges generate exactly the reachability among Morse sets and none is implied by the others.
TEST(Morse, TransitiveReduction) {
  for (const char* name : {"repressilator", "bistable"}) {
    const auto& pg = fixtures::parameter_graph(name);
    for (ParameterIndex i = 0; i < pg.size(); ++i) {
      PhaseSpace ps(pg.network(), pg.decode(i));
      auto stg = domain_graph(ps);
      auto mg = morse_graph(ps, stg);
      auto reach = closure(stg.graph);
      const std::size_t n = mg.size();
      ASSERT_GE(n, 1u);
      auto hasse = Digraph::from_edges(n, {mg.edges.begin(), mg.edges.end()});
      auto hreach = closure(hasse);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (a != b) EXPECT_EQ(hreach[a][b], static_cast<bool>(reach[mg.sets[a][0]][mg.sets[b][0]])) << name << i;
      for (auto [a, b] : mg.edges)
        for (std::size_t c = 0; c < n; ++c)
          EXPECT_FALSE(c != a && c != b && hreach[a][c] && hreach[c][b]);
      // Morse sets are disjoint.
      std::set<Vertex> used;
      for (const auto& s : mg.sets)
        for (auto v : s) EXPECT_TRUE(used.insert(v).second);
    }
  }
}

TEST(Morse, RepressilatorCensus) {
  auto c = census(fixtures::database("repressilator"));
  std::map<std::string, std::size_t> expected{{"FP|", 24}, {"FP_ON|", 1}, {"FP_OFF|", 1}, {"FC|", 1}};
  EXPECT_EQ(c, expected);
}

TEST(Morse, BistableCensus) {
  auto c = census(fixtures::database("bistable"));
  std::map<std::string, std::size_t> expected{{"FP|", 174},     {"FP_ON|", 10},     {"FP_OFF|", 2}, {"FC|", 6},
                                              {"FP;FP|", 20}, {"FP;FP_ON|", 2}, {"FC;FP|0>1", 2}};
  EXPECT_EQ(c, expected);
}
