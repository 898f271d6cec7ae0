#include <queue>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace dsgrn;

namespace {

// Nodes whose combinatorial parameters differ.
std::size_t differing_nodes(const CombinatorialParameter& a, const CombinatorialParameter& b) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < a.size(); ++j) n += a.orders[j] != b.orders[j] || a.bands[j] != b.bands[j];
  return n;
}

}  // namespace

TEST(ParameterGraph, Sizes) {
  EXPECT_EQ(fixtures::parameter_graph("repressilator").sizes(), (std::vector<std::size_t>{3, 3, 3}));
  EXPECT_EQ(fixtures::parameter_graph("repressilator").size(), 27u);
  EXPECT_EQ(fixtures::parameter_graph("bistable").sizes(), (std::vector<std::size_t>{6, 12, 3}));
  EXPECT_EQ(fixtures::parameter_graph("bistable").size(), 216u);
  EXPECT_EQ(fixtures::parameter_graph("selfactivator").size(), 3u);
  const auto& p53 = fixtures::parameter_graph("p53");
  EXPECT_EQ(p53.sizes(), (std::vector<std::size_t>{310, 12, 12, 6, 3}));
  EXPECT_EQ(p53.size(), 310u * 12 * 12 * 6 * 3);
}

TEST(ParameterGraph, MixedRadixDigits) {
  const auto& pg = fixtures::parameter_graph("repressilator");
  EXPECT_EQ(pg.digits(0), (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(pg.digits(26), (std::vector<std::size_t>{2, 2, 2}));
  // Node 0 is the least significant digit.
  EXPECT_EQ(pg.digits(1), (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_EQ(pg.digits(3), (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(pg.digits(13), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_THROW(pg.digits(27), Error);
  EXPECT_THROW(pg.index({3, 0, 0}), Error);
}

TEST(ParameterGraph, EncodeDecodeRoundTrip) {
  for (const char* name : {"repressilator", "bistable"}) {
    const auto& pg = fixtures::parameter_graph(name);
    for (ParameterIndex i = 0; i < pg.size(); ++i) {
      EXPECT_EQ(pg.encode(pg.decode(i)), i);
      EXPECT_EQ(pg.index(pg.digits(i)), i);
    }
  }
  const auto& p53 = fixtures::parameter_graph("p53");
  std::mt19937_64 rng(3);
  for (int t = 0; t < 2000; ++t) {
    ParameterIndex i = rng() % p53.size();
    EXPECT_EQ(p53.encode(p53.decode(i)), i);
  }
}

TEST(ParameterGraph, OutOfRange) {
  const auto& pg = fixtures::parameter_graph("repressilator");
  try {
    pg.decode(27);
    FAIL() << "decode accepted an out-of-range index";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(ParameterGraph, SelfActivatorChain) {
  const auto& pg = fixtures::parameter_graph("selfactivator");
  EXPECT_EQ(pg.adjacencies(0), (std::vector<ParameterIndex>{1}));
  EXPECT_EQ(pg.adjacencies(1), (std::vector<ParameterIndex>{0, 2}));
  EXPECT_EQ(pg.adjacencies(2), (std::vector<ParameterIndex>{1}));
}

TEST(ParameterGraph, AdjacencyIsSymmetricAndChangesOneNode) {
  for (const char* name : {"repressilator", "bistable"}) {
    const auto& pg = fixtures::parameter_graph(name);
    for (ParameterIndex i = 0; i < pg.size(); ++i)
      for (ParameterIndex j : pg.adjacencies(i)) {
        auto back = pg.adjacencies(j);
        EXPECT_TRUE(std::binary_search(back.begin(), back.end(), i)) << name << " " << i << " " << j;
        EXPECT_EQ(differing_nodes(pg.decode(i), pg.decode(j)), 1u);
      }
  }
}

TEST(ParameterGraph, AdjacencyMatchesFactorEdges) {
  // Independent construction: i ~ j iff exactly one digit differs and the
  // two digits are joined in that node's factor graph.
  const auto& pg = fixtures::parameter_graph("bistable");
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> fedges;
  for (std::size_t j = 0; j < pg.network().size(); ++j) {
    auto& s = fedges.emplace_back();
    for (auto [a, b] : pg.factor(j).edges()) {
      s.insert({a, b});
      s.insert({b, a});
    }
  }
  for (ParameterIndex u = 0; u < pg.size(); ++u) {
    std::vector<ParameterIndex> expected;
    auto du = pg.digits(u);
    for (ParameterIndex v = 0; v < pg.size(); ++v) {
      auto dv = pg.digits(v);
      std::size_t diff = 0, where = 0;
      for (std::size_t j = 0; j < du.size(); ++j)
        if (du[j] != dv[j]) ++diff, where = j;
      if (diff == 1 && fedges[where].count({du[where], dv[where]})) expected.push_back(v);
    }
    EXPECT_EQ(pg.adjacencies(u), expected) << u;
  }
}

TEST(ParameterGraph, RepressilatorCentreHasSixNeighbours) {
  const auto& pg = fixtures::parameter_graph("repressilator");
  auto adj = pg.adjacencies(13);
  EXPECT_EQ(adj.size(), 6u);
  auto centre = inequalities(pg.network(), pg.decode(13));
  for (auto v : adj) {
    auto other = inequalities(pg.network(), pg.decode(v));
    std::size_t changed = 0;
    for (std::size_t j = 0; j < centre.size(); ++j) changed += centre[j] != other[j];
    EXPECT_EQ(changed, 1u);
  }
}

TEST(ParameterGraph, Connected) {
  for (const char* name : {"repressilator", "bistable"}) {
    const auto& pg = fixtures::parameter_graph(name);
    std::vector<bool> seen(pg.size(), false);
    std::queue<ParameterIndex> todo;
    todo.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!todo.empty()) {
      auto i = todo.front();
      todo.pop();
      for (auto j : pg.adjacencies(i))
        if (!seen[j]) {
          seen[j] = true;
          ++count;
          todo.push(j);
        }
    }
    EXPECT_EQ(count, pg.size()) << name;
  }
}
