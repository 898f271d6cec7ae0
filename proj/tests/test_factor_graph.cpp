#include <filesystem>
#include <set>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace dsgrn;

namespace {

LogicParameter logic_of(std::size_t n_inputs, std::size_t m, std::vector<std::int8_t> sign) {
  return {n_inputs, m, std::move(sign)};
}

std::size_t factorial(std::size_t m) { return m <= 1 ? 1 : m * factorial(m - 1); }

const char* const kSignatures[] = {"1,1,x",   "1,2,x",      "1,3,x",         "2,1,x+y",      "2,1,(x)(y)",
                                   "2,2,x+y", "2,2,(x)(y)", "2,3,x+y",       "3,1,(x)(y+z)", "3,2,(x)(y+z)",
                                   "3,2,x+y+z", "3,1,(x)(y)(z)"};

}  // namespace

TEST(FactorGraph, BandFunctionFromLogic) {
  auto id1 = OrderParameter::identity(1);
  EXPECT_EQ(band_function(logic_of(1, 1, {-1, 1}), id1).band, (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(band_function(logic_of(2, 1, {-1, -1, -1, -1}), id1).band, (std::vector<std::uint8_t>{0, 0, 0, 0}));
  // Above the higher threshold but below the lower one.
  EXPECT_THROW(band_function(logic_of(1, 2, {-1, -1, -1, 1}), OrderParameter::identity(2)), Error);
  try {
    band_function(logic_of(1, 2, {-1, -1, -1, 1}), OrderParameter::identity(2));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThresholdInconsistent);
  }
}

TEST(FactorGraph, LogicRoundTrip) {
  auto g = fixtures::library().get(NodeSignature::parse("2,2,x+y"));
  for (std::size_t i = 0; i < g->size(); ++i) {
    auto v = g->vertex(i);
    auto logic = v.logic();
    EXPECT_EQ(band_function(logic, v.order), v.band);
    EXPECT_EQ(g->index_of(logic, v.order), i);
    EXPECT_EQ(band_from_hex(logic_hex(v.band), 2, 2), v.band);
  }
  EXPECT_THROW(g->index_of(OrderParameter::identity(2), BandFunction{{2, 0, 0, 0}, 2}), Error);
}

TEST(FactorGraph, SizesAndOrderBlocks) {
  const std::pair<const char*, std::size_t> cases[] = {
      {"1,1,x", 3}, {"1,2,x", 12}, {"1,3,x", 60}, {"3,2,(x)(y+z)", 310}, {"2,1,(x)(y)", 6}};
  for (auto [text, size] : cases) EXPECT_EQ(fixtures::library().get(NodeSignature::parse(text))->size(), size) << text;

  for (const char* text : kSignatures) {
    auto g = fixtures::library().get(NodeSignature::parse(text));
    const std::size_t m = g->signature().n_outputs;
    ASSERT_EQ(g->size() % factorial(m), 0u);
    ASSERT_EQ(g->orders().size(), factorial(m));
    // Each order block carries the same band functions (up to rank relabelling).
    const std::size_t k = g->n_bands();
    for (std::size_t p = 0; p < g->orders().size(); ++p)
      for (std::size_t j = 0; j < k; ++j) EXPECT_EQ(g->band(p * k + j), g->bands()[j]);
  }
}

TEST(FactorGraph, Connected) {
  for (const char* text : kSignatures) EXPECT_TRUE(fixtures::library().get(NodeSignature::parse(text))->connected()) << text;
}

TEST(FactorGraph, TwoInputProductAdjacency) {
  auto g = fixtures::library().get(NodeSignature::parse("2,1,(x)(y)"));
  ASSERT_EQ(g->size(), 6u);
  std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}, {4, 5}};
  EXPECT_EQ(g->edges(), expected);
  EXPECT_EQ(g->band(0).band, (std::vector<std::uint8_t>{0, 0, 0, 0}));
  EXPECT_EQ(g->band(5).band, (std::vector<std::uint8_t>{1, 1, 1, 1}));
}

// Every edge is a single-entry change of the logic parameter within an order
// block, or a swap of consecutive thresholds keeping the logic parameter.
TEST(FactorGraph, EdgesAreElementaryMoves) {
  for (const char* text : {"1,3,x", "2,2,(x)(y)", "3,2,(x)(y+z)", "2,3,x+y"}) {
    auto g = fixtures::library().get(NodeSignature::parse(text));
    std::set<std::pair<std::size_t, std::size_t>> edges(g->edges().begin(), g->edges().end());
    for (std::size_t u = 0; u < g->size(); ++u)
      for (std::size_t v = u + 1; v < g->size(); ++v) {
        auto lu = g->vertex(u).logic(), lv = g->vertex(v).logic();
        const auto& ou = g->order(u);
        const auto& ov = g->order(v);
        std::size_t diff = 0;
        for (std::size_t s = 0; s < lu.sign.size(); ++s) diff += lu.sign[s] != lv.sign[s];
        bool flip = ou == ov && diff == 1;
        bool swap = false;
        if (lu == lv && ou != ov) {
          std::size_t mismatches = 0, first = 0;
          for (std::size_t r = 0; r < ou.size(); ++r)
            if (ou.order[r] != ov.order[r]) {
              if (!mismatches) first = r;
              ++mismatches;
            }
          swap = mismatches == 2 && ou.order[first] == ov.order[first + 1] &&
                 ou.order[first + 1] == ov.order[first];
        }
        EXPECT_EQ(edges.count({u, v}) == 1, flip || swap) << text << " " << u << " " << v;
      }
  }
}

TEST(FactorGraph, SearchMatchesEnumeration) {
  for (const char* text : {"2,2,x+y", "2,3,(x)(y)", "3,1,(x)(y+z)", "3,2,x+y+z"}) {
    auto sig = NodeSignature::parse(text);
    auto g = fixtures::library().get(sig);
    EXPECT_EQ(realizable_bands_by_search(sig), g->bands()) << text;
  }
}

TEST(FactorGraph, CacheFileRoundTrip) {
  auto g = fixtures::library().get(NodeSignature::parse("3,2,(x)(y+z)"));
  std::stringstream buffer;
  write_factor_graph(buffer, *g);
  auto back = read_factor_graph(buffer);
  EXPECT_EQ(back.size(), g->size());
  EXPECT_EQ(back.bands(), g->bands());
  EXPECT_EQ(back.edges(), g->edges());
  for (std::size_t i = 0; i < g->size(); i += 17) {
    EXPECT_EQ(back.witness(i), g->witness(i));
    EXPECT_EQ(back.thresholds(i), g->thresholds(i));
  }
  std::stringstream text(buffer.str());
  std::string first;
  std::getline(text, first);
  EXPECT_EQ(first, "3,2,(x)(y+z)");

  std::stringstream truncated(buffer.str().substr(0, buffer.str().size() / 2));
  EXPECT_THROW(read_factor_graph(truncated), Error);
}

TEST(FactorGraph, LibraryPersistsToDisk) {
  auto dir = std::filesystem::temp_directory_path() / ("dsgrn-fg-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  auto sig = NodeSignature::parse("2,2,(x)(y)");
  std::size_t size = 0;
  {
    FactorGraphLibrary lib(dir);
    size = lib.get(sig)->size();
    ASSERT_TRUE(std::filesystem::exists(*lib.path_for(sig.str())));
  }
  FactorGraphLibrary again(dir);
  EXPECT_EQ(again.get(sig)->size(), size);
  // A damaged entry is rebuilt rather than trusted.
  {
    std::ofstream out(*again.path_for(sig.str()), std::ios::trunc);
    out << "garbage\n";
  }
  FactorGraphLibrary third(dir);
  EXPECT_EQ(third.get(sig)->size(), size);
  std::filesystem::remove_all(dir);
}

TEST(FactorGraph, ParallelDecisionIsDeterministic) {
  auto sig = NodeSignature::parse("3,2,x+y+z");
  FactorGraphOptions serial, parallel;
  parallel.workers = 4;
  auto a = build_factor_graph(sig, serial);
  auto b = build_factor_graph(sig, parallel);
  EXPECT_EQ(a.bands(), b.bands());
  EXPECT_EQ(a.edges(), b.edges());
}
