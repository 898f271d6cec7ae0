#include <random>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace dsgrn;

namespace {

ErrorCode parse_error(std::string_view text) {
  try {
    parse_network(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed without error: " << text;
  return ErrorCode::InvalidArgument;
}

NodeRecord node_with(std::string_view logic_text, std::size_t inputs) {
  // Any network will do; only the node's logic matters.
  std::string text = "a : " + std::string(logic_text) + "\n";
  const char* names[] = {"a", "b", "c"};
  for (std::size_t k = 1; k < inputs; ++k) text += std::string(names[k]) + " : a\n";
  return parse_network(text).node(0);
}

}  // namespace

TEST(Network, CyclicRepression) {
  auto net = parse_network("x1 : ~x3\nx2 : ~x1\nx3 : ~x2");
  ASSERT_EQ(net.size(), 3u);
  EXPECT_EQ(net.edge_count(), 3u);
  EXPECT_EQ(net.node(0).sources, (std::vector<Source>{{2, Sign::Repression}}));
  EXPECT_EQ(net.node(0).targets, (std::vector<std::size_t>{1}));
  EXPECT_EQ(net.edge_sign(0, 1), Sign::Repression);
}

TEST(Network, SelfActivator) {
  auto net = parse_network("x : x");
  ASSERT_EQ(net.size(), 1u);
  EXPECT_EQ(net.node(0).sources, (std::vector<Source>{{0, Sign::Activation}}));
  EXPECT_EQ(net.node(0).targets, (std::vector<std::size_t>{0}));
}

TEST(Network, Rejections) {
  EXPECT_EQ(parse_error("x : ~x"), ErrorCode::RepressingSelfEdge);
  EXPECT_EQ(parse_error("x : y\ny : x\nz : x"), ErrorCode::DanglingNode);  // z has no target
  EXPECT_EQ(parse_error("x : y + w\ny : x"), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(parse_error("x : y + y\ny : x"), ErrorCode::LogicSourceMismatch);
  EXPECT_EQ(parse_error("x : (y)(~y)\ny : x"), ErrorCode::DuplicateEdge);
  EXPECT_EQ(parse_error("x : (y + \ny : x"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("x y\ny : x"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("x : y\nx : y\ny : x"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error(""), ErrorCode::SyntaxError);
}

TEST(Network, AcceptedForms) {
  auto net = parse_network("# comment\nx : (y+z)(~w)\ny : x\nz : x + y\nw : (~y)(~z)\n");
  EXPECT_EQ(net.node(0).logic.factors.size(), 2u);
  EXPECT_EQ(net.node(2).logic.factors.size(), 1u);
  EXPECT_EQ(net.node(3).logic.factors.size(), 2u);
  EXPECT_EQ(net.node(0).sources.size(), 3u);
  // Sources are sorted by node index regardless of how the logic is written.
  EXPECT_EQ(net.node(0).sources[0].node, 1u);
  EXPECT_EQ(net.node(0).sources[2].node, 3u);
  EXPECT_EQ(net.node(0).sources[2].sign, Sign::Repression);
  EXPECT_EQ(parse_network("x:y*z\ny:x\nz:x").node(0).logic.factors.size(), 2u);
}

TEST(Network, LogicEvaluation) {
  auto xyz_sum = node_with("(a)(b + c)", 3);
  std::vector<double> v{2, 1, 3};
  EXPECT_DOUBLE_EQ(logic_eval<double>(xyz_sum, v), 8.0);
  auto sum = node_with("a + b", 2);
  std::vector<double> ones{1, 1};
  EXPECT_DOUBLE_EQ(logic_eval<double>(sum, ones), 2.0);
  auto prod = node_with("a b c", 3);
  std::vector<double> w{2, 3, 5};
  EXPECT_DOUBLE_EQ(logic_eval<double>(prod, w), 30.0);
  std::vector<double> short_values{1};
  EXPECT_THROW(logic_eval<double>(sum, short_values), Error);
}

TEST(Network, Valuation) {
  auto node = node_with("a + b", 2);
  std::vector<int> lows{1, 1}, highs{3, 5};
  EXPECT_EQ(valuation<int>(node, 0, lows, highs), lows);
  EXPECT_EQ(valuation<int>(node, 3, lows, highs), highs);
  EXPECT_EQ(valuation<int>(node, 1, lows, highs), (std::vector<int>{3, 1}));
}

TEST(Network, RenderRoundTrip) {
  for (const char* name : {"repressilator", "bistable", "p53", "selfactivator"}) {
    auto net = fixtures::network(name);
    EXPECT_EQ(parse_network(net.render()), net) << name;
  }
}

TEST(Network, RandomRoundTripAndMonotoneLogic) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 4;
    std::string text;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> srcs;
      for (std::size_t i = 0; i < n; ++i)
        if (i == (j + 1) % n || rng() % 3 == 0) srcs.push_back(i);
      std::shuffle(srcs.begin(), srcs.end(), rng);
      text += "v" + std::to_string(j) + " : ";
      for (std::size_t k = 0; k < srcs.size(); ++k) {
        bool repress = srcs[k] != j && rng() % 2;
        text += (k == 0 ? "(" : (rng() % 2 ? ")(" : " + "));
        text += (repress ? "~v" : "v") + std::to_string(srcs[k]);
      }
      text += ")\n";
    }
    auto net = parse_network(text);
    ASSERT_EQ(parse_network(net.render()), net) << text;

    for (const auto& node : net.nodes()) {
      std::uniform_real_distribution<double> u(0.1, 5.0);
      std::vector<double> v(node.n_inputs());
      for (auto& x : v) x = u(rng);
      const double base = logic_eval<double>(node, v);
      for (std::size_t k = 0; k < v.size(); ++k) {
        auto bumped = v;
        bumped[k] += 0.5;
        EXPECT_GT(logic_eval<double>(node, bumped), base);
      }
    }
  }
}
