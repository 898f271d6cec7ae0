#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsgrn/error.hpp"

namespace dsgrn {

enum class Sign { Activation, Repression };

struct Source {
  std::size_t node = 0;
  Sign sign = Sign::Activation;

  friend bool operator==(const Source&, const Source&) = default;
};

/// A product of sums over the positions of a node's source list. Factors are
/// sorted by their smallest member and members are sorted ascending.
struct ProductOfSums {
  std::vector<std::vector<std::size_t>> factors;

  std::size_t arity() const {
    std::size_t n = 0;
    for (const auto& f : factors) n += f.size();
    return n;
  }

  friend bool operator==(const ProductOfSums&, const ProductOfSums&) = default;
};

/// Input combination of a node: bit k set means source k reads "on".
using InputCombination = std::uint32_t;

inline bool is_on(InputCombination a, std::size_t k) { return ((a >> k) & 1u) != 0; }

struct NodeRecord {
  std::string name;
  std::vector<Source> sources;       // ascending source node index
  std::vector<std::size_t> targets;  // ascending target node index
  ProductOfSums logic;

  std::size_t n_inputs() const { return sources.size(); }
  std::size_t n_outputs() const { return targets.size(); }
  std::size_t n_input_combinations() const { return std::size_t{1} << sources.size(); }

  /// Position of `source_node` in the source list, if present.
  std::optional<std::size_t> source_position(std::size_t source_node) const {
    for (std::size_t k = 0; k < sources.size(); ++k)
      if (sources[k].node == source_node) return k;
    return std::nullopt;
  }

  /// Position of `target_node` in the target list, if present.
  std::optional<std::size_t> target_position(std::size_t target_node) const {
    auto it = std::lower_bound(targets.begin(), targets.end(), target_node);
    if (it == targets.end() || *it != target_node) return std::nullopt;
    return static_cast<std::size_t>(it - targets.begin());
  }

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

/// Product over factors of the sum of member values.
template <class T>
T logic_eval(const ProductOfSums& logic, std::span<const T> values) {
  T product(1);
  for (const auto& factor : logic.factors) {
    T sum(0);
    for (std::size_t k : factor) sum += values[k];
    product *= sum;
  }
  return product;
}

template <class T>
T logic_eval(const NodeRecord& node, std::span<const T> values) {
  if (values.size() != node.sources.size())
    fail(ErrorCode::ArityMismatch, "node " + node.name + " expects " +
                                       std::to_string(node.sources.size()) + " values, got " +
                                       std::to_string(values.size()));
  return logic_eval(node.logic, values);
}

/// Maps each source to its low or high value according to the input combination.
template <class T>
std::vector<T> valuation(const NodeRecord& node, InputCombination a, std::span<const T> lows,
                         std::span<const T> highs) {
  if (lows.size() != node.sources.size() || highs.size() != node.sources.size())
    fail(ErrorCode::ArityMismatch, "valuation arity mismatch for node " + node.name);
  std::vector<T> out;
  out.reserve(lows.size());
  for (std::size_t k = 0; k < lows.size(); ++k) out.push_back(is_on(a, k) ? highs[k] : lows[k]);
  return out;
}

class RegulatoryNetwork {
 public:
  RegulatoryNetwork() = default;

  std::size_t size() const { return nodes_.size(); }
  const NodeRecord& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<NodeRecord>& nodes() const { return nodes_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& n : nodes_) e += n.sources.size();
    return e;
  }

  /// Sign of the edge source -> target; the edge must exist.
  Sign edge_sign(std::size_t source, std::size_t target) const {
    auto k = nodes_.at(target).source_position(source);
    if (!k) fail(ErrorCode::InvalidArgument, "no edge " + std::to_string(source) + " -> " +
                                                 std::to_string(target));
    return nodes_[target].sources[*k].sign;
  }

  /// Canonical text form; parse_network(render()) reproduces the network.
  std::string render() const {
    std::ostringstream out;
    for (const auto& n : nodes_) {
      out << n.name << " : ";
      const bool product = n.logic.factors.size() > 1;
      for (const auto& factor : n.logic.factors) {
        if (product) out << '(';
        for (std::size_t j = 0; j < factor.size(); ++j) {
          if (j) out << " + ";
          const Source& s = n.sources[factor[j]];
          if (s.sign == Sign::Repression) out << '~';
          out << nodes_[s.node].name;
        }
        if (product) out << ')';
      }
      out << '\n';
    }
    return out.str();
  }

  friend bool operator==(const RegulatoryNetwork&, const RegulatoryNetwork&) = default;

  friend RegulatoryNetwork parse_network(std::string_view text);

 private:
  std::vector<NodeRecord> nodes_;
};

namespace detail {

struct Token {
  enum Kind { Name, LParen, RParen, Plus, Star, Tilde, End } kind;
  std::string text;
};

class ExprLexer {
 public:
  ExprLexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) return {Token::End, ""};
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      return {Token::Name, std::string(text_.substr(start, pos_ - start))};
    }
    ++pos_;
    switch (c) {
      case '(': return {Token::LParen, "("};
      case ')': return {Token::RParen, ")"};
      case '+': return {Token::Plus, "+"};
      case '*': return {Token::Star, "*"};
      case '~': return {Token::Tilde, "~"};
      default:
        fail(ErrorCode::SyntaxError,
             "line " + std::to_string(line_) + ": unexpected character '" + std::string(1, c) + "'");
    }
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

struct Atom {
  std::string name;
  bool repressed = false;
};

class ExprParser {
 public:
  ExprParser(std::string_view text, std::size_t line) : lexer_(text, line), line_(line) {
    advance();
  }

  /// Returns the factors of the product of sums, each a list of atoms.
  std::vector<std::vector<Atom>> parse() {
    std::vector<std::vector<std::vector<Atom>>> terms;
    terms.push_back(parse_term());
    while (tok_.kind == Token::Plus) {
      advance();
      terms.push_back(parse_term());
    }
    expect(Token::End, "end of expression");
    if (terms.size() == 1) return terms.front();
    // A top-level sum must be a sum of plain atoms.
    std::vector<Atom> sum;
    for (const auto& term : terms) {
      if (term.size() != 1 || term.front().size() != 1)
        error("sum of products is not a product of sums");
      sum.push_back(term.front().front());
    }
    return {sum};
  }

 private:
  std::vector<std::vector<Atom>> parse_term() {
    std::vector<std::vector<Atom>> factors;
    factors.push_back(parse_factor());
    for (;;) {
      if (tok_.kind == Token::Star) {
        advance();
        factors.push_back(parse_factor());
      } else if (tok_.kind == Token::LParen || tok_.kind == Token::Name ||
                 tok_.kind == Token::Tilde) {
        factors.push_back(parse_factor());
      } else {
        return factors;
      }
    }
  }

  std::vector<Atom> parse_factor() {
    if (tok_.kind != Token::LParen) return {parse_atom()};
    advance();
    std::vector<Atom> sum;
    sum.push_back(parse_atom());
    while (tok_.kind == Token::Plus) {
      advance();
      sum.push_back(parse_atom());
    }
    expect(Token::RParen, "')'");
    return sum;
  }

  Atom parse_atom() {
    Atom a;
    if (tok_.kind == Token::Tilde) {
      a.repressed = true;
      advance();
    }
    if (tok_.kind != Token::Name) error("expected a node name");
    a.name = tok_.text;
    advance();
    return a;
  }

  void expect(Token::Kind kind, const char* what) {
    if (tok_.kind != kind) error(std::string("expected ") + what);
    advance();
  }

  void advance() { tok_ = lexer_.next(); }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::SyntaxError, "line " + std::to_string(line_) + ": " + msg);
  }

  ExprLexer lexer_;
  std::size_t line_;
  Token tok_{Token::End, ""};
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace detail

/// Parses the line-oriented network format "name : expr" and validates it.
inline RegulatoryNetwork parse_network(std::string_view text) {
  struct Line {
    std::string name;
    std::string expr;
    std::size_t number;
  };
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    start = end + 1;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    auto colon = raw.find(':');
    if (colon == std::string_view::npos)
      fail(ErrorCode::SyntaxError, "line " + std::to_string(number) + ": missing ':'");
    std::string_view name = detail::trim(raw.substr(0, colon));
    if (!detail::is_identifier(name))
      fail(ErrorCode::SyntaxError, "line " + std::to_string(number) + ": bad node name '" +
                                       std::string(name) + "'");
    lines.push_back({std::string(name), std::string(raw.substr(colon + 1)), number});
  }

  if (lines.empty()) fail(ErrorCode::SyntaxError, "network has no nodes");

  RegulatoryNetwork net;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& l : lines) {
    if (index.count(l.name))
      fail(ErrorCode::SyntaxError,
           "line " + std::to_string(l.number) + ": node '" + l.name + "' declared twice");
    index.emplace(l.name, index.size());
  }

  std::vector<NodeRecord>& nodes = net.nodes_;
  nodes.resize(lines.size());
  for (std::size_t j = 0; j < lines.size(); ++j) {
    const Line& l = lines[j];
    NodeRecord& rec = nodes[j];
    rec.name = l.name;
    if (detail::trim(l.expr).empty())
      fail(ErrorCode::DanglingNode, "node '" + l.name + "' has no inputs");
    auto factors = detail::ExprParser(l.expr, l.number).parse();

    std::map<std::size_t, Sign> seen;
    std::vector<std::vector<std::size_t>> factor_nodes;
    for (const auto& f : factors) {
      std::vector<std::size_t> members;
      for (const auto& atom : f) {
        auto it = index.find(atom.name);
        if (it == index.end())
          fail(ErrorCode::UnknownIdentifier,
               "line " + std::to_string(l.number) + ": unknown node '" + atom.name + "'");
        std::size_t src = it->second;
        Sign sign = atom.repressed ? Sign::Repression : Sign::Activation;
        if (src == j && sign == Sign::Repression)
          fail(ErrorCode::RepressingSelfEdge, "node '" + l.name + "' represses itself");
        if (auto prev = seen.find(src); prev != seen.end()) {
          if (prev->second != sign)
            fail(ErrorCode::DuplicateEdge, "node '" + l.name + "' has both an activating and a "
                                                               "repressing edge from '" +
                                               atom.name + "'");
          fail(ErrorCode::LogicSourceMismatch,
               "node '" + l.name + "' uses source '" + atom.name + "' more than once");
        }
        seen.emplace(src, sign);
        members.push_back(src);
      }
      factor_nodes.push_back(members);
    }
    for (const auto& [src, sign] : seen) rec.sources.push_back({src, sign});
    for (const auto& members : factor_nodes) {
      std::vector<std::size_t> positions;
      for (std::size_t src : members) positions.push_back(*rec.source_position(src));
      std::sort(positions.begin(), positions.end());
      rec.logic.factors.push_back(positions);
    }
    std::sort(rec.logic.factors.begin(), rec.logic.factors.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }
  for (std::size_t j = 0; j < nodes.size(); ++j)
    for (const auto& s : nodes[j].sources) nodes[s.node].targets.push_back(j);
  for (auto& n : nodes) {
    std::sort(n.targets.begin(), n.targets.end());
    if (n.targets.empty()) fail(ErrorCode::DanglingNode, "node '" + n.name + "' has no outputs");
  }
  return net;
}

}  // namespace dsgrn
