#pragma once

#include <cctype>
#include <charconv>
#include <tuple>
#include <string>
#include <string_view>
#include <vector>

#include "dsgrn/error.hpp"
#include "dsgrn/morse.hpp"

namespace dsgrn {

enum class Comparison { Eq, Ne, Lt, Le, Gt, Ge };

inline bool compare(std::size_t lhs, Comparison op, std::size_t rhs) {
  switch (op) {
    case Comparison::Eq: return lhs == rhs;
    case Comparison::Ne: return lhs != rhs;
    case Comparison::Lt: return lhs < rhs;
    case Comparison::Le: return lhs <= rhs;
    case Comparison::Gt: return lhs > rhs;
    case Comparison::Ge: return lhs >= rhs;
  }
  return false;
}

/// One conjunct of a query.
struct Predicate {
  enum class Kind { HasAnnotation, NodeCount, MinimalCount };
  enum class Where { Any, Minimal, Maximal };
  Kind kind = Kind::HasAnnotation;
  Where where = Where::Any;
  std::string annotation;  // exact for HasAnnotation, prefix for MinimalCount
  Comparison op = Comparison::Eq;
  std::size_t value = 0;

  bool matches(const CanonicalMorseGraph& g) const {
    switch (kind) {
      case Kind::HasAnnotation: {
        std::vector<std::size_t> nodes;
        if (where == Where::Minimal) nodes = g.minimal();
        else if (where == Where::Maximal) nodes = g.maximal();
        else
          for (std::size_t i = 0; i < g.annotations.size(); ++i) nodes.push_back(i);
        for (std::size_t i : nodes)
          if (g.annotations[i] == annotation) return true;
        return false;
      }
      case Kind::NodeCount:
        return compare(g.annotations.size(), op, value);
      case Kind::MinimalCount: {
        std::size_t count = 0;
        for (std::size_t i : g.minimal())
          if (g.annotations[i].starts_with(annotation)) ++count;
        return compare(count, op, value);
      }
    }
    return false;
  }
};

struct QuerySpec {
  std::vector<Predicate> clauses;

  bool matches(const CanonicalMorseGraph& g) const {
    for (const auto& c : clauses)
      if (!c.matches(g)) return false;
    return true;
  }
};

namespace detail {

inline std::pair<Comparison, std::size_t> parse_comparison(std::string_view s, std::string_view clause) {
  auto bad = [&] { fail(ErrorCode::MalformedQuery, "bad comparison in '" + std::string(clause) + "'"); };
  Comparison op;
  std::size_t len = 2;
  if (s.starts_with("<=")) op = Comparison::Le;
  else if (s.starts_with(">=")) op = Comparison::Ge;
  else if (s.starts_with("!=")) op = Comparison::Ne;
  else if (s.starts_with("==")) op = Comparison::Eq;
  else {
    len = 1;
    if (s.starts_with("<")) op = Comparison::Lt;
    else if (s.starts_with(">")) op = Comparison::Gt;
    else if (s.starts_with("=")) op = Comparison::Eq;
    else bad();
  }
  s.remove_prefix(len);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad();
  return {op, value};
}

}  // namespace detail

/// Space-separated conjunction of clauses; "AND" between clauses is optional.
///   minimal:<ann>  maximal:<ann>  any:<ann>
///   nodes<op><k>   minimal-count(<ann-prefix>)<op><k>
/// where <op> is one of = == != < <= > >=.
inline QuerySpec parse_query(std::string_view text) {
  QuerySpec q;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view clause = text.substr(i, j - i);
    i = j;
    if (clause.empty() || clause == "AND" || clause == "and" || clause == "&&") continue;

    Predicate p;
    if (auto colon = clause.find(':'); colon != std::string_view::npos) {
      std::string_view where = clause.substr(0, colon);
      p.kind = Predicate::Kind::HasAnnotation;
      if (where == "minimal") p.where = Predicate::Where::Minimal;
      else if (where == "maximal") p.where = Predicate::Where::Maximal;
      else if (where == "any") p.where = Predicate::Where::Any;
      else fail(ErrorCode::MalformedQuery, "unknown clause '" + std::string(clause) + "'");
      p.annotation = std::string(clause.substr(colon + 1));
      if (p.annotation.empty()) fail(ErrorCode::MalformedQuery, "missing annotation in '" + std::string(clause) + "'");
    } else if (clause.starts_with("nodes")) {
      p.kind = Predicate::Kind::NodeCount;
      std::tie(p.op, p.value) = detail::parse_comparison(clause.substr(5), clause);
    } else if (clause.starts_with("minimal-count(")) {
      auto close = clause.find(')');
      if (close == std::string_view::npos) fail(ErrorCode::MalformedQuery, "unclosed '(' in '" + std::string(clause) + "'");
      p.kind = Predicate::Kind::MinimalCount;
      p.annotation = std::string(clause.substr(14, close - 14));
      std::tie(p.op, p.value) = detail::parse_comparison(clause.substr(close + 1), clause);
    } else {
      fail(ErrorCode::MalformedQuery, "unknown clause '" + std::string(clause) + "'");
    }
    q.clauses.push_back(std::move(p));
  }
  if (q.clauses.empty()) fail(ErrorCode::MalformedQuery, "empty query");
  return q;
}

}  // namespace dsgrn
