#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "dsgrn/error.hpp"
#include "dsgrn/network.hpp"
#include "dsgrn/parameter_graph.hpp"
#include "dsgrn/rational.hpp"

namespace dsgrn {

/// Numeric parameters of a switching system. Edge i -> j carries
/// l_{j,i}, u_{j,i} (stored at node j, source position k) and theta_{j,i}
/// (stored at node i, target position).
template <class T>
struct ConcreteParameter {
  std::vector<T> gamma;
  std::vector<std::vector<T>> low;
  std::vector<std::vector<T>> high;
  std::vector<std::vector<T>> theta;

  static ConcreteParameter uniform(const RegulatoryNetwork& net, T l, T u, T th, T g = T(1)) {
    ConcreteParameter z;
    for (const auto& n : net.nodes()) {
      z.gamma.push_back(g);
      z.low.emplace_back(n.n_inputs(), l);
      z.high.emplace_back(n.n_inputs(), u);
      z.theta.emplace_back(n.n_outputs(), th);
    }
    return z;
  }

  struct EdgeRef {
    T& l;
    T& u;
    T& theta;
  };

  EdgeRef edge(const RegulatoryNetwork& net, std::size_t source, std::size_t target) {
    auto k = net.node(target).source_position(source);
    auto tp = net.node(source).target_position(target);
    if (!k || !tp) fail(ErrorCode::InvalidArgument, "no such edge");
    return {low[target][*k], high[target][*k], theta[source][*tp]};
  }

  EdgeRef edge(const RegulatoryNetwork& net, std::string_view source, std::string_view target) {
    auto s = net.find(source);
    auto t = net.find(target);
    if (!s || !t) fail(ErrorCode::UnknownIdentifier, "unknown node in edge " + std::string(source) + "->" + std::string(target));
    return edge(net, *s, *t);
  }
};

template <class To, class From>
ConcreteParameter<To> convert(const ConcreteParameter<From>& z) {
  auto cv = [](const From& v) {
    if constexpr (std::is_same_v<From, Rational> && std::is_same_v<To, double>) return to_double(v);
    else return To(v);
  };
  ConcreteParameter<To> out;
  for (const auto& g : z.gamma) out.gamma.push_back(cv(g));
  for (auto [src, dst] : {std::pair{&z.low, &out.low}, {&z.high, &out.high}, {&z.theta, &out.theta}}) {
    for (const auto& row : *src) {
      dst->emplace_back();
      for (const auto& v : row) dst->back().push_back(cv(v));
    }
  }
  return out;
}

/// Combinatorial parameter of a regular concrete parameter: the threshold
/// order of each node and the band of every input combination.
template <class T>
CombinatorialParameter omega(const RegulatoryNetwork& net, const ConcreteParameter<T>& z) {
  CombinatorialParameter phi;
  const std::size_t n = net.size();
  if (z.gamma.size() != n || z.low.size() != n || z.high.size() != n || z.theta.size() != n)
    fail(ErrorCode::ArityMismatch, "concrete parameter does not match the network");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& th = z.theta[i];
    if (th.size() != net.node(i).n_outputs()) fail(ErrorCode::ArityMismatch, "threshold count mismatch");
    if (!(z.gamma[i] > 0)) fail(ErrorCode::NotRegular, "gamma must be positive");
    OrderParameter o = OrderParameter::identity(th.size());
    std::stable_sort(o.order.begin(), o.order.end(), [&](auto a, auto b) { return th[a] < th[b]; });
    for (std::size_t r = 0; r < th.size(); ++r) {
      if (!(th[o.order[r]] > 0)) fail(ErrorCode::NotRegular, "thresholds must be positive");
      if (r > 0 && !(th[o.order[r - 1]] < th[o.order[r]]))
        fail(ErrorCode::NotRegular, "tied thresholds at node " + net.node(i).name);
    }
    phi.orders.push_back(std::move(o));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto& node = net.node(j);
    if (z.low[j].size() != node.n_inputs() || z.high[j].size() != node.n_inputs())
      fail(ErrorCode::ArityMismatch, "input count mismatch at node " + node.name);
    for (std::size_t k = 0; k < node.n_inputs(); ++k)
      if (!(z.low[j][k] > 0) || !(z.low[j][k] < z.high[j][k]))
        fail(ErrorCode::NotRegular, "need 0 < l < u at node " + node.name);
    BandFunction b{std::vector<std::uint8_t>(node.n_input_combinations(), 0), node.n_outputs()};
    for (InputCombination a = 0; a < b.band.size(); ++a) {
      auto v = valuation<T>(node, a, z.low[j], z.high[j]);
      const T value = logic_eval<T>(node, std::span<const T>(v));
      std::size_t count = 0;
      for (std::size_t tp = 0; tp < node.n_outputs(); ++tp) {
        const T level = z.gamma[j] * z.theta[j][tp];
        if (value == level) fail(ErrorCode::NotRegular, "output equals a threshold at node " + node.name);
        if (level < value) ++count;
      }
      b.band[a] = static_cast<std::uint8_t>(count);
    }
    phi.bands.push_back(std::move(b));
  }
  return phi;
}

/// Regular rational parameter inside the region of a parameter-graph
/// vertex, assembled from the stored factor witnesses with gamma = 1.
inline ConcreteParameter<Rational> sample_parameter(const ParameterGraph& pg, ParameterIndex idx) {
  const auto& net = pg.network();
  auto digits = pg.digits(idx);
  ConcreteParameter<Rational> z;
  for (std::size_t j = 0; j < net.size(); ++j) {
    const auto& fg = pg.factor(j);
    const auto& w = fg.witness(digits[j]);
    if (!w) fail(ErrorCode::UnknownFactorVertex, "factor vertex has no witness");
    z.gamma.emplace_back(1);
    z.low.push_back(w->low);
    z.high.push_back(w->high);
    z.theta.push_back(fg.thresholds(digits[j]));
  }
  if (omega(net, z) != pg.decode(idx))
    fail(ErrorCode::NotRegular, "sampled parameter does not reproduce its vertex");
  return z;
}

inline ConcreteParameter<Rational> sample_parameter(const ParameterGraph& pg, const CombinatorialParameter& phi) {
  return sample_parameter(pg, pg.encode(phi));
}

enum class Notation { Text, Machine };

namespace detail {

inline std::string symbol(Notation style, char kind, std::size_t a, std::size_t b) {
  if (style == Notation::Text)
    return (kind == 't' ? std::string("θ") : std::string(1, kind)) + "_{" + std::to_string(a) + "," +
           std::to_string(b) + "}";
  return std::string(1, static_cast<char>(std::toupper(kind))) + "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}

inline std::string threshold_symbol(Notation style, std::size_t node, std::size_t target) {
  if (style == Notation::Text)
    return "γ_" + std::to_string(node) + "θ_{" + std::to_string(target) + "," + std::to_string(node) + "}";
  return "G[" + std::to_string(node) + "]*T[" + std::to_string(target) + "," + std::to_string(node) + "]";
}

inline std::string combination_expression(const NodeRecord& node, std::size_t j, InputCombination a,
                                          Notation style) {
  const bool product = node.logic.factors.size() > 1;
  std::string out;
  for (std::size_t f = 0; f < node.logic.factors.size(); ++f) {
    const auto& factor = node.logic.factors[f];
    if (f > 0 && style == Notation::Machine) out += '*';
    const bool wrap = product && factor.size() > 1;
    if (wrap) out += '(';
    for (std::size_t m = 0; m < factor.size(); ++m) {
      if (m) out += style == Notation::Text ? " + " : "+";
      const std::size_t k = factor[m];
      out += symbol(style, is_on(a, k) ? 'u' : 'l', j + 1, node.sources[k].node + 1);
    }
    if (wrap) out += ')';
  }
  return out;
}

inline std::string group(std::vector<std::string> items, Notation style) {
  std::sort(items.begin(), items.end());
  if (items.size() == 1) return items[0];
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? (style == Notation::Text ? ", " : ",") : "") + items[i];
  return out + "}";
}

/// Members of one band as layers of the subset order, when those layers are
/// totally ordered against each other; otherwise a single group.
inline std::vector<std::vector<InputCombination>> band_layers(const std::vector<InputCombination>& members) {
  auto below = [](InputCombination x, InputCombination y) { return x != y && (x & y) == x; };
  std::vector<std::size_t> depth(members.size(), 0);
  for (std::size_t i = 0; i < members.size(); ++i)  // members ascend numerically, so predecessors come first
    for (std::size_t p = 0; p < i; ++p)
      if (below(members[p], members[i])) depth[i] = std::max(depth[i], depth[p] + 1);
  const std::size_t n_layers = members.empty() ? 0 : *std::max_element(depth.begin(), depth.end()) + 1;
  std::vector<std::vector<InputCombination>> layers(n_layers);
  for (std::size_t i = 0; i < members.size(); ++i) layers[depth[i]].push_back(members[i]);
  for (std::size_t d = 0; d + 1 < n_layers; ++d)
    for (auto x : layers[d])
      for (auto y : layers[d + 1])
        if (!below(x, y)) return {members};
  return layers;
}

}  // namespace detail

/// One chain per node: band-0 expressions < first threshold < band-1
/// expressions < ..., with unordered expressions grouped in braces.
inline std::vector<std::string> inequalities(const RegulatoryNetwork& net, const CombinatorialParameter& phi,
                                             Notation style = Notation::Text) {
  std::vector<std::string> chains;
  for (std::size_t j = 0; j < net.size(); ++j) {
    const auto& node = net.node(j);
    const auto& b = phi.bands[j];
    const auto& o = phi.orders[j];
    std::vector<std::vector<InputCombination>> bands(node.n_outputs() + 1);
    for (InputCombination a = 0; a < b.band.size(); ++a) bands[b[a]].push_back(a);
    std::vector<std::string> links;
    for (std::size_t level = 0; level <= node.n_outputs(); ++level) {
      if (level > 0)
        links.push_back(detail::threshold_symbol(style, j + 1, node.targets[o.order[level - 1]] + 1));
      for (const auto& layer : detail::band_layers(bands[level])) {
        std::vector<std::string> items;
        for (auto a : layer) items.push_back(detail::combination_expression(node, j, a, style));
        links.push_back(detail::group(std::move(items), style));
      }
    }
    std::string chain;
    for (std::size_t i = 0; i < links.size(); ++i) chain += (i ? " < " : "") + links[i];
    chains.push_back(std::move(chain));
  }
  return chains;
}

/// Plain listing of a concrete parameter, one "name=value" per line.
template <class T>
std::string render_parameter(const RegulatoryNetwork& net, const ConcreteParameter<T>& z,
                             Notation style = Notation::Machine) {
  std::ostringstream out;
  auto value = [](const T& v) {
    if constexpr (std::is_same_v<T, Rational>) return to_string(v);
    else {
      std::ostringstream s;
      s << std::setprecision(17) << v;
      return s.str();
    }
  };
  for (std::size_t j = 0; j < net.size(); ++j) {
    out << (style == Notation::Machine ? "G[" + std::to_string(j + 1) + "]" : "γ_" + std::to_string(j + 1)) << '='
        << value(z.gamma[j]) << '\n';
  }
  for (std::size_t j = 0; j < net.size(); ++j) {
    const auto& node = net.node(j);
    for (std::size_t k = 0; k < node.n_inputs(); ++k) {
      const std::size_t i = node.sources[k].node;
      out << detail::symbol(style, 'l', j + 1, i + 1) << '=' << value(z.low[j][k]) << '\n';
      out << detail::symbol(style, 'u', j + 1, i + 1) << '=' << value(z.high[j][k]) << '\n';
      out << detail::symbol(style, 't', j + 1, i + 1) << '='
          << value(z.theta[i][*net.node(i).target_position(j)]) << '\n';
    }
  }
  return out.str();
}

}  // namespace dsgrn
