#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dsgrn/error.hpp"
#include "dsgrn/factor_graph.hpp"
#include "dsgrn/network.hpp"

namespace dsgrn {

using ParameterIndex = std::uint64_t;

/// One realizable combinatorial parameter per node.
struct CombinatorialParameter {
  std::vector<OrderParameter> orders;
  std::vector<BandFunction> bands;

  std::size_t size() const { return orders.size(); }
  LogicParameter logic(std::size_t node) const { return logic_parameter(bands[node], orders[node]); }

  friend bool operator==(const CombinatorialParameter&, const CombinatorialParameter&) = default;
};

/// Product of the node factor graphs, addressed by a mixed-radix index with
/// node 0 as the least significant digit.
class ParameterGraph {
 public:
  ParameterGraph(RegulatoryNetwork net, std::vector<std::shared_ptr<const FactorGraph>> factors)
      : net_(std::move(net)), factors_(std::move(factors)) {
    total_ = 1;
    for (const auto& f : factors_) {
      sizes_.push_back(f->size());
      total_ *= f->size();
    }
  }

  const RegulatoryNetwork& network() const { return net_; }
  const FactorGraph& factor(std::size_t node) const { return *factors_.at(node); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  ParameterIndex size() const { return total_; }

  std::vector<std::size_t> digits(ParameterIndex idx) const {
    if (idx >= total_) fail(ErrorCode::IndexOutOfRange, "parameter index " + std::to_string(idx) +
                                                            " out of range");
    std::vector<std::size_t> out(sizes_.size());
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
      out[j] = static_cast<std::size_t>(idx % sizes_[j]);
      idx /= sizes_[j];
    }
    return out;
  }

  ParameterIndex index(const std::vector<std::size_t>& digits) const {
    if (digits.size() != sizes_.size())
      fail(ErrorCode::IndexOutOfRange, "wrong number of digits");
    ParameterIndex idx = 0;
    for (std::size_t j = digits.size(); j-- > 0;) {
      if (digits[j] >= sizes_[j]) fail(ErrorCode::IndexOutOfRange, "digit out of range");
      idx = idx * sizes_[j] + digits[j];
    }
    return idx;
  }

  CombinatorialParameter decode(ParameterIndex idx) const {
    CombinatorialParameter phi;
    auto d = digits(idx);
    for (std::size_t j = 0; j < d.size(); ++j) {
      phi.orders.push_back(factors_[j]->order(d[j]));
      phi.bands.push_back(factors_[j]->band(d[j]));
    }
    return phi;
  }

  ParameterIndex encode(const CombinatorialParameter& phi) const {
    if (phi.size() != factors_.size())
      fail(ErrorCode::UnknownFactorVertex, "parameter has the wrong number of nodes");
    std::vector<std::size_t> d;
    for (std::size_t j = 0; j < factors_.size(); ++j)
      d.push_back(factors_[j]->index_of(phi.orders[j], phi.bands[j]));
    return index(d);
  }

  /// Indices that differ in one digit, by an edge of that node's factor graph.
  std::vector<ParameterIndex> adjacencies(ParameterIndex idx) const {
    auto d = digits(idx);
    std::vector<ParameterIndex> out;
    ParameterIndex place = 1;
    for (std::size_t j = 0; j < d.size(); ++j) {
      for (std::size_t w : factors_[j]->neighbors(d[j]))
        out.push_back(idx - place * d[j] + place * w);
      place *= sizes_[j];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  RegulatoryNetwork net_;
  std::vector<std::shared_ptr<const FactorGraph>> factors_;
  std::vector<std::size_t> sizes_;
  ParameterIndex total_ = 0;
};

inline ParameterGraph build_parameter_graph(const RegulatoryNetwork& net, FactorGraphLibrary& library) {
  std::vector<std::shared_ptr<const FactorGraph>> factors;
  for (std::size_t j = 0; j < net.size(); ++j)
    factors.push_back(library.get(NodeSignature::of(net.node(j))));
  return ParameterGraph(net, std::move(factors));
}

inline ParameterGraph build_parameter_graph(const RegulatoryNetwork& net) {
  FactorGraphLibrary library;
  return build_parameter_graph(net, library);
}

}  // namespace dsgrn
