#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dsgrn/error.hpp"
#include "dsgrn/realizability.hpp"

namespace dsgrn {

/// Threshold order of one node: order[r] is the target position whose
/// threshold has rank r (0 = lowest).
struct OrderParameter {
  std::vector<std::uint8_t> order;

  std::size_t size() const { return order.size(); }

  std::size_t rank_of(std::size_t target_position) const {
    for (std::size_t r = 0; r < order.size(); ++r)
      if (order[r] == target_position) return r;
    fail(ErrorCode::IndexOutOfRange, "target position not in order parameter");
  }

  static OrderParameter identity(std::size_t m) {
    OrderParameter o;
    o.order.resize(m);
    std::iota(o.order.begin(), o.order.end(), std::uint8_t{0});
    return o;
  }

  bool valid() const {
    std::vector<std::uint8_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != i) return false;
    return true;
  }

  friend bool operator==(const OrderParameter&, const OrderParameter&) = default;
  friend auto operator<=>(const OrderParameter&, const OrderParameter&) = default;
};

/// Sign of the node's output against each target threshold, indexed
/// (combination, target position).
struct LogicParameter {
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
  std::vector<std::int8_t> sign;  // sign[a * n_outputs + target] in {-1, +1}

  int operator()(InputCombination a, std::size_t target) const {
    return sign[a * n_outputs + target];
  }

  friend bool operator==(const LogicParameter&, const LogicParameter&) = default;
};

inline BandFunction band_function(const LogicParameter& logic, const OrderParameter& order) {
  BandFunction b{std::vector<std::uint8_t>(std::size_t{1} << logic.n_inputs, 0), logic.n_outputs};
  for (InputCombination a = 0; a < b.band.size(); ++a) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < order.size(); ++r)
      if (logic(a, order.order[r]) > 0) ++count;
    for (std::size_t r = 0; r < order.size(); ++r)
      if ((logic(a, order.order[r]) > 0) != (r < count))
        fail(ErrorCode::ThresholdInconsistent,
             "combination " + std::to_string(a) + " is above a threshold but below a lower one");
    b.band[a] = static_cast<std::uint8_t>(count);
  }
  return b;
}

inline LogicParameter logic_parameter(const BandFunction& b, const OrderParameter& order) {
  const std::size_t m = order.size();
  LogicParameter logic;
  logic.n_outputs = m;
  for (std::size_t s = b.band.size(); s > 1; s >>= 1) ++logic.n_inputs;
  logic.sign.assign(b.band.size() * m, -1);
  for (InputCombination a = 0; a < b.band.size(); ++a)
    for (std::size_t r = 0; r < b[a]; ++r) logic.sign[a * m + order.order[r]] = 1;
  return logic;
}

/// Rank-ordered bit matrix of a band function as a big-endian hex string:
/// bit a*m + r is set iff rank r lies below the value of combination a.
inline std::string logic_hex(const BandFunction& b) {
  const std::size_t m = b.n_outputs;
  const std::size_t n_bits = b.band.size() * m;
  const std::size_t n_digits = std::max<std::size_t>(1, (n_bits + 3) / 4);
  std::string hex(n_digits, '0');
  for (InputCombination a = 0; a < b.band.size(); ++a)
    for (std::size_t r = 0; r < b[a]; ++r) {
      const std::size_t bit = a * m + r;
      char& digit = hex[n_digits - 1 - bit / 4];
      int value = (digit >= 'a' ? digit - 'a' + 10 : digit - '0') | (1 << (bit % 4));
      digit = "0123456789abcdef"[value];
    }
  return hex;
}

inline BandFunction band_from_hex(std::string_view hex, std::size_t n_inputs, std::size_t m) {
  BandFunction b{std::vector<std::uint8_t>(std::size_t{1} << n_inputs, 0), m};
  const std::size_t n_digits = hex.size();
  auto bit_set = [&](std::size_t bit) {
    if (bit / 4 >= n_digits) return false;
    char c = hex[n_digits - 1 - bit / 4];
    int v = c >= 'a' ? c - 'a' + 10 : c - '0';
    return ((v >> (bit % 4)) & 1) != 0;
  };
  for (InputCombination a = 0; a < b.band.size(); ++a) {
    std::size_t count = 0;
    while (count < m && bit_set(a * m + count)) ++count;
    for (std::size_t r = count; r < m; ++r)
      if (bit_set(a * m + r)) fail(ErrorCode::ThresholdInconsistent, "bad logic encoding");
    b.band[a] = static_cast<std::uint8_t>(count);
  }
  return b;
}

/// Compares band functions as rank-ordered bit-matrix integers.
inline bool logic_less(const BandFunction& x, const BandFunction& y) {
  const std::size_t m = x.n_outputs;
  for (std::size_t bit = x.band.size() * m; bit-- > 0;) {
    bool bx = (bit % m) < x.band[bit / m];
    bool by = (bit % m) < y.band[bit / m];
    if (bx != by) return by;
  }
  return false;
}

struct FactorVertex {
  OrderParameter order;
  BandFunction band;
  std::optional<Witness> witness;
  std::vector<Rational> thresholds;  // indexed by target position

  LogicParameter logic() const { return logic_parameter(band, order); }
};

/// Realizable combinatorial parameters of one node. Vertices are stored as
/// (order block) x (band function); vertex i = block * bands.size() + j.
class FactorGraph {
 public:
  FactorGraph() = default;

  const NodeSignature& signature() const { return sig_; }
  std::size_t size() const { return orders_.size() * bands_.size(); }
  std::size_t n_bands() const { return bands_.size(); }
  const std::vector<OrderParameter>& orders() const { return orders_; }
  const std::vector<BandFunction>& bands() const { return bands_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

  const OrderParameter& order(std::size_t i) const { return orders_[check(i) / bands_.size()]; }
  const BandFunction& band(std::size_t i) const { return bands_[check(i) % bands_.size()]; }
  const std::optional<Witness>& witness(std::size_t i) const {
    return witnesses_[check(i) % bands_.size()];
  }

  /// Threshold values indexed by target position.
  std::vector<Rational> thresholds(std::size_t i) const {
    const auto& o = order(i);
    const auto& by_rank = rank_thresholds_[i % bands_.size()];
    std::vector<Rational> out(o.size());
    for (std::size_t r = 0; r < o.size(); ++r) out[o.order[r]] = by_rank[r];
    return out;
  }

  FactorVertex vertex(std::size_t i) const { return {order(i), band(i), witness(i), thresholds(i)}; }

  std::size_t index_of(const OrderParameter& o, const BandFunction& b) const {
    auto oi = std::lower_bound(orders_.begin(), orders_.end(), o);
    auto bi = std::lower_bound(bands_.begin(), bands_.end(), b, logic_less);
    if (oi == orders_.end() || *oi != o || bi == bands_.end() || *bi != b)
      fail(ErrorCode::UnknownFactorVertex, "not a vertex of the factor graph for " + sig_.str());
    return static_cast<std::size_t>(oi - orders_.begin()) * bands_.size() +
           static_cast<std::size_t>(bi - bands_.begin());
  }

  std::size_t index_of(const LogicParameter& logic, const OrderParameter& o) const {
    if (logic.n_inputs != sig_.n_inputs || logic.n_outputs != sig_.n_outputs || !o.valid() ||
        o.size() != sig_.n_outputs)
      fail(ErrorCode::UnknownFactorVertex, "parameter shape does not match " + sig_.str());
    BandFunction b;
    try {
      b = band_function(logic, o);
    } catch (const Error&) {
      fail(ErrorCode::UnknownFactorVertex, "threshold-inconsistent logic parameter");
    }
    return index_of(o, b);
  }

  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    if (adjacency_.empty()) build_adjacency();
    return adjacency_[check(i)];
  }

  bool connected() const {
    if (size() == 0) return false;
    std::vector<bool> seen(size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : neighbors(v))
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
    }
    return count == size();
  }

  /// Assembles the graph from the realizable band functions of one
  /// threshold order; the other m!-1 order blocks are copies.
  static FactorGraph assemble(const NodeSignature& sig, std::vector<BandFunction> bands,
                              std::vector<std::optional<Witness>> witnesses) {
    FactorGraph g;
    g.sig_ = sig;
    std::vector<std::size_t> perm(bands.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return logic_less(bands[a], bands[b]); });
    for (std::size_t j : perm) {
      g.bands_.push_back(std::move(bands[j]));
      g.witnesses_.push_back(std::move(witnesses[j]));
    }
    for (std::size_t j = 0; j < g.bands_.size(); ++j)
      g.rank_thresholds_.push_back(g.witnesses_[j]
                                       ? place_thresholds(sig, g.bands_[j], *g.witnesses_[j])
                                       : std::vector<Rational>(sig.n_outputs));
    OrderParameter o = OrderParameter::identity(sig.n_outputs);
    do g.orders_.push_back(o);
    while (std::next_permutation(o.order.begin(), o.order.end()));
    g.build_edges();
    return g;
  }

  /// Replaces the stored edge list, e.g. when loading from a cache file.
  void set_edges(std::vector<std::pair<std::size_t, std::size_t>> edges) {
    edges_ = std::move(edges);
    adjacency_.clear();
  }

 private:
  std::size_t check(std::size_t i) const {
    if (i >= size()) fail(ErrorCode::IndexOutOfRange, "factor vertex index out of range");
    return i;
  }

  void build_edges() {
    const std::size_t k = bands_.size();
    const std::size_t m = sig_.n_outputs;
    std::map<std::vector<std::uint8_t>, std::size_t> lookup;
    for (std::size_t j = 0; j < k; ++j) lookup[bands_[j].band] = j;

    // Single-entry flips: one combination moves up one band.
    std::vector<std::pair<std::size_t, std::size_t>> flips;
    for (std::size_t j = 0; j < k; ++j) {
      auto up = bands_[j].band;
      for (std::size_t a = 0; a < up.size(); ++a) {
        if (up[a] == m) continue;
        ++up[a];
        auto it = lookup.find(up);
        if (it != lookup.end()) flips.emplace_back(std::min(j, it->second), std::max(j, it->second));
        --up[a];
      }
    }
    std::sort(flips.begin(), flips.end());

    std::map<OrderParameter, std::size_t> block_of;
    for (std::size_t p = 0; p < orders_.size(); ++p) block_of[orders_[p]] = p;
    for (std::size_t p = 0; p < orders_.size(); ++p) {
      for (auto [x, y] : flips) edges_.emplace_back(p * k + x, p * k + y);
      // Swapping ranks r and r+1 keeps every sign iff no value sits between them.
      for (std::size_t r = 0; r + 1 < m; ++r) {
        OrderParameter swapped = orders_[p];
        std::swap(swapped.order[r], swapped.order[r + 1]);
        const std::size_t q = block_of.at(swapped);
        if (q < p) continue;
        for (std::size_t j = 0; j < k; ++j)
          if (std::none_of(bands_[j].band.begin(), bands_[j].band.end(),
                           [&](std::uint8_t v) { return v == r + 1; }))
            edges_.emplace_back(p * k + j, q * k + j);
      }
    }
    std::sort(edges_.begin(), edges_.end());
  }

  void build_adjacency() const {
    adjacency_.assign(size(), {});
    for (auto [a, b] : edges_) {
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  }

  NodeSignature sig_;
  std::vector<OrderParameter> orders_;
  std::vector<BandFunction> bands_;
  std::vector<std::optional<Witness>> witnesses_;
  std::vector<std::vector<Rational>> rank_thresholds_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  mutable std::vector<std::vector<std::size_t>> adjacency_;
};

struct FactorGraphOptions {
  std::size_t workers = 1;
  std::optional<Backend> backend;
};

/// Realizability of every candidate, in input order, using a pool of workers.
inline std::vector<std::optional<Witness>> decide_all(const NodeSignature& sig,
                                                      const std::vector<BandFunction>& candidates,
                                                      const FactorGraphOptions& options) {
  std::vector<std::optional<Witness>> results(candidates.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < candidates.size();)
        results[i] = realizable(sig, candidates[i], options.backend);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = candidates.size();
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(options.workers, candidates.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

inline FactorGraph build_factor_graph(const NodeSignature& sig, const FactorGraphOptions& options = {}) {
  if (sig.n_inputs < 1 || sig.n_outputs < 1 || sig.logic.arity() != sig.n_inputs)
    fail(ErrorCode::UnsupportedSignature, "malformed signature " + sig.str());
  auto candidates = enumerate_monotone_bands(sig.n_inputs, sig.n_outputs);
  auto results = decide_all(sig, candidates, options);
  std::vector<BandFunction> bands;
  std::vector<std::optional<Witness>> witnesses;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (results[i]) {
      bands.push_back(std::move(candidates[i]));
      witnesses.push_back(std::move(results[i]));
    }
  return FactorGraph::assemble(sig, std::move(bands), std::move(witnesses));
}

/// Breadth-first search from the all-below parameter through single flips,
/// keeping realizable neighbours only. Used to cross-check enumeration.
inline std::vector<BandFunction> realizable_bands_by_search(const NodeSignature& sig,
                                                            std::optional<Backend> backend = {}) {
  BandFunction start{std::vector<std::uint8_t>(sig.n_combinations(), 0), sig.n_outputs};
  std::set<BandFunction> seen{start};
  std::vector<BandFunction> found;
  std::queue<BandFunction> frontier;
  if (realizable(sig, start, backend)) {
    found.push_back(start);
    frontier.push(start);
  }
  while (!frontier.empty()) {
    BandFunction b = frontier.front();
    frontier.pop();
    for (std::size_t a = 0; a < b.band.size(); ++a)
      for (int delta : {-1, 1}) {
        int v = b.band[a] + delta;
        if (v < 0 || v > static_cast<int>(sig.n_outputs)) continue;
        BandFunction c = b;
        c.band[a] = static_cast<std::uint8_t>(v);
        if (!seen.insert(c).second || !c.monotone()) continue;
        if (realizable(sig, c, backend)) {
          found.push_back(c);
          frontier.push(c);
        }
      }
  }
  std::sort(found.begin(), found.end(), logic_less);
  return found;
}

namespace detail {

inline std::string join_rationals(const std::vector<Rational>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += to_string(v[i]);
  }
  return out;
}

inline std::vector<Rational> split_rationals(std::string_view s) {
  std::vector<Rational> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    out.push_back(parse_rational(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Plain-text serialisation of a factor graph.
inline void write_factor_graph(std::ostream& out, const FactorGraph& g) {
  out << g.signature().str() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& o = g.order(i);
    for (std::size_t r = 0; r < o.size(); ++r) out << (r ? "," : "") << int(o.order[r]);
    out << '|' << logic_hex(g.band(i)) << '|';
    if (const auto& w = g.witness(i))
      out << detail::join_rationals(w->low) << ';' << detail::join_rationals(w->high);
    else
      out << '-';
    out << '\n';
  }
  out << "EDGES\n";
  for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

inline FactorGraph read_factor_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::IoError, "empty factor graph file");
  const NodeSignature sig = NodeSignature::parse(line);
  std::vector<BandFunction> bands;
  std::vector<std::optional<Witness>> witnesses;
  std::set<std::string> seen_bands;
  std::size_t vertices = 0;
  while (std::getline(in, line) && line != "EDGES") {
    ++vertices;
    auto p1 = line.find('|');
    auto p2 = line.find('|', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
      fail(ErrorCode::IoError, "bad factor graph vertex line");
    std::string hex = line.substr(p1 + 1, p2 - p1 - 1);
    if (!seen_bands.insert(hex).second) continue;
    bands.push_back(band_from_hex(hex, sig.n_inputs, sig.n_outputs));
    std::string w = line.substr(p2 + 1);
    if (w == "-") {
      witnesses.emplace_back();
    } else {
      auto semi = w.find(';');
      if (semi == std::string::npos) fail(ErrorCode::IoError, "bad witness in factor graph file");
      witnesses.push_back(Witness{detail::split_rationals(std::string_view(w).substr(0, semi)),
                                  detail::split_rationals(std::string_view(w).substr(semi + 1))});
    }
  }
  if (line != "EDGES") fail(ErrorCode::IoError, "truncated factor graph file");
  FactorGraph g = FactorGraph::assemble(sig, std::move(bands), std::move(witnesses));
  if (g.size() != vertices) fail(ErrorCode::IoError, "factor graph file is inconsistent");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t a, b;
  while (in >> a >> b) {
    if (a >= g.size() || b >= g.size()) fail(ErrorCode::IoError, "edge index out of range");
    edges.emplace_back(a, b);
  }
  if (edges != g.edges()) fail(ErrorCode::IoError, "factor graph file edges are inconsistent");
  return g;
}

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("DSGRN_CACHE"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "dsgrn";
  return std::filesystem::temp_directory_path() / "dsgrn-cache";
}

/// Factor graphs memoised in memory and, optionally, on disk by signature.
class FactorGraphLibrary {
 public:
  explicit FactorGraphLibrary(std::optional<std::filesystem::path> cache_dir = std::nullopt,
                              FactorGraphOptions options = {})
      : cache_dir_(std::move(cache_dir)), options_(options) {}

  static FactorGraphLibrary with_default_cache(FactorGraphOptions options = {}) {
    return FactorGraphLibrary(default_cache_dir(), options);
  }

  std::shared_ptr<const FactorGraph> get(const NodeSignature& sig) {
    std::lock_guard lock(mutex_);
    const std::string key = sig.str();
    if (auto it = graphs_.find(key); it != graphs_.end()) return it->second;
    std::shared_ptr<const FactorGraph> g;
    if (auto loaded = load(key)) {
      g = std::make_shared<const FactorGraph>(std::move(*loaded));
    } else {
      g = std::make_shared<const FactorGraph>(build_factor_graph(sig, options_));
      store(key, *g);
    }
    graphs_.emplace(key, g);
    return g;
  }

  std::optional<std::filesystem::path> path_for(const std::string& key) const {
    if (!cache_dir_) return std::nullopt;
    std::string name;
    for (char c : key) name += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return *cache_dir_ / (name + ".fg");
  }

 private:
  std::optional<FactorGraph> load(const std::string& key) const {
    auto path = path_for(key);
    if (!path || !std::filesystem::exists(*path)) return std::nullopt;
    std::ifstream in(*path);
    try {
      FactorGraph g = read_factor_graph(in);
      if (g.signature().str() != key) return std::nullopt;
      return g;
    } catch (const Error&) {
      return std::nullopt;  // stale or damaged entry: rebuild
    }
  }

  void store(const std::string& key, const FactorGraph& g) const {
    auto path = path_for(key);
    if (!path) return;
    std::error_code ec;
    std::filesystem::create_directories(path->parent_path(), ec);
    if (ec) return;
    auto tmp = *path;
    tmp += ".tmp." + std::to_string(std::random_device{}());
    {
      std::ofstream out(tmp);
      if (!out) return;
      write_factor_graph(out, g);
      if (!out) return;
    }
    std::filesystem::rename(tmp, *path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }

  std::optional<std::filesystem::path> cache_dir_;
  FactorGraphOptions options_;
  std::map<std::string, std::shared_ptr<const FactorGraph>> graphs_;
  std::mutex mutex_;
};

inline std::size_t factor_graph_size(const NodeSignature& sig, const FactorGraphOptions& options = {}) {
  return build_factor_graph(sig, options).size();
}

}  // namespace dsgrn
