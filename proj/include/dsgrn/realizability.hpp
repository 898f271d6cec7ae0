#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsgrn/error.hpp"
#include "dsgrn/lp.hpp"
#include "dsgrn/network.hpp"
#include "dsgrn/rational.hpp"

namespace dsgrn {

/// Local structure of one network node: input count, output count, and how
/// the inputs are grouped by the logic.
struct NodeSignature {
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
  ProductOfSums logic;

  static NodeSignature of(const NodeRecord& node) {
    return {node.n_inputs(), node.n_outputs(), node.logic};
  }

  std::size_t n_combinations() const { return std::size_t{1} << n_inputs; }

  bool experimental() const { return n_inputs > 3 || n_outputs > 3; }

  static char variable_letter(std::size_t position, std::size_t n_inputs) {
    if (n_inputs <= 3) return "xyz"[position];
    return static_cast<char>('a' + position);
  }

  /// e.g. "3,2,(x)(y+z)", "2,1,x+y", "2,1,(x)(y)".
  std::string str() const {
    std::ostringstream out;
    out << n_inputs << ',' << n_outputs << ',';
    const bool product = logic.factors.size() > 1;
    for (const auto& f : logic.factors) {
      if (product) out << '(';
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (j) out << '+';
        out << variable_letter(f[j], n_inputs);
      }
      if (product) out << ')';
    }
    return out.str();
  }

  static NodeSignature parse(std::string_view text) {
    auto c1 = text.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos) fail(ErrorCode::SyntaxError, "bad signature");
    NodeSignature sig;
    sig.n_inputs = std::stoul(std::string(text.substr(0, c1)));
    sig.n_outputs = std::stoul(std::string(text.substr(c1 + 1, c2 - c1 - 1)));
    std::string_view logic = text.substr(c2 + 1);
    std::vector<std::size_t> current;
    auto flush = [&] {
      if (!current.empty()) sig.logic.factors.push_back(current);
      current.clear();
    };
    for (char ch : logic) {
      if (ch == '(' || ch == '+') continue;
      if (ch == ')') {
        flush();
        continue;
      }
      std::size_t pos = sig.n_inputs;
      for (std::size_t k = 0; k < sig.n_inputs; ++k)
        if (variable_letter(k, sig.n_inputs) == ch) pos = k;
      if (pos == sig.n_inputs) fail(ErrorCode::SyntaxError, "bad signature logic");
      current.push_back(pos);
    }
    flush();
    if (sig.logic.arity() != sig.n_inputs) fail(ErrorCode::SyntaxError, "bad signature logic");
    return sig;
  }

  friend bool operator==(const NodeSignature&, const NodeSignature&) = default;
};

/// Band of each input combination: the number of thresholds (in rank order)
/// lying below the node's output value for that combination.
struct BandFunction {
  std::vector<std::uint8_t> band;
  std::size_t n_outputs = 0;

  std::size_t operator[](InputCombination a) const { return band[a]; }

  /// Monotone with respect to the componentwise order on combinations.
  bool monotone() const {
    for (InputCombination a = 0; a < band.size(); ++a)
      for (std::size_t k = 0; (std::size_t{1} << k) < band.size(); ++k)
        if (!is_on(a, k) && band[a] > band[a | (1u << k)]) return false;
    return true;
  }

  friend bool operator==(const BandFunction&, const BandFunction&) = default;
  friend auto operator<=>(const BandFunction&, const BandFunction&) = default;
};

/// All monotone band functions for n inputs and m outputs.
inline std::vector<BandFunction> enumerate_monotone_bands(std::size_t n_inputs,
                                                          std::size_t n_outputs) {
  const std::size_t count = std::size_t{1} << n_inputs;
  std::vector<BandFunction> out;
  BandFunction current{std::vector<std::uint8_t>(count, 0), n_outputs};
  // Numeric order on combinations extends the subset order.
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a == count) {
      out.push_back(current);
      return;
    }
    std::uint8_t lo = 0;
    for (std::size_t k = 0; k < n_inputs; ++k)
      if (is_on(static_cast<InputCombination>(a), k))
        lo = std::max(lo, current.band[a & ~(std::size_t{1} << k)]);
    for (std::size_t v = lo; v <= n_outputs; ++v) {
      current.band[a] = static_cast<std::uint8_t>(v);
      rec(a + 1);
    }
  };
  rec(0);
  return out;
}

/// Concrete low/high values per input certifying a band function.
struct Witness {
  std::vector<Rational> low;
  std::vector<Rational> high;

  friend bool operator==(const Witness&, const Witness&) = default;
};

enum class Backend { Sum, Product, Mixed };

inline std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Sum: return "SUM";
    case Backend::Product: return "PRODUCT";
    case Backend::Mixed: return "MIXED";
  }
  return "?";
}

inline Backend default_backend(const NodeSignature& sig) {
  if (sig.logic.factors.size() == 1) return Backend::Sum;
  bool singletons = std::all_of(sig.logic.factors.begin(), sig.logic.factors.end(),
                                [](const auto& f) { return f.size() == 1; });
  return singletons ? Backend::Product : Backend::Mixed;
}

/// Output value of each input combination under a witness.
template <class T>
std::vector<T> combination_values(const NodeSignature& sig, std::span<const T> low,
                                  std::span<const T> high) {
  std::vector<T> out;
  out.reserve(sig.n_combinations());
  std::vector<T> v(sig.n_inputs);
  for (InputCombination a = 0; a < sig.n_combinations(); ++a) {
    for (std::size_t k = 0; k < sig.n_inputs; ++k) v[k] = is_on(a, k) ? high[k] : low[k];
    out.push_back(logic_eval<T>(sig.logic, std::span<const T>(v)));
  }
  return out;
}

/// Exact check that the witness separates every pair of differing bands.
inline bool verify_witness(const NodeSignature& sig, const BandFunction& b, const Witness& w) {
  if (w.low.size() != sig.n_inputs || w.high.size() != sig.n_inputs) return false;
  for (std::size_t k = 0; k < sig.n_inputs; ++k)
    if (!(w.low[k] > 0 && w.high[k] > w.low[k])) return false;
  auto values = combination_values<Rational>(sig, w.low, w.high);
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t c = 0; c < values.size(); ++c)
      if (b.band[a] < b.band[c] && !(values[a] < values[c])) return false;
  return true;
}

/// Threshold values, indexed by rank, strictly separating the bands of a
/// verified witness. Thresholds sharing a gap are spread evenly inside it;
/// thresholds above every value are placed at max+1, max+2, ...
inline std::vector<Rational> place_thresholds(const NodeSignature& sig, const BandFunction& b,
                                              const Witness& w) {
  auto values = combination_values<Rational>(sig, w.low, w.high);
  const std::size_t m = sig.n_outputs;
  struct Gap {
    std::optional<Rational> lo, hi;
  };
  std::vector<Gap> gaps(m + 1);  // gap for rank r (1-based)
  for (std::size_t r = 1; r <= m; ++r)
    for (std::size_t a = 0; a < values.size(); ++a) {
      if (b.band[a] < r) {
        if (!gaps[r].lo || values[a] > *gaps[r].lo) gaps[r].lo = values[a];
      } else {
        if (!gaps[r].hi || values[a] < *gaps[r].hi) gaps[r].hi = values[a];
      }
    }
  std::vector<Rational> theta(m);
  std::size_t r = 1;
  while (r <= m) {
    std::size_t s = r;
    while (s + 1 <= m && gaps[s + 1].lo == gaps[r].lo && gaps[s + 1].hi == gaps[r].hi) ++s;
    const std::size_t count = s - r + 1;
    const Rational lo = gaps[r].lo.value_or(Rational(0));
    for (std::size_t j = 1; j <= count; ++j) {
      if (gaps[r].hi)
        theta[r + j - 2] = lo + (*gaps[r].hi - lo) * Rational(j, count + 1);
      else
        theta[r + j - 2] = lo + Rational(j);
    }
    r = s + 1;
  }
  return theta;
}

namespace detail {

/// Pairs (lower, upper) of combinations whose values must be strictly
/// ordered: consecutive non-empty bands, minus pairs already forced by the
/// subset order.
inline std::vector<std::pair<InputCombination, InputCombination>> band_constraints(
    const BandFunction& b) {
  std::vector<std::pair<InputCombination, InputCombination>> out;
  const std::size_t count = b.band.size();
  std::vector<std::vector<InputCombination>> members(b.n_outputs + 1);
  for (InputCombination a = 0; a < count; ++a) members[b.band[a]].push_back(a);
  std::size_t prev = b.n_outputs + 1;
  for (std::size_t level = 0; level <= b.n_outputs; ++level) {
    if (members[level].empty()) continue;
    if (prev <= b.n_outputs)
      for (InputCombination lo : members[prev])
        for (InputCombination hi : members[level])
          if ((lo & hi) != lo) out.emplace_back(lo, hi);
    prev = level;
  }
  return out;
}

inline std::vector<lp::Row> difference_rows(
    std::size_t n, const std::vector<std::pair<InputCombination, InputCombination>>& pairs) {
  std::vector<lp::Row> rows;
  for (auto [lo, hi] : pairs) {
    lp::Row row(n);
    for (std::size_t k = 0; k < n; ++k)
      row[k] = static_cast<int>(is_on(lo, k)) - static_cast<int>(is_on(hi, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// Sum logic: values differ only through the increments u_k - l_k, so the
/// band order is a strict homogeneous linear system in the increments. The
/// increments are doubled so that the single-input case reads l=1, u=3.
inline std::optional<Witness> realize_sum(const NodeSignature& sig, const BandFunction& b) {
  const std::size_t n = sig.n_inputs;
  auto d = lp::strict_homogeneous(detail::difference_rows(n, detail::band_constraints(b)), n);
  if (!d) return std::nullopt;
  Witness w;
  for (std::size_t k = 0; k < n; ++k) {
    w.low.emplace_back(1);
    w.high.push_back(1 + 2 * (*d)[k]);
  }
  return w;
}

/// Product of single inputs: in logarithms the same system as a sum, over
/// log(u_k / l_k). The exponents are scaled to integers so that u_k = 2^e_k
/// is exact.
inline std::optional<Witness> realize_product(const NodeSignature& sig, const BandFunction& b) {
  const std::size_t n = sig.n_inputs;
  auto d = lp::strict_homogeneous(detail::difference_rows(n, detail::band_constraints(b)), n);
  if (!d) return std::nullopt;
  BigInt scale = 1;
  for (const auto& v : *d) scale = boost::multiprecision::lcm(scale, denominator(v));
  Witness w;
  for (std::size_t k = 0; k < n; ++k) {
    const Rational scaled = (*d)[k] * scale;
    BigInt e = numerator(scaled) / denominator(scaled);
    w.low.emplace_back(1);
    w.high.emplace_back(BigInt(1) << static_cast<unsigned>(e));
  }
  return w;
}

struct MixedBudget {
  std::size_t starts = 200;
  std::size_t iterations = 500;
  unsigned grid_denominator = 16;
  bool grid_pass = true;
  double max_grid_points = 1e6;
};

namespace detail {

inline std::uint64_t band_seed(const NodeSignature& sig, const BandFunction& b) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (char c : sig.str()) mix(static_cast<unsigned char>(c));
  for (auto v : b.band) mix(v + 1);
  return h;
}

/// Randomised hill climbing on the smallest log-margin between bands.
inline std::optional<Witness> mixed_search(const NodeSignature& sig, const BandFunction& b,
                                           const MixedBudget& budget) {
  const std::size_t n = sig.n_inputs;
  const auto pairs = band_constraints(b);
  if (pairs.empty()) {
    Witness w;
    for (std::size_t k = 0; k < n; ++k) {
      w.low.emplace_back(1);
      w.high.emplace_back(2);
    }
    return w;
  }
  const std::size_t dim = 2 * n;
  std::mt19937_64 rng(band_seed(sig, b));
  std::uniform_real_distribution<double> uniform(-2.0, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> low(n), high(n);
  auto decode = [&](const std::vector<double>& x) {
    for (std::size_t k = 0; k < n; ++k) {
      low[k] = std::exp(x[2 * k]);
      high[k] = low[k] + std::exp(x[2 * k + 1]);
    }
  };
  auto margin = [&](const std::vector<double>& x) {
    decode(x);
    auto values = combination_values<double>(sig, low, high);
    double best = std::numeric_limits<double>::infinity();
    for (auto [lo, hi] : pairs) best = std::min(best, std::log(values[hi]) - std::log(values[lo]));
    return best;
  };
  auto certify = [&](const std::vector<double>& x) -> std::optional<Witness> {
    decode(x);
    for (unsigned bits = 4; bits <= 48; bits += 4) {
      Witness w;
      for (std::size_t k = 0; k < n; ++k) {
        w.low.push_back(dyadic_round(low[k], bits));
        Rational h = dyadic_round(high[k], bits);
        if (h <= w.low.back()) h = w.low.back() + Rational(1, BigInt(1) << bits);
        w.high.push_back(h);
      }
      if (verify_witness(sig, b, w)) return w;
    }
    return std::nullopt;
  };

  std::vector<double> x(dim), y(dim);
  for (std::size_t s = 0; s < budget.starts; ++s) {
    for (auto& v : x) v = uniform(rng);
    double fx = margin(x);
    double sigma = 0.5;
    for (std::size_t it = 0; it < budget.iterations; ++it) {
      if (fx > 0) {
        if (auto w = certify(x)) return w;
      }
      for (std::size_t i = 0; i < dim; ++i) y[i] = std::clamp(x[i] + sigma * normal(rng), -8.0, 8.0);
      double fy = margin(y);
      if (fy > fx) {
        x.swap(y);
        fx = fy;
        sigma = std::min(sigma * 1.3, 2.0);
      } else {
        sigma = std::max(sigma * 0.95, 1e-4);
      }
    }
    if (fx > 0) {
      if (auto w = certify(x)) return w;
    }
  }
  return std::nullopt;
}

/// Rational grid over every factor but the largest, with an exact linear
/// program over the largest factor's variables at each grid point.
inline std::optional<Witness> mixed_grid(const NodeSignature& sig, const BandFunction& b,
                                         const MixedBudget& budget) {
  const auto& factors = sig.logic.factors;
  std::size_t inner = 0;
  for (std::size_t f = 1; f < factors.size(); ++f)
    if (factors[f].size() > factors[inner].size()) inner = f;
  const auto pairs = band_constraints(b);

  // Free outer variables: the first member of each outer factor has l = 1.
  struct Var {
    std::size_t input;
    bool high;
  };
  std::vector<Var> vars;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (f == inner) continue;
    for (std::size_t j = 0; j < factors[f].size(); ++j) {
      if (j > 0) vars.push_back({factors[f][j], false});
      vars.push_back({factors[f][j], true});
    }
  }
  const BigInt q = budget.grid_denominator;
  std::vector<Rational> ladder;
  if (vars.size() == 1) {
    for (BigInt p = 1; p <= q * q; ++p) ladder.emplace_back(p, q);
  } else {
    for (int e = -4; e <= 4; ++e)
      ladder.push_back(e >= 0 ? Rational(BigInt(1) << e) : Rational(1, BigInt(1) << -e));
  }

  double points = std::pow(static_cast<double>(ladder.size()), static_cast<double>(vars.size()));
  if (points > budget.max_grid_points)
    fail(ErrorCode::BackendBudgetExhausted,
         "grid pass for " + sig.str() + " needs " + std::to_string(points) + " points");

  const std::size_t n = sig.n_inputs;
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    std::vector<Rational> low(n, Rational(1)), high(n, Rational(2));
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (!vars[v].high) low[vars[v].input] = ladder[idx[v]];
    }
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (vars[v].high) high[vars[v].input] = low[vars[v].input] + ladder[idx[v]];

    // Outer product P(A) per combination.
    std::vector<Rational> outer(sig.n_combinations(), Rational(1));
    for (InputCombination a = 0; a < sig.n_combinations(); ++a)
      for (std::size_t f = 0; f < factors.size(); ++f) {
        if (f == inner) continue;
        Rational s = 0;
        for (std::size_t k : factors[f]) s += is_on(a, k) ? high[k] : low[k];
        outer[a] *= s;
      }
    // Inner variables: (l_k, d_k) per member k of the inner factor.
    const auto& members = factors[inner];
    std::vector<lp::Row> rows;
    for (auto [lo, hi] : pairs) {
      lp::Row row(2 * members.size());
      for (std::size_t j = 0; j < members.size(); ++j) {
        const std::size_t k = members[j];
        row[2 * j] = outer[lo] - outer[hi];
        row[2 * j + 1] = (is_on(lo, k) ? outer[lo] : Rational(0)) -
                         (is_on(hi, k) ? outer[hi] : Rational(0));
      }
      rows.push_back(std::move(row));
    }
    if (auto y = lp::strict_homogeneous(rows, 2 * members.size())) {
      Witness w{low, high};
      for (std::size_t j = 0; j < members.size(); ++j) {
        w.low[members[j]] = (*y)[2 * j];
        w.high[members[j]] = (*y)[2 * j] + (*y)[2 * j + 1];
      }
      if (verify_witness(sig, b, w)) return w;
    }

    std::size_t v = 0;
    while (v < idx.size() && ++idx[v] == ladder.size()) idx[v++] = 0;
    if (v == idx.size()) break;
  }
  return std::nullopt;
}

}  // namespace detail

/// Randomised search, then the structured grid. Sound for Yes; a No means
/// neither phase found a witness within the budget.
inline std::optional<Witness> realize_mixed(const NodeSignature& sig, const BandFunction& b,
                                            const MixedBudget& budget = {}) {
  if (auto w = detail::mixed_search(sig, b, budget)) return w;
  if (budget.grid_pass) return detail::mixed_grid(sig, b, budget);
  return std::nullopt;
}

/// Decides whether some positive parameters with l < u per input order the
/// node's output values as the band function requires.
inline std::optional<Witness> realizable(const NodeSignature& sig, const BandFunction& b,
                                         std::optional<Backend> backend = std::nullopt) {
  if (!b.monotone()) return std::nullopt;
  switch (backend.value_or(default_backend(sig))) {
    case Backend::Sum:
      if (sig.logic.factors.size() != 1)
        fail(ErrorCode::UnsupportedSignature, "SUM backend needs a single-sum logic");
      return realize_sum(sig, b);
    case Backend::Product:
      for (const auto& f : sig.logic.factors)
        if (f.size() != 1)
          fail(ErrorCode::UnsupportedSignature, "PRODUCT backend needs single-input factors");
      return realize_product(sig, b);
    case Backend::Mixed:
      return realize_mixed(sig, b);
  }
  return std::nullopt;
}

}  // namespace dsgrn
