#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "edgex/errors.hpp"
#include "edgex/graph.hpp"
#include "edgex/weights.hpp"

namespace edgex {

// Symmetric nonnegative intensity matrix (mu_ij) over labels >= -1.
// Two storage modes:
//   * explicit sparse entries (optionally held as log-values), used by the
//     band / factorial / chameleon families and hand-built matrices;
//   * rank-1 (mu_ij = 2 q_i q_j off the diagonal), kept in factored form so
//     that weight sequences with 10^6 retained labels stay tractable.
// Immutable after construction.
class IntensityMatrix {
 public:
  struct Rank1 {
    WeightSeq q;
    bool loops = false;
    double total = 0.0;    // head + tail mass of q
    double sum_sq = 0.0;   // sum of retained q_i^2
    std::vector<double> sorted_q;          // descending, positives only
    std::vector<double> suffix1, suffix2;  // suffix sums of sorted_q and its squares
  };

  struct Entry {
    label_t i, j;
    double value;      // linear scale
    double log_value;  // always valid
  };

  static IntensityMatrix from_entries(const std::map<std::uint64_t, double>& entries,
                                      bool log_values = false) {
    IntensityMatrix m;
    m.log_values_ = log_values;
    m.entries_.assign(entries.begin(), entries.end());
    m.finish_explicit();
    return m;
  }

  static IntensityMatrix rank1(WeightSeq q, bool loops) {
    q.validate();
    std::size_t positive = 0;
    for (double w : q.weights)
      if (w > 0.0) ++positive;
    if (!loops && positive < 2 && q.tail_mass == 0.0)
      throw degenerate_error("rank1: no off-diagonal mass with < 2 positive weights");

    IntensityMatrix m;
    Rank1 r;
    r.total = q.total();
    r.loops = loops;
    for (double w : q.weights) r.sum_sq += w * w;
    r.sorted_q.reserve(positive);
    for (double w : q.weights)
      if (w > 0.0) r.sorted_q.push_back(w);
    std::sort(r.sorted_q.begin(), r.sorted_q.end(), std::greater<>());
    std::size_t n = r.sorted_q.size();
    r.suffix1.assign(n + 1, 0.0);
    r.suffix2.assign(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) {
      r.suffix1[k] = r.suffix1[k + 1] + r.sorted_q[k];
      r.suffix2[k] = r.suffix2[k + 1] + r.sorted_q[k] * r.sorted_q[k];
    }
    r.q = std::move(q);
    m.label_max_ = static_cast<label_t>(r.q.size());
    m.mass_ = loops ? r.total * r.total : r.total * r.total - r.sum_sq;
    if (!(m.mass_ > 0.0) || !std::isfinite(m.mass_))
      throw degenerate_error("rank1: total mass not in (0, inf)");
    m.store_ = std::move(r);
    return m;
  }

  bool is_rank1() const { return std::holds_alternative<Rank1>(store_); }
  const Rank1& rank1_data() const { return std::get<Rank1>(store_); }
  bool log_values() const { return log_values_; }

  double total_mass() const { return mass_; }
  label_t label_max() const { return label_max_; }

  std::uint64_t entry_count() const {
    if (!is_rank1()) return entries_.size();
    const auto& r = rank1_data();
    std::uint64_t n = r.sorted_q.size();
    return n * (n - 1) / 2 + (r.loops ? n : 0);
  }

  // mu_{ij}; absent pairs (and rank-1 tail labels) give 0.
  double lookup(label_t i, label_t j) const {
    if (is_rank1()) {
      const auto& r = rank1_data();
      double qi = r.q.q(static_cast<std::size_t>(std::max<label_t>(i, 0)));
      double qj = r.q.q(static_cast<std::size_t>(std::max<label_t>(j, 0)));
      if (i == j) return r.loops ? qi * qi : 0.0;
      return 2.0 * qi * qj;
    }
    auto key = pack_pair(i, j);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const auto& e, std::uint64_t k) { return e.first < k; });
    if (it == entries_.end() || it->first != key) return 0.0;
    return log_values_ ? std::exp(it->second) : it->second;
  }

  // mu_i = sum_j mu_ij, diagonal counted once.
  double vertex_intensity(label_t i) const {
    if (i < 1) throw parameter_error("vertex_intensity: label must be >= 1");
    if (is_rank1()) {
      const auto& r = rank1_data();
      double qi = r.q.q(static_cast<std::size_t>(i));
      return r.loops ? 2.0 * qi * r.total - qi * qi
                     : 2.0 * qi * (r.total - qi);
    }
    auto it = row_sums_.find(i);
    return it == row_sums_.end() ? 0.0 : it->second;
  }

  // Deterministic entry iteration (sorted pair keys; rank-1 enumerates the
  // retained support, guarded by pair count).
  template <typename F>
  void for_each_entry(F&& fn) const {
    if (!is_rank1()) {
      for (auto& [k, v] : entries_) {
        auto [i, j] = unpack_pair(k);
        double lin = log_values_ ? std::exp(v) : v;
        double lg = log_values_ ? v : std::log(v);
        fn(Entry{i, j, lin, lg});
      }
      return;
    }
    const auto& r = rank1_data();
    if (entry_count() > 100'000'000ULL)
      throw capacity_error("for_each_entry: rank-1 support too large to enumerate");
    auto n = static_cast<label_t>(r.q.size());
    for (label_t i = 1; i <= n; ++i) {
      double qi = r.q.q(static_cast<std::size_t>(i));
      if (qi <= 0.0) continue;
      if (r.loops) fn(Entry{i, i, qi * qi, std::log(qi * qi)});
      for (label_t j = i + 1; j <= n; ++j) {
        double qj = r.q.q(static_cast<std::size_t>(j));
        if (qj <= 0.0) continue;
        double v = 2.0 * qi * qj;
        fn(Entry{i, j, v, std::log(v)});
      }
    }
  }

  struct DiscardLedger {
    double dropped_mass = 0.0;
    std::uint64_t dropped_entries = 0;
  };

  // Materialize into explicit storage, dropping entries below `floor` into
  // the discard ledger.
  IntensityMatrix materialize(double floor = 0.0) const {
    std::map<std::uint64_t, double> out;
    DiscardLedger ledger;
    for_each_entry([&](const Entry& e) {
      if (e.value < floor) {
        ledger.dropped_mass += e.value;
        ++ledger.dropped_entries;
      } else {
        out[pack_pair(e.i, e.j)] = log_values_ ? e.log_value : e.value;
      }
    });
    auto m = from_entries(out, log_values_);
    m.ledger_ = ledger;
    return m;
  }

  const DiscardLedger& ledger() const { return ledger_; }

  // "i<TAB>j<TAB>log_flag<TAB>value" lines; the header records mass and label_max.
  void save(std::ostream& os) const {
    os << "# edgex-intensity v1 mass " << mass_ << " label_max " << label_max_
       << " log " << (log_values_ ? 1 : 0) << "\n";
    os.precision(17);
    for_each_entry([&](const Entry& e) {
      os << e.i << '\t' << e.j << '\t' << (log_values_ ? 1 : 0) << '\t'
         << (log_values_ ? e.log_value : e.value) << '\n';
    });
  }

  static IntensityMatrix load(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# edgex-intensity", 0) != 0)
      throw io_error("IntensityMatrix::load: bad header");
    std::map<std::uint64_t, double> entries;
    bool log_values = header.find(" log 1") != std::string::npos;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      label_t i, j;
      int flag;
      double v;
      if (!(ls >> i >> j >> flag >> v)) throw io_error("IntensityMatrix::load: bad line: " + line);
      entries[pack_pair(i, j)] = v;
    }
    return from_entries(entries, log_values);
  }

 private:
  void finish_explicit() {
    if (entries_.empty()) throw degenerate_error("IntensityMatrix: no entries");
    mass_ = 0.0;
    label_max_ = 0;
    for (auto& [k, v] : entries_) {
      auto [i, j] = unpack_pair(k);
      if (i == -1 && j != 0)
        throw parameter_error("IntensityMatrix: label -1 may pair only with 0");
      double lin = log_values_ ? std::exp(v) : v;
      if (!log_values_ && !(v > 0.0))
        throw parameter_error("IntensityMatrix: stored entries must be positive");
      mass_ += lin;
      label_max_ = std::max(label_max_, j);
      row_sums_[i] += lin;
      if (i != j) row_sums_[j] += lin;
    }
    if (!(mass_ > 0.0) || !std::isfinite(mass_))
      throw degenerate_error("IntensityMatrix: total mass not in (0, inf)");
  }

  std::variant<std::monostate, Rank1> store_;
  std::vector<std::pair<std::uint64_t, double>> entries_;  // explicit mode, sorted
  std::unordered_map<label_t, double> row_sums_;
  bool log_values_ = false;
  double mass_ = 0.0;
  label_t label_max_ = 0;
  DiscardLedger ledger_;
};

inline double total_mass(const IntensityMatrix& mu) { return mu.total_mass(); }
inline double vertex_intensity(const IntensityMatrix& mu, label_t i) {
  return mu.vertex_intensity(i);
}

// mu_ij = 2 q_i q_j off the diagonal; mu_ii = q_i^2 when loops are kept.
inline IntensityMatrix build_rank1(WeightSeq q, bool loops) {
  return IntensityMatrix::rank1(std::move(q), loops);
}

// mu_ij = ((i v j)!)^{-4}, diagonal zero, stored as log-values.
inline IntensityMatrix factorial_intensity(label_t n_max) {
  if (n_max < 2) throw parameter_error("factorial_intensity: n_max >= 2");
  std::map<std::uint64_t, double> entries;
  for (label_t i = 1; i < n_max; ++i)
    for (label_t j = i + 1; j <= n_max; ++j)
      entries[pack_pair(i, j)] = -4.0 * std::lgamma(static_cast<double>(j) + 1.0);
  // dominance: sup_l mu_{k+1,l} <= k^-4 min_{i<k} mu_{k,i}
  for (label_t k = 2; k < n_max; ++k) {
    double lhs = -4.0 * std::lgamma(static_cast<double>(k) + 2.0);
    double rhs = -4.0 * std::log(static_cast<double>(k)) - 4.0 * std::lgamma(static_cast<double>(k) + 1.0);
    if (lhs > rhs + 1e-9) throw degenerate_error("factorial_intensity: dominance violated");
  }
  return IntensityMatrix::from_entries(entries, /*log_values=*/true);
}

// t_n = (n^3 a_{n+1})^{-1} with a_{n+1} = ((n+1)!)^{-4}: the time at which the
// presence graph of the factorial family is K_n with high probability.
inline double factorial_schedule_t(label_t n) {
  if (n < 2) throw parameter_error("factorial_schedule_t: n >= 2");
  return std::exp(4.0 * std::lgamma(static_cast<double>(n) + 2.0) -
                  3.0 * std::log(static_cast<double>(n)));
}

// Band matrix: entries only for 0 < |i-j| <= d/2. n_max == 0 means unbounded;
// rows are then extended until the remaining profile mass is negligible.
inline IntensityMatrix band_intensity(label_t d, label_t n_max,
                                      const std::function<double(label_t, label_t)>& profile,
                                      double mass_epsilon = 1e-12) {
  if (d < 2 || d % 2 != 0) throw parameter_error("band_intensity: d must be positive and even");
  label_t half = d / 2;
  std::map<std::uint64_t, double> entries;
  double mass = 0.0;
  label_t hard_cap = 20'000'000;
  label_t limit = n_max == 0 ? hard_cap : n_max;
  for (label_t i = 1; i <= limit; ++i) {
    double row = 0.0;
    for (label_t j = i + 1; j <= std::min<label_t>(i + half, limit); ++j) {
      double v = profile(i, j);
      if (v < 0.0 || !std::isfinite(v)) throw parameter_error("band_intensity: bad profile value");
      if (v > 0.0) {
        entries[pack_pair(i, j)] = v;
        row += v;
      }
    }
    mass += row;
    if (n_max == 0 && i > 8 && row <= mass_epsilon * std::max(mass, 1e-300)) break;
    if (n_max == 0 && i == hard_cap)
      throw capacity_error("band_intensity: profile mass does not converge");
  }
  if (entries.empty()) throw degenerate_error("band_intensity: empty band");
  return IntensityMatrix::from_entries(entries);
}

struct ChameleonModel {
  IntensityMatrix mu;
  std::vector<std::uint64_t> shell_bounds;  // N_0 .. N_{k_max}
  std::vector<double> log_a;                // log a_1 .. log a_{k_max}
  std::vector<double> probe_times;          // t_k = N_k / a_k
  std::vector<SimpleGraph> graphs;          // F_1 .. F_{k_max}
};

// All simple graphs without isolated vertices in canonical order (vertex
// count, then edge count, then minimal adjacency bitstring), repeated in
// triangular round-robin so every graph recurs infinitely often.
inline std::vector<SimpleGraph> canonical_graph_enumeration(std::size_t count) {
  std::vector<std::tuple<int, int, std::uint64_t>> canon;  // (v, e, bits)
  for (int v = 2; v <= 5; ++v) {
    int np = v * (v - 1) / 2;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < v; ++a)
      for (int b = a + 1; b < v; ++b) pairs.emplace_back(a, b);
    std::vector<int> perm(v);
    for (std::uint64_t bits = 1; bits < (1ULL << np); ++bits) {
      // skip graphs with isolated vertices
      std::uint64_t seen = 0;
      for (int p = 0; p < np; ++p)
        if (bits >> p & 1) seen |= (1ULL << pairs[p].first) | (1ULL << pairs[p].second);
      if (seen != (1ULL << v) - 1) continue;
      // canonical form: minimal bitstring over vertex permutations
      for (int a = 0; a < v; ++a) perm[a] = a;
      std::uint64_t best = ~0ULL;
      do {
        std::uint64_t rb = 0;
        for (int p = 0; p < np; ++p) {
          if (!(bits >> p & 1)) continue;
          int a = perm[pairs[p].first], b = perm[pairs[p].second];
          if (a > b) std::swap(a, b);
          int idx = 0, q = 0;
          for (int x = 0; x < v && q == 0; ++x)
            for (int y = x + 1; y < v; ++y) {
              if (x == a && y == b) { q = 1; break; }
              ++idx;
            }
          rb |= 1ULL << idx;
        }
        best = std::min(best, rb);
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (best == bits) canon.emplace_back(v, __builtin_popcountll(bits), bits);
    }
  }
  std::sort(canon.begin(), canon.end());
  auto materialize = [&](std::size_t idx) {
    auto [v, e, bits] = canon.at(idx);
    SimpleGraph g;
    int p = 0;
    for (int a = 1; a <= v; ++a)
      for (int b = a + 1; b <= v; ++b, ++p)
        if (bits >> p & 1) g.add_edge(a, b);
    return g;
  };
  std::vector<SimpleGraph> out;
  std::size_t block = 1, pos = 0;
  while (out.size() < count) {
    out.push_back(materialize(pos));
    ++pos;
    if (pos == block) { pos = 0; ++block; }
    if (block > canon.size())
      throw capacity_error("canonical_graph_enumeration: enumeration exhausted");
  }
  return out;
}

// Shell construction: N_k = k v_k N_{k-1}, a_k = prod_j N_j^{-4},
// mu_ij = a_k f_k(ceil(i/(k N_{k-1})), ceil(j/(k N_{k-1}))) on shell k.
inline ChameleonModel chameleon_intensity(std::size_t k_max,
                                          const std::vector<SimpleGraph>& enumeration) {
  if (k_max < 1) throw parameter_error("chameleon_intensity: k_max >= 1");
  if (enumeration.size() < k_max) throw parameter_error("chameleon_intensity: enumeration too short");

  ChameleonModel model;
  model.shell_bounds.push_back(1);  // N_0
  double log_a = 0.0;
  std::map<std::uint64_t, double> entries;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const SimpleGraph& f = enumeration[k - 1];
    auto verts = f.vertices();
    std::uint64_t vk = verts.size();
    if (vk == 0) throw parameter_error("chameleon_intensity: graph without vertices");
    for (std::size_t idx = 0; idx < verts.size(); ++idx)
      if (verts[idx] != static_cast<label_t>(idx + 1))
        throw parameter_error("chameleon_intensity: enumeration graphs must use labels 1..v");
    std::uint64_t prev = model.shell_bounds.back();
    std::uint64_t nk = k * vk * prev;
    if (nk >= (1ULL << 31))
      throw capacity_error("chameleon_intensity: N_k overflows; maximal safe k is " +
                           std::to_string(k - 1));
    log_a += -4.0 * std::log(static_cast<double>(nk));
    std::uint64_t block = k * prev;
    std::uint64_t pair_budget = nk * nk / 2;
    if (pair_budget > 200'000'000ULL)
      throw capacity_error("chameleon_intensity: shell too large; maximal safe k is " +
                           std::to_string(k - 1));
    for (std::uint64_t i = 1; i <= nk; ++i) {
      for (std::uint64_t j = i + 1; j <= nk; ++j) {
        if (i <= prev && j <= prev) continue;  // shell condition: i v j > N_{k-1}
        label_t p = static_cast<label_t>((i + block - 1) / block);
        label_t q = static_cast<label_t>((j + block - 1) / block);
        if (p != q && f.has_edge(p, q))
          entries[pack_pair(static_cast<label_t>(i), static_cast<label_t>(j))] = log_a;
      }
    }
    model.shell_bounds.push_back(nk);
    model.log_a.push_back(log_a);
    model.probe_times.push_back(std::exp(std::log(static_cast<double>(nk)) - log_a));
    model.graphs.push_back(f);
  }
  model.mu = IntensityMatrix::from_entries(entries, /*log_values=*/true);
  return model;
}

}  // namespace edgex
