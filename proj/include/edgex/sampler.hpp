#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "edgex/errors.hpp"
#include "edgex/graph.hpp"
#include "edgex/intensity.hpp"
#include "edgex/rng.hpp"
#include "edgex/stats.hpp"

namespace edgex {

// Walker alias table for O(1) categorical draws over a static support.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    std::size_t n = weights.size();
    if (n == 0) throw degenerate_error("AliasTable: empty support");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw parameter_error("AliasTable: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw degenerate_error("AliasTable: zero mass");
    prob_.resize(n);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      std::size_t s = small.back(); small.pop_back();
      std::size_t l = large.back(); large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;
  }

  std::size_t sample(rng_t& rng) const {
    std::size_t n = prob_.size();
    double u = uniform01(rng) * static_cast<double>(n);
    auto idx = static_cast<std::size_t>(u);
    if (idx >= n) idx = n - 1;
    return (u - static_cast<double>(idx)) < prob_[idx] ? idx : alias_[idx];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

namespace detail {

// Fresh labels for blips and tail-reservoir vertices, well above any real label.
struct BlipAllocator {
  label_t next;
  explicit BlipAllocator(label_t label_max) : next(2 * std::max<label_t>(label_max, 1) + 1'000'000) {}
  label_t fresh() { return next++; }
};

inline double presence_prob(double t, double value, double log_value, bool log_mode) {
  double x = log_mode ? std::exp(std::log(t) + log_value) : t * value;
  return -std::expm1(-x);
}

// Endpoint sampler for the rank-1 law including its truncated tail: a draw
// beyond the retained support is reported as "tail" and realized by the
// caller as a fresh vertex (tail labels essentially never repeat at the
// scales where truncation is in use).
struct Rank1Endpoints {
  const IntensityMatrix::Rank1* r;
  AliasTable head;
  double p_tail;

  explicit Rank1Endpoints(const IntensityMatrix& mu)
      : r(&mu.rank1_data()), head(r->q.weights), p_tail(r->q.tail_mass / r->total) {}

  // returns label >= 1, or 0 for a tail draw
  label_t draw(rng_t& rng) {
    if (p_tail > 0.0 && uniform01(rng) < p_tail) return 0;
    return static_cast<label_t>(head.sample(rng)) + 1;
  }
};

}  // namespace detail

// tau_1 < ... < tau_m: partial sums of iid Exp(norm_mu).
inline std::vector<double> arrival_times(double norm_mu, std::uint64_t m, rng_t& rng) {
  if (!(norm_mu > 0.0)) throw parameter_error("arrival_times: norm_mu > 0");
  std::exponential_distribution<double> exp_dist(norm_mu);
  std::vector<double> out;
  out.reserve(m);
  double t = 0.0;
  for (std::uint64_t k = 0; k < m; ++k) {
    t += exp_dist(rng);
    out.push_back(t);
  }
  return out;
}

// Incremental iid-edge multigraph sampler; extending realizes the coupled
// process G~_1 c G~_2 c ... on a single growing object.
class MultigraphProcess {
 public:
  MultigraphProcess(const IntensityMatrix& mu, rng_t rng)
      : mu_(&mu), rng_(std::move(rng)), blips_(mu.label_max()) {
    if (mu.is_rank1()) {
      endpoints_.emplace(mu);
      max_prob_ = 0.0;
      const auto& r = mu.rank1_data();
      if (!r.sorted_q.empty()) {
        double top = r.sorted_q[0];
        double second = r.sorted_q.size() > 1 ? r.sorted_q[1] : 0.0;
        max_prob_ = std::max(r.loops ? top * top : 0.0, 2.0 * top * second) / mu.total_mass();
      }
    } else {
      std::vector<double> w;
      mu.for_each_entry([&](const IntensityMatrix::Entry& e) {
        keys_.push_back(pack_pair(e.i, e.j));
        w.push_back(e.value);
      });
      pair_alias_.emplace(w);
      double top = *std::max_element(w.begin(), w.end());
      max_prob_ = top / mu.total_mass();
    }
  }

  void extend(std::uint64_t more_edges) {
    if (max_prob_ > 0.0 &&
        static_cast<double>(drawn_ + more_edges) * max_prob_ > 4.6e18)
      throw capacity_error("MultigraphProcess: multiplicity may overflow the count type");
    for (std::uint64_t k = 0; k < more_edges; ++k) draw_edge();
    drawn_ += more_edges;
  }

  const MultiGraph& graph() const { return g_; }

 private:
  void draw_edge() {
    if (endpoints_) {
      const auto& r = mu_->rank1_data();
      for (;;) {
        label_t a = endpoints_->draw(rng_);
        label_t b = endpoints_->draw(rng_);
        if (a == b && a != 0) {
          if (!r.loops) continue;  // loopless law: condition on i != j
          g_.add_edge(a, a);
          return;
        }
        if (a != 0 && b != 0) {
          g_.add_edge(a, b);
        } else if (a == 0 && b == 0) {
          g_.blip_edges.push_back({BlipEdge::Kind::dust_edge, 0, blips_.fresh(), blips_.fresh()});
        } else {
          g_.blip_edges.push_back({BlipEdge::Kind::star, a == 0 ? b : a, blips_.fresh(), 0});
        }
        return;
      }
    }
    auto [i, j] = unpack_pair(keys_[pair_alias_->sample(rng_)]);
    if (i >= 1) {
      g_.add_edge(i, j);
    } else if (i == 0 && j >= 1) {
      g_.blip_edges.push_back({BlipEdge::Kind::star, j, blips_.fresh(), 0});
    } else if (i == 0 && j == 0) {
      g_.blip_edges.push_back({BlipEdge::Kind::dust_loop, 0, blips_.fresh(), 0});
    } else {  // {0,-1}
      g_.blip_edges.push_back({BlipEdge::Kind::dust_edge, 0, blips_.fresh(), blips_.fresh()});
    }
  }

  const IntensityMatrix* mu_;
  rng_t rng_;
  detail::BlipAllocator blips_;
  std::optional<detail::Rank1Endpoints> endpoints_;
  std::optional<AliasTable> pair_alias_;
  std::vector<std::uint64_t> keys_;
  MultiGraph g_;
  std::uint64_t drawn_ = 0;
  double max_prob_ = 0.0;
};

// m iid edges from mu / ||mu||.
inline MultiGraph sample_iid_multigraph(const IntensityMatrix& mu, std::uint64_t m, rng_t& rng) {
  MultigraphProcess proc(mu, rng_t(rng()));
  proc.extend(m);
  return proc.graph();
}

// Poisson(t mu_ij) multiplicities, independent across pairs.
inline MultiGraph sample_poisson_multigraph(const IntensityMatrix& mu, double t, rng_t& rng) {
  if (!(t >= 0.0)) throw parameter_error("sample_poisson_multigraph: t >= 0");
  MultiGraph g;
  if (t == 0.0) return g;
  if (mu.is_rank1()) {
    std::poisson_distribution<std::uint64_t> po(t * mu.total_mass());
    MultigraphProcess proc(mu, rng_t(rng()));
    proc.extend(po(rng));
    return proc.graph();
  }
  detail::BlipAllocator blips(mu.label_max());
  mu.for_each_entry([&](const IntensityMatrix::Entry& e) {
    double rate = mu.log_values() ? std::exp(std::log(t) + e.log_value) : t * e.value;
    std::uint64_t k = rate > 0 ? std::poisson_distribution<std::uint64_t>(rate)(rng) : 0;
    if (k == 0) return;
    if (e.i >= 1) {
      g.add_edge(e.i, e.j, k);
    } else if (e.i == 0 && e.j >= 1) {
      for (std::uint64_t c = 0; c < k; ++c)
        g.blip_edges.push_back({BlipEdge::Kind::star, e.j, blips.fresh(), 0});
    } else if (e.i == 0 && e.j == 0) {
      for (std::uint64_t c = 0; c < k; ++c)
        g.blip_edges.push_back({BlipEdge::Kind::dust_loop, 0, blips.fresh(), 0});
    } else {
      for (std::uint64_t c = 0; c < k; ++c)
        g.blip_edges.push_back({BlipEdge::Kind::dust_edge, 0, blips.fresh(), blips.fresh()});
    }
  });
  return g;
}

// Simple graph at time t: each positive off-diagonal pair independently with
// probability 1 - exp(-t mu_ij); star/dust columns contribute their Poisson
// numbers of (always simple) edges; loops dropped. For rank-1 supports too
// large to enumerate this routes through the Poissonized multigraph, which
// has the same presence law.
inline SimpleGraph sample_presence(const IntensityMatrix& mu, double t, rng_t& rng) {
  if (!(t >= 0.0)) throw parameter_error("sample_presence: t >= 0");
  SimpleGraph g;
  if (t == 0.0) return g;
  if (mu.is_rank1() && mu.entry_count() > 2'000'000ULL)
    return simplify(sample_poisson_multigraph(mu, t, rng));

  detail::BlipAllocator blips(mu.label_max());
  mu.for_each_entry([&](const IntensityMatrix::Entry& e) {
    if (e.i >= 1) {
      if (e.i == e.j) return;
      double p = detail::presence_prob(t, e.value, e.log_value, mu.log_values());
      if (uniform01(rng) < p) g.add_edge(e.i, e.j);
      return;
    }
    double rate = mu.log_values() ? std::exp(std::log(t) + e.log_value) : t * e.value;
    std::uint64_t k = rate > 0 ? std::poisson_distribution<std::uint64_t>(rate)(rng) : 0;
    if (e.i == 0 && e.j >= 1) {
      for (std::uint64_t c = 0; c < k; ++c) g.add_edge(e.j, blips.fresh());
    } else if (e.i == 0 && e.j == -1) {
      for (std::uint64_t c = 0; c < k; ++c) {
        label_t a = blips.fresh();
        g.add_edge(a, blips.fresh());
      }
    }
    // {0,0} dust loops disappear in the simple graph
  });
  if (mu.is_rank1()) {
    // tail overlay: Poisson numbers of head-tail and tail-tail edges
    const auto& r = mu.rank1_data();
    double tm = r.q.tail_mass;
    if (tm > 0.0) {
      double head_sum = r.total - tm;
      std::uint64_t k_ht = std::poisson_distribution<std::uint64_t>(2.0 * t * tm * head_sum)(rng);
      if (k_ht > 0) {
        AliasTable head(r.q.weights);
        for (std::uint64_t c = 0; c < k_ht; ++c)
          g.add_edge(static_cast<label_t>(head.sample(rng)) + 1, blips.fresh());
      }
      std::uint64_t k_tt = std::poisson_distribution<std::uint64_t>(t * tm * tm)(rng);
      for (std::uint64_t c = 0; c < k_tt; ++c) {
        label_t a = blips.fresh();
        g.add_edge(a, blips.fresh());
      }
    }
  }
  return g;
}

// Presence restricted to labels <= cap (exact: distinct pairs are independent,
// so the restriction of Gamma_t is the presence sample of the restricted
// matrix). `present` also records labels <= cap that are only reached by
// edges beyond the cap, so callers can reconstruct vertex ranks.
struct PresenceWindow {
  SimpleGraph graph;
  std::vector<label_t> present;  // ascending labels <= cap that are vertices of Gamma_t
};

inline PresenceWindow sample_presence_window(const IntensityMatrix& mu, double t, label_t cap,
                                             rng_t& rng) {
  if (!(t >= 0.0)) throw parameter_error("sample_presence_window: t >= 0");
  if (cap < 1) throw parameter_error("sample_presence_window: cap >= 1");
  PresenceWindow w;
  std::vector<double> inside_rate(static_cast<std::size_t>(cap) + 1, 0.0);
  if (mu.is_rank1()) {
    const auto& r = mu.rank1_data();
    label_t n = std::min<label_t>(cap, static_cast<label_t>(r.q.size()));
    for (label_t i = 1; i <= n; ++i) {
      double qi = r.q.q(static_cast<std::size_t>(i));
      if (qi <= 0.0) continue;
      for (label_t j = i + 1; j <= n; ++j) {
        double qj = r.q.q(static_cast<std::size_t>(j));
        if (qj <= 0.0) continue;
        double x = 2.0 * t * qi * qj;
        inside_rate[i] += 2.0 * qi * qj;
        inside_rate[j] += 2.0 * qi * qj;
        if (uniform01(rng) < -std::expm1(-x)) w.graph.add_edge(i, j);
      }
    }
  } else {
    mu.for_each_entry([&](const IntensityMatrix::Entry& e) {
      if (e.i < 1 || e.i > cap || e.j > cap || e.i == e.j) return;
      inside_rate[e.i] += e.value;
      inside_rate[e.j] += e.value;
      double p = detail::presence_prob(t, e.value, e.log_value, mu.log_values());
      if (uniform01(rng) < p) w.graph.add_edge(e.i, e.j);
    });
  }
  auto deg = w.graph.degrees();
  for (label_t i = 1; i <= cap; ++i) {
    double residual = std::max(0.0, mu.vertex_intensity(i) - inside_rate[i]);
    bool inside = deg.count(i) > 0;
    if (inside || uniform01(rng) < -std::expm1(-t * residual)) w.present.push_back(i);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Process models

struct HollywoodSpec {
  double alpha = 0.0;
  double theta = 1.0;
  // nu: pmf over edge sizes 1,2,...; empty means the graph case (constant 2)
  std::vector<double> size_pmf;
  std::uint64_t m = 0;

  void validate() const {
    bool regime1 = alpha >= 0.0 && alpha <= 1.0 && theta > -alpha;
    bool regime2 = false;
    if (alpha < 0.0 && theta > 0.0) {
      double N = theta / -alpha;
      regime2 = std::abs(N - std::round(N)) < 1e-9 && N >= 1.0;
    }
    if (!regime1 && !regime2)
      throw parameter_error("HollywoodSpec: (alpha, theta) outside both CRP regimes");
  }
};

// Two-parameter Chinese restaurant process; customers grouped into edges of
// iid sizes drawn from nu; tables become vertex labels in seating order.
inline MultiHyperGraph hollywood_sample(const HollywoodSpec& spec, rng_t& rng) {
  spec.validate();
  std::optional<AliasTable> size_alias;
  if (!spec.size_pmf.empty()) size_alias.emplace(spec.size_pmf);

  std::vector<double> counts;  // customers per table
  double total = 0.0;
  MultiHyperGraph g;
  g.edges.reserve(spec.m);
  for (std::uint64_t e = 0; e < spec.m; ++e) {
    std::uint64_t size = size_alias ? size_alias->sample(rng) + 1 : 2;
    std::vector<label_t> edge;
    edge.reserve(size);
    for (std::uint64_t c = 0; c < size; ++c) {
      double denom = total + spec.theta;
      double u = uniform01(rng) * denom;
      double acc = 0.0;
      label_t table = 0;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        acc += counts[i] - spec.alpha;
        if (u < acc) { table = static_cast<label_t>(i) + 1; break; }
      }
      if (table == 0) {  // new table, probability (theta + k alpha)/(n + theta)
        counts.push_back(0.0);
        table = static_cast<label_t>(counts.size());
      }
      counts[static_cast<std::size_t>(table - 1)] += 1.0;
      total += 1.0;
      edge.push_back(table);
    }
    std::sort(edge.begin(), edge.end());
    g.edges.push_back(std::move(edge));
  }
  return g;
}

// Polya-urn multigraph on a fixed table set [N]: seat 2m customers with
// probability (n_i + alpha)/(n + N alpha), pair consecutive customers.
inline MultiGraph pittel_sample(std::uint64_t N, double alpha, std::uint64_t m, rng_t& rng) {
  if (N < 2) throw parameter_error("pittel_sample: N >= 2");
  if (!(alpha > 0.0)) throw parameter_error("pittel_sample: alpha > 0");
  std::vector<double> counts(N, 0.0);
  double total = 0.0;
  auto seat = [&]() {
    double denom = total + static_cast<double>(N) * alpha;
    double u = uniform01(rng) * denom;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      acc += counts[i] + alpha;
      if (u < acc) { counts[i] += 1.0; total += 1.0; return static_cast<label_t>(i) + 1; }
    }
    counts[N - 1] += 1.0; total += 1.0;
    return static_cast<label_t>(N);
  };
  MultiGraph g;
  for (std::uint64_t e = 0; e < m; ++e) {
    label_t a = seat();
    label_t b = seat();
    g.add_edge(a, b);
  }
  return g;
}

// Uniform matching of labelled half-edges.
inline MultiGraph configuration_model(const std::vector<std::uint64_t>& degrees, rng_t& rng) {
  std::uint64_t total = 0;
  for (auto d : degrees) total += d;
  if (total % 2 != 0) throw parity_error("configuration_model: odd half-edge total");
  std::vector<label_t> stubs;
  stubs.reserve(total);
  for (std::size_t i = 0; i < degrees.size(); ++i)
    for (std::uint64_t c = 0; c < degrees[i]; ++c) stubs.push_back(static_cast<label_t>(i) + 1);
  std::shuffle(stubs.begin(), stubs.end(), rng);
  MultiGraph g;
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) g.add_edge(stubs[k], stubs[k + 1]);
  return g;
}

// ---------------------------------------------------------------------------
// Conditional law vs configuration model

struct ConfigEquivalenceReport {
  struct Bin {
    std::vector<std::uint64_t> degrees;
    std::uint64_t count = 0;
    double tv = 0.0;
  };
  std::vector<Bin> bins;
  double max_tv = 0.0;
  double chi_square_p = 1.0;
  std::uint64_t min_bin = 0;
  bool inconclusive = false;
};

namespace detail {

inline std::string multigraph_key(const MultiGraph& g) {
  std::vector<std::uint64_t> ks;
  ks.reserve(g.multiplicities.size());
  for (auto& [k, c] : g.multiplicities) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  std::string out;
  for (auto k : ks) {
    auto [i, j] = unpack_pair(k);
    out += std::to_string(i) + "," + std::to_string(j) + ":" +
           std::to_string(g.multiplicities.at(k)) + ";";
  }
  return out;
}

}  // namespace detail

// Samples G~_m from a rank-1 matrix with loops, bins by (labelled) degree
// sequence, and checks each frequent bin against fresh configuration-model
// samples of the same degree sequence.
inline ConfigEquivalenceReport verify_config_equivalence(const IntensityMatrix& mu,
                                                         std::uint64_t m, std::uint64_t seeds,
                                                         std::uint64_t seed,
                                                         std::uint64_t min_bin = 2500) {
  if (!mu.is_rank1() || !mu.rank1_data().loops)
    throw parameter_error("verify_config_equivalence: rank-1 matrix with loops required");
  auto n = static_cast<std::size_t>(mu.label_max());

  std::map<std::vector<std::uint64_t>, std::map<std::string, std::uint64_t>> bins;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    auto rng = make_stream(seed, s, 0);
    MultiGraph g = sample_iid_multigraph(mu, m, rng);
    std::vector<std::uint64_t> deg(n, 0);
    for (auto& [k, c] : g.multiplicities) {
      auto [i, j] = unpack_pair(k);
      deg[static_cast<std::size_t>(i - 1)] += c;
      deg[static_cast<std::size_t>(j - 1)] += c;
    }
    bins[deg][detail::multigraph_key(g)] += 1;
  }

  ConfigEquivalenceReport report;
  report.min_bin = min_bin;
  double chi_stat = 0.0;
  double chi_df = 0.0;
  std::uint64_t bin_index = 0;
  for (auto& [deg, law] : bins) {
    std::uint64_t count = 0;
    for (auto& [k, c] : law) count += c;
    ++bin_index;
    if (count < min_bin) continue;
    std::map<std::string, std::uint64_t> config_law;
    auto rng = make_stream(seed, bin_index, 1);
    for (std::uint64_t s = 0; s < count; ++s) {
      MultiGraph g = configuration_model(deg, rng);
      config_law[detail::multigraph_key(g)] += 1;
    }
    ConfigEquivalenceReport::Bin b;
    b.degrees = deg;
    b.count = count;
    b.tv = tv_distance(law, config_law);
    report.max_tv = std::max(report.max_tv, b.tv);
    report.bins.push_back(std::move(b));
    // pooled homogeneity statistic across bins
    std::map<std::string, std::pair<double, double>> cells;
    for (auto& [k, c] : law) cells[k].first = static_cast<double>(c);
    for (auto& [k, c] : config_law) cells[k].second = static_cast<double>(c);
    std::size_t used = 0;
    for (auto& [k, c] : cells) {
      double tot = c.first + c.second;
      if (tot < 10) continue;
      chi_stat += (c.first - tot / 2) * (c.first - tot / 2) / (tot / 2);
      chi_stat += (c.second - tot / 2) * (c.second - tot / 2) / (tot / 2);
      ++used;
    }
    if (used > 1) chi_df += static_cast<double>(used - 1);
  }
  if (report.bins.empty()) {
    report.inconclusive = true;
    return report;
  }
  report.chi_square_p = chi_df > 0 ? chi_squared_sf(chi_stat, chi_df) : 1.0;
  return report;
}

}  // namespace edgex
