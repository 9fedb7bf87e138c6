#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "edgex/analytics.hpp"
#include "edgex/graphlimit.hpp"
#include "edgex/intensity.hpp"
#include "edgex/rng.hpp"
#include "edgex/sampler.hpp"
#include "edgex/stats.hpp"
#include "edgex/weights.hpp"

namespace edgex::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string detail;
  bool pass = false;
  double seconds = 0.0;
};

enum class Suite { quick, full };

namespace detail {

using edgex::detail::multigraph_key;

inline WeightSeq power_law_1e6(std::size_t n = 1'000'000) {
  WeightFamilySpec spec;
  spec.family = PowerLawFamily{2.0};
  spec.truncation_count = n;
  return weights_family(spec);
}

// Labelled multigraph law key up to vertex relabelling (n small).
inline std::string canonical_multigraph_key(const MultiGraph& g, std::size_t n) {
  std::vector<label_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<label_t>(i) + 1;
  std::string best;
  do {
    std::map<std::uint64_t, std::uint64_t> relabelled;
    for (auto& [k, c] : g.multiplicities) {
      auto [i, j] = unpack_pair(k);
      relabelled[pack_pair(perm[static_cast<std::size_t>(i - 1)],
                           perm[static_cast<std::size_t>(j - 1)])] += c;
    }
    std::string key;
    for (auto& [k, c] : relabelled) {
      auto [i, j] = unpack_pair(k);
      key += std::to_string(i) + "," + std::to_string(j) + ":" + std::to_string(c) + ";";
    }
    if (best.empty() || key < best) best = key;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::string presence_key(const SimpleGraph& g) {
  std::string key;
  for (auto [i, j] : g.sorted_edges())
    key += std::to_string(i) + "," + std::to_string(j) + ";";
  return key;
}

struct Runner {
  std::uint64_t seed;
  Suite suite;
  std::ostream* out;
  std::vector<CriterionResult> results;

  bool full() const { return suite == Suite::full; }

  template <typename F>
  void criterion(int id, const std::string& name, F&& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    r.pass = body(detail);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.detail = detail.str();
    if (out) {
      (*out) << (r.pass ? "PASS" : "FAIL") << " criterion " << id << " [" << name << "] "
             << r.detail << " (" << r.seconds << "s)\n";
      out->flush();
    }
    results.push_back(std::move(r));
  }
};

}  // namespace detail

// The acceptance battery. `full` runs the criteria at their stated scales;
// `quick` runs the same checks at reduced replicate counts as a smoke suite.
inline std::vector<CriterionResult> run_acceptance(Suite suite, std::uint64_t seed = 20240801,
                                                   std::ostream* out = nullptr) {
  detail::Runner R{seed, suite, out, {}};
  const bool full = R.full();

  // 1. formula oracles vs dense brute force
  R.criterion(1, "formula_oracles", [&](std::ostringstream& msg) {
    auto rng = make_stream(seed, 1, 0);
    double worst = 0.0;
    int matrices = full ? 50 : 20;
    for (int m = 0; m < matrices; ++m) {
      std::uniform_int_distribution<int> nlab(4, 40);
      int n = nlab(rng);
      std::uniform_int_distribution<int> nent(1, 1000);
      int want = nent(rng);
      std::map<std::uint64_t, double> entries;
      std::uniform_int_distribution<int> lab(1, n);
      std::uniform_real_distribution<double> val(0.05, 2.0);
      for (int k = 0; k < want; ++k) entries[pack_pair(lab(rng), lab(rng))] = val(rng);
      auto mu = IntensityMatrix::from_entries(entries);
      std::uniform_real_distribution<double> tdist(0.1, 3.0);
      double t = tdist(rng);
      // dense oracle with plain exp
      std::vector<std::vector<double>> dense(n + 1, std::vector<double>(n + 1, 0.0));
      for (auto& [k, v] : entries) {
        auto [i, j] = unpack_pair(k);
        dense[i][j] = v;
        dense[j][i] = v;
      }
      double v_oracle = 0.0, e_oracle = 0.0, var_oracle = 0.0;
      for (int i = 1; i <= n; ++i) {
        double mi = 0.0;
        for (int j = 1; j <= n; ++j) mi += dense[i][j];
        if (mi > 0) v_oracle += 1.0 - std::exp(-mi * t);
        for (int j = i + 1; j <= n; ++j)
          if (dense[i][j] > 0) {
            double p = 1.0 - std::exp(-dense[i][j] * t);
            e_oracle += p;
            var_oracle += (1.0 - p) * p;
          }
      }
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
      worst = std::max({worst, rel(expected_vertices(mu, t), v_oracle),
                        rel(expected_edges(mu, t), e_oracle),
                        rel(edge_count_variance(mu, t), var_oracle)});
    }
    msg << "max rel err " << worst << " over " << matrices << " matrices (tol 1e-12)";
    return worst <= 1e-12;
  });

  // 2. sampler bridges on a 3-pair matrix
  R.criterion(2, "sampler_bridges", [&](std::ostringstream& msg) {
    std::map<std::uint64_t, double> entries{{pack_pair(1, 2), 0.5},
                                            {pack_pair(1, 3), 0.3},
                                            {pack_pair(2, 3), 0.2}};
    auto mu = IntensityMatrix::from_entries(entries);
    double t = 2.0;
    std::uint64_t n = full ? 100'000 : 20'000;
    std::map<std::string, std::uint64_t> law_fixed, law_poisson, law_simplified, law_presence;
    for (std::uint64_t s = 0; s < n; ++s) {
      auto rng = make_stream(seed, s, 20);
      std::poisson_distribution<std::uint64_t> po(t * mu.total_mass());
      law_fixed[detail::multigraph_key(sample_iid_multigraph(mu, po(rng), rng))]++;
      auto rng2 = make_stream(seed, s, 21);
      MultiGraph g = sample_poisson_multigraph(mu, t, rng2);
      law_poisson[detail::multigraph_key(g)]++;
      law_simplified[detail::presence_key(simplify(g))]++;
      auto rng3 = make_stream(seed, s, 22);
      law_presence[detail::presence_key(sample_presence(mu, t, rng3))]++;
    }
    double pa = chi_square_two_sample_p(law_fixed, law_poisson);
    double pb = chi_square_two_sample_p(law_simplified, law_presence);
    msg << "p_fixed_vs_poisson " << pa << ", p_simplify_vs_presence " << pb << " (need > 0.01)";
    return pa > 0.01 && pb > 0.01;
  });

  // 3. conditional law vs configuration model
  R.criterion(3, "configuration_model_conditional", [&](std::ostringstream& msg) {
    std::uint64_t n = full ? 100'000 : 20'000;
    double worst = 0.0;
    for (auto& weights : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.6, 0.3, 0.1}}) {
      WeightSeq q{weights, 0.0, "explicit"};
      auto mu = build_rank1(q, /*loops=*/true);
      auto report = verify_config_equivalence(mu, 2, n, seed ^ 0x33, full ? 2500 : 800);
      if (report.inconclusive) return false;
      worst = std::max(worst, report.max_tv);
    }
    msg << "max conditional TV " << worst << " (tol 0.02)";
    return worst <= 0.02;
  });

  // 4. Hollywood(-a, Na) vs Pittel urn
  R.criterion(4, "hollywood_pittel_equivalence", [&](std::ostringstream& msg) {
    std::uint64_t n = full ? 100'000 : 20'000;
    std::map<std::string, std::uint64_t> law_h, law_p;
    HollywoodSpec spec;
    spec.alpha = -1.0;
    spec.theta = 2.0;
    spec.m = 2;
    for (std::uint64_t s = 0; s < n; ++s) {
      auto rng = make_stream(seed, s, 40);
      auto h = hollywood_sample(spec, rng);
      MultiGraph gh;
      for (auto& e : h.edges) gh.add_edge(e[0], e[1]);
      law_h[detail::canonical_multigraph_key(gh, 2)]++;
      auto rng2 = make_stream(seed, s, 41);
      law_p[detail::canonical_multigraph_key(pittel_sample(2, 1.0, 2, rng2), 2)]++;
    }
    double tv = tv_distance(law_h, law_p);
    msg << "TV " << tv << " (tol 0.02)";
    return tv <= 0.02;
  });

  // 5. law of large numbers for v and e (power law, gamma = 2)
  R.criterion(5, "vertex_edge_lln", [&](std::ostringstream& msg) {
    auto mu = build_rank1(detail::power_law_1e6(), false);
    double t = 1e5;
    double vt = expected_vertices(mu, t), et = expected_edges(mu, t);
    std::uint64_t reps = full ? 30 : 10;
    MeanVar dv, de;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
      auto rng = make_stream(seed, rep, 50);
      SimpleGraph g = sample_presence(mu, t, rng);
      dv.add(std::abs(static_cast<double>(g.vertex_count()) / vt - 1.0));
      de.add(std::abs(static_cast<double>(g.edge_count()) / et - 1.0));
    }
    msg << "mean |v/v(t)-1| " << dv.mean << ", mean |e/e(t)-1| " << de.mean << " (tol 0.1)";
    return dv.mean <= 0.1 && de.mean <= 0.1;
  });

  // 6. degree power-law band, exponent 2
  R.criterion(6, "powerlaw_band", [&](std::ostringstream& msg) {
    auto mu = build_rank1(detail::power_law_1e6(), false);
    std::vector<DegreeTail> tails;
    std::size_t gi = 0;
    for (double t : {1e3, 1e4, 1e5}) {
      auto rng = make_stream(seed, 0, 60 + gi++);
      tails.push_back(degree_tail(sample_presence(mu, t, rng)));
    }
    auto band = powerlaw_band_check(tails, 0.05, 50.0);
    msg << "C/c " << band.ratio << " (cap 50)";
    return band.pass;
  });

  // 7. growth exponents t^{1/2} and t^{1/2} log t
  R.criterion(7, "growth_exponents", [&](std::ostringstream& msg) {
    auto mu = build_rank1(detail::power_law_1e6(), false);
    std::vector<double> grid = full ? std::vector<double>{1e3, 1e4, 1e5, 1e6}
                                    : std::vector<double>{1e3, 1e4, 1e5};
    std::uint64_t reps = full ? 10 : 4;
    std::vector<double> v_norm, e_norm;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      MeanVar mv, me;
      for (std::uint64_t rep = 0; rep < reps; ++rep) {
        auto rng = make_stream(seed, rep, 70 + gi);
        SimpleGraph g = sample_presence(mu, grid[gi], rng);
        mv.add(static_cast<double>(g.vertex_count()));
        me.add(static_cast<double>(g.edge_count()));
      }
      v_norm.push_back(mv.mean / std::sqrt(grid[gi]));
      e_norm.push_back(me.mean / (std::sqrt(grid[gi]) * std::log(grid[gi])));
    }
    auto band = [](const std::vector<double>& xs) {
      return *std::max_element(xs.begin(), xs.end()) / *std::min_element(xs.begin(), xs.end());
    };
    msg << "v band " << band(v_norm) << ", e band " << band(e_norm) << " (cap 3)";
    return band(v_norm) <= 3.0 && band(e_norm) <= 3.0;
  });

  // 8. complete graph K_6 at the factorial schedule
  R.criterion(8, "factorial_complete_graph", [&](std::ostringstream& msg) {
    auto mu = factorial_intensity(6);
    double t6 = factorial_schedule_t(6);
    int hits = 0, n = 100;
    for (int s = 0; s < n; ++s) {
      auto rng = make_stream(seed, static_cast<std::uint64_t>(s), 80);
      SimpleGraph g = sample_presence(mu, t6, rng);
      if (g.edge_count() == 15 && g.vertex_count() == 6) ++hits;
    }
    msg << hits << "/100 samples equal K_6 (need >= 99)";
    return hits >= 99;
  });

  // 9. half-graphon convergence for geometric weights
  R.criterion(9, "halfgraphon_convergence", [&](std::ostringstream& msg) {
    WeightFamilySpec spec;
    spec.family = GeometricFamily{2.0};
    spec.truncation_count = 60;
    auto mu = build_rank1(weights_family(spec), false);
    std::uint64_t reps = full ? 50 : 15;
    auto mean_dcut = [&](int nexp, std::uint64_t lane) {
      MeanVar acc;
      for (std::uint64_t rep = 0; rep < reps; ++rep) {
        auto rng = make_stream(seed, rep, lane);
        SimpleGraph g = sample_presence(mu, std::pow(2.0, nexp), rng);
        auto rep_d = dcut_upper(empirical_graphon(g), AnalyticGraphon::half_graphon(), 64, rng);
        acc.add(rep_d.dcut_upper);
      }
      return acc.mean;
    };
    double d12 = mean_dcut(12, 90);
    double d20 = mean_dcut(20, 91);
    msg << "mean dcut n=12: " << d12 << ", n=20: " << d20 << " (need n20 <= 0.25 and < n12)";
    return d20 <= 0.25 && d20 < d12;
  });

  // 10. chameleon probe at k = 3
  R.criterion(10, "chameleon_blowup", [&](std::ostringstream& msg) {
    auto model = chameleon_intensity(3, canonical_graph_enumeration(3));
    double t3 = model.probe_times[2];
    std::uint64_t n2 = model.shell_bounds[2], n3 = model.shell_bounds[3];
    std::uint64_t bs = 3 * n2;  // shell-3 block size k * N_{k-1}
    const auto& f3 = model.graphs[2];
    int hits = 0, n = 100;
    for (int s = 0; s < n; ++s) {
      auto rng = make_stream(seed, static_cast<std::uint64_t>(s), 100);
      SimpleGraph g = sample_presence(model.mu, t3, rng);
      bool ok = true;
      for (std::uint64_t i = 1; i <= n3 && ok; ++i)
        for (std::uint64_t j = i + 1; j <= n3; ++j) {
          if (i <= n2 && j <= n2) continue;
          auto p = static_cast<label_t>((i + bs - 1) / bs);
          auto q = static_cast<label_t>((j + bs - 1) / bs);
          bool want = p != q && f3.has_edge(p, q);
          if (g.has_edge(static_cast<label_t>(i), static_cast<label_t>(j)) != want) {
            ok = false;
            break;
          }
        }
      if (ok) ++hits;
    }
    msg << hits << "/100 samples match the blow-up outside I_2^2 (need >= 95)";
    return hits >= 95;
  });

  // 11. CLT for the edge count
  R.criterion(11, "edge_count_clt", [&](std::ostringstream& msg) {
    auto mu = build_rank1(detail::power_law_1e6(), false);
    auto res = normality_check(mu, 1e4, full ? 500 : 200, seed ^ 0x110, 0.08);
    msg << "KS " << res.ks << " (tol 0.08, sigma^2 " << res.variance << ")";
    return res.pass && !res.inconclusive;
  });

  // 12. extremely sparse regimes: bounded-degree band and slow weights
  R.criterion(12, "extremely_sparse_regimes", [&](std::ostringstream& msg) {
    auto band = band_intensity(2, 0, [](label_t i, label_t j) {
      return std::pow(2.0, -static_cast<double>(std::max(i, j)));
    });
    bool band_ok = true;
    double band_lo = 2.0, band_hi = 0.0;
    std::size_t gi = 0;
    for (double t : {1e1, 1e2, 1e3, 1e4, 1e5, 1e6}) {
      auto rng = make_stream(seed, 0, 120 + gi++);
      SimpleGraph g = sample_presence(band, t, rng);
      if (g.edge_count() == 0) continue;
      double ratio = static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
      band_lo = std::min(band_lo, ratio);
      band_hi = std::max(band_hi, ratio);
      if (ratio < 0.5 || ratio > 1.0) band_ok = false;
    }

    WeightFamilySpec spec;
    spec.family = SlowLogFamily{};
    spec.truncation_count = 1'000'000;
    auto mu = build_rank1(weights_family(spec), false);
    std::uint64_t reps = full ? 10 : 3;
    MeanVar ratio_acc, frac_acc;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
      auto rng = make_stream(seed, rep, 130);
      SimpleGraph g = sample_presence(mu, 1e6, rng);
      ratio_acc.add(static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count()));
      std::uint64_t low = 0;
      for (auto [i, j] : g.sorted_edges())
        if (std::min(i, j) <= 100) ++low;
      frac_acc.add(static_cast<double>(low) / static_cast<double>(g.edge_count()));
    }
    msg << "band e/v in [" << band_lo << "," << band_hi << "], slow_log e/v " << ratio_acc.mean
        << " (need [1.0,1.3]), low-label edge fraction " << frac_acc.mean << " (need >= 0.5)";
    return band_ok && ratio_acc.mean >= 1.0 && ratio_acc.mean <= 1.3 && frac_acc.mean >= 0.5;
  });

  // 13. stretched-graphon window comparison
  R.criterion(13, "graphex_window_comparison", [&](std::ostringstream& msg) {
    auto mu = build_rank1(detail::power_law_1e6(), false);
    double t = 1e6, gamma = 2.0, window = 5.0, r = 1.0;
    double s = std::pow(t, 1.0 / (2.0 * gamma));
    double c = mu.rank1_data().q.q(1);
    auto cap = static_cast<label_t>(std::ceil(s * window)) + 64;
    auto ref = AnalyticGraphon::power_tail(c, gamma);
    std::uint64_t seeds_n = full ? 20'000 : 2'000;
    std::vector<SimpleGraph> emp, refs;
    emp.reserve(seeds_n);
    refs.reserve(seeds_n);
    for (std::uint64_t sd = 0; sd < seeds_n; ++sd) {
      auto rng = make_stream(seed, sd, 131);
      auto win = sample_presence_window(mu, t, cap, rng);
      emp.push_back(sample_gr_window(stretched_graphon(win, s), r, window, rng).graph);
      auto rng2 = make_stream(seed, sd, 132);
      refs.push_back(sample_gr_window(ref, r, window, rng2).graph);
    }
    double worst = 0.0;
    std::ostringstream parts;
    for (auto& d : subgraph_stats_distance(emp, refs))
      if (d.stat == "vertices" || d.stat == "edges") {
        worst = std::max(worst, d.rel_diff);
        parts << d.stat << " " << d.rel_diff << " ";
      }
    msg << "mean rel diffs: " << parts.str() << "(tol 0.15)";
    return worst <= 0.15;
  });

  // 14. heuristic cut norm meets the exhaustive value
  R.criterion(14, "cutnorm_exactness", [&](std::ostringstream& msg) {
    auto rng = make_stream(seed, 14, 0);
    int matrices = full ? 100 : 30;
    double worst = 0.0;
    for (int m = 0; m < matrices; ++m) {
      std::uniform_int_distribution<std::size_t> kd(2, 12);
      std::size_t k = kd(rng);
      std::vector<double> delta(k * k), measures(k);
      std::uniform_real_distribution<double> vd(-1.0, 1.0), md(0.1, 1.0);
      for (std::size_t i = 0; i < k; ++i) {
        measures[i] = md(rng);
        for (std::size_t j = 0; j <= i; ++j)
          delta[i * k + j] = delta[j * k + i] = vd(rng);
      }
      auto exact = cut_norm_estimate(delta, measures, 0, rng);
      auto heur = cut_norm_estimate(delta, measures, 256, rng, /*force_heuristic=*/true);
      worst = std::max(worst, std::abs(exact.lower_bound - heur.lower_bound));
    }
    msg << "max |exhaustive - heuristic| " << worst << " over " << matrices << " matrices";
    return worst <= 1e-9;
  });

  // 15. dust and attached stars dominate
  R.criterion(15, "dust_domination", [&](std::ostringstream& msg) {
    std::map<std::uint64_t, double> entries{
        {pack_pair(1, 2), 1.0}, {pack_pair(2, 3), 1.0}, {pack_pair(3, 4), 1.0},
        {pack_pair(0, 1), 1.0}, {pack_pair(0, 0), 0.05}, {pack_pair(0, -1), 0.05}};
    auto mu = IntensityMatrix::from_entries(entries);
    MeanVar acc;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
      auto rng = make_stream(seed, rep, 150);
      MultiGraph g = sample_poisson_multigraph(mu, 1e4, rng);
      auto dec = decompose(g);
      double fringe = static_cast<double>(dec.star_edge_total() + dec.dust_edges);
      double central = static_cast<double>(simplify(dec.central).edge_count());
      acc.add(fringe / (fringe + central));
    }
    msg << "star/dust edge fraction " << acc.mean << " (need >= 0.9)";
    return acc.mean >= 0.9;
  });

  return R.results;
}

}  // namespace edgex::verify
