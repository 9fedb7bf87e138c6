#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "edgex/errors.hpp"
#include "edgex/graph.hpp"
#include "edgex/intensity.hpp"
#include "edgex/rng.hpp"
#include "edgex/sampler.hpp"
#include "edgex/stats.hpp"

namespace edgex {

namespace detail {

// sum over retained pairs i<j of f(t mu_ij) for a rank-1 matrix, where f is
// phi(x) = 1-e^-x or psi(x) = e^-x (1-e^-x). Rows are split by the size of
// x = 2 t q_i q_j against the sorted weights: x >= x_hi uses the saturated
// value, x <= x_lo uses the quadratic expansion via suffix sums (per-term
// error <= x^3), and the middle band is evaluated directly.
struct Rank1PairSum {
  static constexpr double x_hi = 37.0;   // e^-37 ~ 8.5e-17
  static constexpr double x_lo = 1e-4;

  // phi: saturated value 1, expansion x - x^2/2
  // psi: saturated value 0, expansion x - 3x^2/2
  static double evaluate(const IntensityMatrix::Rank1& r, double t, bool variance) {
    const auto& q = r.sorted_q;
    const auto& s1 = r.suffix1;
    const auto& s2 = r.suffix2;
    std::size_t n = q.size();
    if (n < 2 || t <= 0.0) return 0.0;
    if (n * (n - 1) / 2 <= 4'000'000ULL) {  // exact on small supports
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          double em = std::expm1(-2.0 * t * q[i] * q[j]);
          total += variance ? (1.0 + em) * (-em) : -em;
        }
      return total;
    }
    double quad_coef = variance ? 1.5 : 0.5;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double a = 2.0 * t * q[i];
      // first index with q < x/a, searching the descending array
      auto bound = [&](double x) {
        return static_cast<std::size_t>(
            std::lower_bound(q.begin(), q.end(), x / a, std::greater<>()) - q.begin());
      };
      std::size_t j1 = std::max(bound(x_hi), i + 1);
      std::size_t j2 = std::max(bound(x_lo), i + 1);
      if (!variance) total += static_cast<double>(j1 - (i + 1));
      for (std::size_t j = j1; j < j2; ++j) {
        double em = std::expm1(-a * q[j]);
        total += variance ? (1.0 + em) * (-em) : -em;
      }
      total += a * s1[j2] - quad_coef * a * a * s2[j2];
    }
    return total;
  }
};

}  // namespace detail

// v(t) = sum_i (1 - e^{-mu_i t}) over retained labels i >= 1.
inline double expected_vertices(const IntensityMatrix& mu, double t) {
  if (!(t >= 0.0)) throw parameter_error("expected_vertices: t >= 0");
  if (t == 0.0) return 0.0;
  double total = 0.0;
  if (mu.is_rank1()) {
    const auto& r = mu.rank1_data();
    for (double q : r.sorted_q) {
      double mi = r.loops ? 2.0 * q * r.total - q * q : 2.0 * q * (r.total - q);
      total += -std::expm1(-t * mi);
    }
    return total;
  }
  for (label_t i = 1; i <= mu.label_max(); ++i) {
    double mi = mu.vertex_intensity(i);
    if (mi > 0.0) total += -std::expm1(-t * mi);
  }
  return total;
}

// Reported error bar: t * (mu_i mass beyond the truncation).
inline double expected_vertices_tail_bound(const IntensityMatrix& mu, double t) {
  if (!mu.is_rank1()) return 0.0;
  const auto& r = mu.rank1_data();
  return t * 2.0 * r.q.tail_mass * r.total;
}

// e(t) = sum_{i<j} (1 - e^{-mu_ij t}) over retained positive pairs, plus the
// t-linear star/dust edge terms when blip columns are present.
inline double expected_edges(const IntensityMatrix& mu, double t) {
  if (!(t >= 0.0)) throw parameter_error("expected_edges: t >= 0");
  if (t == 0.0) return 0.0;
  if (mu.is_rank1())
    return detail::Rank1PairSum::evaluate(mu.rank1_data(), t, /*variance=*/false);
  double total = 0.0;
  mu.for_each_entry([&](const IntensityMatrix::Entry& e) {
    if (e.i >= 1) {
      if (e.i != e.j)
        total += detail::presence_prob(t, e.value, e.log_value, mu.log_values());
    } else if (e.j >= 1 || e.j == -1) {
      total += t * e.value;  // star / dust edges, all simple
    }
  });
  return total;
}

inline double expected_edges_tail_bound(const IntensityMatrix& mu, double t) {
  if (!mu.is_rank1()) return 0.0;
  const auto& r = mu.rank1_data();
  double tm = r.q.tail_mass;
  return t * (2.0 * tm * (r.total - tm) + tm * tm);
}

// Var e(Gamma_t) = sum_{i<j} e^{-t mu_ij}(1 - e^{-t mu_ij}); Poisson edge
// counts from blip columns contribute their t-linear variance.
inline double edge_count_variance(const IntensityMatrix& mu, double t) {
  if (!(t >= 0.0)) throw parameter_error("edge_count_variance: t >= 0");
  if (t == 0.0) return 0.0;
  if (mu.is_rank1())
    return detail::Rank1PairSum::evaluate(mu.rank1_data(), t, /*variance=*/true);
  double total = 0.0;
  mu.for_each_entry([&](const IntensityMatrix::Entry& e) {
    if (e.i >= 1) {
      if (e.i != e.j) {
        double p = detail::presence_prob(t, e.value, e.log_value, mu.log_values());
        total += (1.0 - p) * p;
      }
    } else if (e.j >= 1 || e.j == -1) {
      total += t * e.value;
    }
  });
  return total;
}

// Certified bound Var v(Gamma_t) <= 2 E v(Gamma_t).
inline double vertex_count_variance_bound(const IntensityMatrix& mu, double t) {
  return 2.0 * expected_vertices(mu, t);
}

// ---------------------------------------------------------------------------

struct DegreeTail {
  std::vector<std::uint64_t> k_grid;
  std::vector<double> pi_ge_k;
  std::uint64_t v_total = 0;
};

inline DegreeTail degree_tail(const SimpleGraph& g) {
  if (g.edge_count() == 0) throw degenerate_error("degree_tail: empty graph");
  auto degs = g.degrees();
  std::uint64_t v = degs.size();
  std::uint64_t dmax = 0;
  for (auto& [i, d] : degs) dmax = std::max(dmax, d);
  std::vector<std::uint64_t> count_ge(dmax + 2, 0);
  for (auto& [i, d] : degs) ++count_ge[d];
  for (std::uint64_t k = dmax; k-- > 0;) count_ge[k] += count_ge[k + 1];
  DegreeTail tail;
  tail.v_total = v;
  tail.k_grid.reserve(dmax);
  tail.pi_ge_k.reserve(dmax);
  for (std::uint64_t k = 1; k <= dmax; ++k) {
    tail.k_grid.push_back(k);
    tail.pi_ge_k.push_back(static_cast<double>(count_ge[k]) / static_cast<double>(v));
  }
  return tail;
}

struct BandVerdict {
  double c_fit = 0.0;
  double C_fit = 0.0;
  double ratio = std::numeric_limits<double>::infinity();
  bool pass = false;
  bool inconclusive = false;
  std::size_t worst_snapshot = 0;
  std::uint64_t worst_k = 0;
};

// Fits c <= k pi_{>=k} <= C over all snapshots for 1 <= k <= c_frac * v and
// passes when C/c stays under the cap.
inline BandVerdict powerlaw_band_check(const std::vector<DegreeTail>& tails, double c_frac = 0.05,
                                       double ratio_cap = 50.0) {
  BandVerdict verdict;
  if (tails.size() < 2) {
    verdict.inconclusive = true;
    return verdict;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t s = 0; s < tails.size(); ++s) {
    const auto& tail = tails[s];
    auto kmax = static_cast<std::uint64_t>(c_frac * static_cast<double>(tail.v_total));
    kmax = std::max<std::uint64_t>(kmax, 1);
    for (std::size_t idx = 0; idx < tail.k_grid.size() && tail.k_grid[idx] <= kmax; ++idx) {
      double val = static_cast<double>(tail.k_grid[idx]) * tail.pi_ge_k[idx];
      if (val < lo) { lo = val; verdict.worst_snapshot = s; verdict.worst_k = tail.k_grid[idx]; }
      hi = std::max(hi, val);
    }
  }
  verdict.c_fit = lo;
  verdict.C_fit = hi;
  verdict.ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  verdict.pass = verdict.ratio <= ratio_cap;
  return verdict;
}

// ---------------------------------------------------------------------------

struct GrowthCurve {
  std::vector<double> grid;
  std::vector<double> v_expected, e_expected;
  std::vector<double> v_obs_mean, e_obs_mean;
  std::vector<double> v_obs_se, e_obs_se;
  std::uint64_t replicate_count = 0;
};

// Per grid point: presence samples and the observed/expected ratios.
inline GrowthCurve convergence_ratio_curve(const IntensityMatrix& mu,
                                           const std::vector<double>& t_grid,
                                           std::uint64_t replicates, std::uint64_t seed) {
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1]))
      throw parameter_error("convergence_ratio_curve: grid must increase");
  if (replicates < 1) throw parameter_error("convergence_ratio_curve: replicates >= 1");
  GrowthCurve curve;
  curve.grid = t_grid;
  curve.replicate_count = replicates;
  for (std::size_t gi = 0; gi < t_grid.size(); ++gi) {
    double t = t_grid[gi];
    curve.v_expected.push_back(expected_vertices(mu, t));
    curve.e_expected.push_back(expected_edges(mu, t));
    MeanVar v_acc, e_acc;
    for (std::uint64_t rep = 0; rep < replicates; ++rep) {
      auto rng = make_stream(seed, rep, gi);
      SimpleGraph g = sample_presence(mu, t, rng);
      v_acc.add(static_cast<double>(g.vertex_count()));
      e_acc.add(static_cast<double>(g.edge_count()));
    }
    curve.v_obs_mean.push_back(v_acc.mean);
    curve.e_obs_mean.push_back(e_acc.mean);
    curve.v_obs_se.push_back(v_acc.stderr_mean());
    curve.e_obs_se.push_back(e_acc.stderr_mean());
  }
  return curve;
}

enum class DensityClass { dense, sparse, extremely_sparse, mixed, inconclusive };

inline const char* to_string(DensityClass c) {
  switch (c) {
    case DensityClass::dense: return "dense";
    case DensityClass::sparse: return "sparse";
    case DensityClass::extremely_sparse: return "extremely_sparse";
    case DensityClass::mixed: return "mixed";
    default: return "inconclusive";
  }
}

struct DensityOptions {
  double stable_drift = 0.5;  // |last/first - 1| below this counts as stabilized
  double ratio_cap = 10.0;    // max/min cap for "bounded" ratios
  double decay_factor = 0.5;  // e/v^2 must fall by this factor for "sparse"
};

// Classifies by the trend of e/v^2 and e/v along the grid (expected curves
// when available, observed means otherwise).
inline DensityClass density_classify(const GrowthCurve& curve, DensityOptions opt = {}) {
  std::size_t n = curve.grid.size();
  if (n < 3 || curve.grid.back() / curve.grid.front() < 100.0) return DensityClass::inconclusive;
  const auto& vs = curve.v_expected.empty() ? curve.v_obs_mean : curve.v_expected;
  const auto& es = curve.e_expected.empty() ? curve.e_obs_mean : curve.e_expected;
  std::vector<double> r2(n), r1(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(vs[k] > 0.0)) return DensityClass::inconclusive;
    r2[k] = es[k] / (vs[k] * vs[k]);
    r1[k] = es[k] / vs[k];
  }
  auto stable = [&](const std::vector<double>& r) {
    double mn = *std::min_element(r.begin(), r.end());
    double mx = *std::max_element(r.begin(), r.end());
    return std::abs(r.back() / r.front() - 1.0) <= opt.stable_drift && mx / mn <= opt.ratio_cap;
  };
  if (stable(r2)) return DensityClass::dense;
  if (stable(r1)) return DensityClass::extremely_sparse;
  if (r2.back() <= opt.decay_factor * r2.front()) return DensityClass::sparse;
  return DensityClass::mixed;
}

struct NormalityVerdict {
  double ks = 0.0;
  double threshold = 0.0;
  double variance = 0.0;
  bool pass = false;
  bool inconclusive = false;
};

// KS distance of standardized e(Gamma_t) to N(0,1); needs enough spread.
inline NormalityVerdict normality_check(const IntensityMatrix& mu, double t,
                                        std::uint64_t replicates, std::uint64_t seed,
                                        double threshold = 0.08) {
  NormalityVerdict verdict;
  verdict.threshold = threshold;
  verdict.variance = edge_count_variance(mu, t);
  if (verdict.variance < 25.0) {
    verdict.inconclusive = true;
    return verdict;
  }
  double et = expected_edges(mu, t);
  double sd = std::sqrt(verdict.variance);
  std::vector<double> zs;
  zs.reserve(replicates);
  for (std::uint64_t rep = 0; rep < replicates; ++rep) {
    auto rng = make_stream(seed, rep, 0);
    SimpleGraph g = sample_presence(mu, t, rng);
    zs.push_back((static_cast<double>(g.edge_count()) - et) / sd);
  }
  verdict.ks = ks_normal(std::move(zs));
  verdict.pass = verdict.ks <= threshold;
  return verdict;
}

// CSV with the fixed 7-column header.
inline void write_curve_csv(std::ostream& os, const GrowthCurve& c) {
  os << "t,v_exp,v_obs_mean,v_obs_se,e_exp,e_obs_mean,e_obs_se\n";
  os.precision(12);
  for (std::size_t k = 0; k < c.grid.size(); ++k)
    os << c.grid[k] << ',' << c.v_expected[k] << ',' << c.v_obs_mean[k] << ',' << c.v_obs_se[k]
       << ',' << c.e_expected[k] << ',' << c.e_obs_mean[k] << ',' << c.e_obs_se[k] << '\n';
}

inline void write_tail_csv(std::ostream& os, const DegreeTail& tail) {
  os << "k,pi_ge_k,v_total\n";
  os.precision(12);
  for (std::size_t i = 0; i < tail.k_grid.size(); ++i)
    os << tail.k_grid[i] << ',' << tail.pi_ge_k[i] << ',' << tail.v_total << '\n';
}

}  // namespace edgex
