#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgex/errors.hpp"
#include "edgex/graph.hpp"
#include "edgex/rng.hpp"
#include "edgex/sampler.hpp"
#include "edgex/stats.hpp"

namespace edgex {

// Block-constant symmetric kernel with per-block measures. Probability
// graphons have total measure 1; stretched graphons live on R+ and are zero
// beyond their support.
struct StepGraphon {
  std::vector<double> values;    // k x k, row-major, symmetric, in [0,1]
  std::vector<double> measures;  // k positive block measures

  std::size_t blocks() const { return measures.size(); }
  double value(std::size_t i, std::size_t j) const { return values[i * blocks() + j]; }
  double total_measure() const {
    double s = 0.0;
    for (double m : measures) s += m;
    return s;
  }

  void validate() const {
    std::size_t k = blocks();
    if (values.size() != k * k) throw parameter_error("StepGraphon: value/measure size mismatch");
    for (double m : measures)
      if (!(m > 0.0)) throw parameter_error("StepGraphon: block measures must be positive");
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(value(i, j) - value(j, i)) > 1e-12)
          throw parameter_error("StepGraphon: not symmetric");
    for (double v : values)
      if (!(v >= 0.0 && v <= 1.0)) throw parameter_error("StepGraphon: values must lie in [0,1]");
  }

  double eval(double x, double y) const {  // block lookup by position
    auto locate = [&](double z) -> std::optional<std::size_t> {
      double acc = 0.0;
      for (std::size_t i = 0; i < blocks(); ++i) {
        acc += measures[i];
        if (z <= acc) return i;
      }
      return std::nullopt;
    };
    auto bi = locate(x), bj = locate(y);
    if (!bi || !bj) return 0.0;
    return value(*bi, *bj);
  }
};

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double eps,
                                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps = 1e-7, int depth = 24) {
  if (!(b > a)) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, depth);
}

}  // namespace detail

// Closed-form reference kernels.
struct AnalyticGraphon {
  enum class Family { constant, half_graphon, gamma_corner, power_tail };
  Family family = Family::constant;
  double c = 1.0;      // constant level, or the power_tail coefficient
  double gamma = 1.0;  // gamma_corner / power_tail exponent

  static AnalyticGraphon constant(double level) {
    if (!(level >= 0.0 && level <= 1.0)) throw parameter_error("constant graphon: c in [0,1]");
    return {Family::constant, level, 1.0};
  }
  static AnalyticGraphon half_graphon() { return {Family::half_graphon, 1.0, 1.0}; }
  static AnalyticGraphon gamma_corner(double g) {
    if (!(g > 0.0)) throw parameter_error("gamma_corner: gamma > 0");
    return {Family::gamma_corner, 1.0, g};
  }
  static AnalyticGraphon power_tail(double coeff, double g) {
    if (!(g > 0.0) || !(coeff > 0.0)) throw parameter_error("power_tail: c, gamma > 0");
    return {Family::power_tail, coeff, g};
  }

  bool positive_quadrant() const { return family == Family::power_tail; }

  double eval(double x, double y) const {
    switch (family) {
      case Family::constant: return c;
      case Family::half_graphon: return x + y <= 1.0 ? 1.0 : 0.0;
      case Family::gamma_corner:
        return std::pow(x, gamma) + std::pow(y, gamma) <= 1.0 ? 1.0 : 0.0;
      case Family::power_tail: {
        if (x <= 0.0 || y <= 0.0) return 1.0;
        return -std::expm1(-2.0 * c * c * std::pow(x, -gamma) * std::pow(y, -gamma));
      }
    }
    return 0.0;
  }

  // integral of W over [x0,x1] x [y0,y1]
  double cell_integral(double x0, double x1, double y0, double y1) const {
    double area = (x1 - x0) * (y1 - y0);
    if (area <= 0.0) return 0.0;
    switch (family) {
      case Family::constant: return c * area;
      case Family::half_graphon: {
        // area below the line x + y = 1 inside the cell
        double lo = std::clamp(1.0 - y1, x0, x1);
        double hi = std::clamp(1.0 - y0, x0, x1);
        double full = (lo - x0) * (y1 - y0);
        double mid = (1.0 - y0) * (hi - lo) - 0.5 * (hi * hi - lo * lo);
        return full + mid;
      }
      case Family::gamma_corner: {
        auto len = [&](double x) {
          if (x >= 1.0) return 0.0;
          double yb = std::pow(1.0 - std::pow(x, gamma), 1.0 / gamma);
          return std::clamp(yb, y0, y1) - y0;
        };
        return detail::adaptive_simpson(len, x0, x1, 1e-7 * std::max(1.0, area));
      }
      case Family::power_tail: {
        auto inner = [&](double x) {
          return detail::adaptive_simpson([&](double y) { return eval(x, y); }, y0, y1, 1e-8);
        };
        return detail::adaptive_simpson(inner, x0, x1, 1e-7);
      }
    }
    return 0.0;
  }

  double cell_average(double x0, double x1, double y0, double y1) const {
    double area = (x1 - x0) * (y1 - y0);
    return area > 0.0 ? cell_integral(x0, x1, y0, y1) / area : 0.0;
  }

  // integral of |v - W| over the cell (exact for the indicator families)
  double cell_abs_integral(double v, double x0, double x1, double y0, double y1) const {
    double area = (x1 - x0) * (y1 - y0);
    if (area <= 0.0) return 0.0;
    if (family == Family::power_tail) {
      auto inner = [&](double x) {
        return detail::adaptive_simpson([&](double y) { return std::abs(v - eval(x, y)); }, y0, y1,
                                        1e-8);
      };
      return detail::adaptive_simpson(inner, x0, x1, 1e-7);
    }
    double below = cell_integral(x0, x1, y0, y1);  // mass where the indicator is 1 (or c * area)
    if (family == Family::constant) return std::abs(v - c) * area;
    return std::abs(v - 1.0) * below + std::abs(v) * (area - below);
  }
};

// Adjacency of g with uniform block measures 1/v, vertices in ascending
// label order.
inline StepGraphon empirical_graphon(const SimpleGraph& g) {
  auto vs = g.vertices();
  if (vs.empty()) throw degenerate_error("empirical_graphon: empty graph");
  std::size_t v = vs.size();
  StepGraphon w;
  w.measures.assign(v, 1.0 / static_cast<double>(v));
  w.values.assign(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      if (g.has_edge(vs[i], vs[j])) w.values[i * v + j] = w.values[j * v + i] = 1.0;
  return w;
}

// Same value matrix, every vertex an interval of length 1/s on R+.
inline StepGraphon stretched_graphon(const SimpleGraph& g, double s) {
  if (!(s > 0.0)) throw parameter_error("stretched_graphon: s > 0");
  StepGraphon w = empirical_graphon(g);
  w.measures.assign(w.blocks(), 1.0 / s);
  return w;
}

// Stretched graphon from a window sample: `present` lists the vertices of
// Gamma_t up to the cap (in label order), and blocks beyond the window
// adjacency are zero rows.
inline StepGraphon stretched_graphon(const PresenceWindow& win, double s) {
  if (!(s > 0.0)) throw parameter_error("stretched_graphon: s > 0");
  if (win.present.empty()) throw degenerate_error("stretched_graphon: empty window");
  std::size_t v = win.present.size();
  StepGraphon w;
  w.measures.assign(v, 1.0 / s);
  w.values.assign(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      if (win.graph.has_edge(win.present[i], win.present[j]))
        w.values[i * v + j] = w.values[j * v + i] = 1.0;
  return w;
}

// ---------------------------------------------------------------------------
// Cut norm

struct CutNormResult {
  double lower_bound = 0.0;
  std::vector<char> T, U;  // indicator vectors over blocks
  bool exhaustive = false;
};

// Cut norm of a signed block kernel. For step kernels the supremum is
// attained on unions of blocks (the optimal side given the other is a sign
// set of marginal sums), so exhaustive enumeration over T is exact; the
// heuristic alternates sign-optimal updates from random starts.
inline CutNormResult cut_norm_estimate(const std::vector<double>& delta,
                                       const std::vector<double>& measures, std::size_t restarts,
                                       rng_t& rng, bool force_heuristic = false) {
  std::size_t k = measures.size();
  if (delta.size() != k * k) throw parameter_error("cut_norm_estimate: size mismatch");
  std::vector<double> dm(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) dm[i * k + j] = delta[i * k + j] * measures[i] * measures[j];

  CutNormResult best;
  best.T.assign(k, 0);
  best.U.assign(k, 0);
  auto eval_T = [&](const std::vector<char>& T, int sign, std::vector<char>& U_out) {
    double val = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        if (T[i]) col += dm[i * k + j];
      col *= sign;
      U_out[j] = col > 0.0 ? 1 : 0;
      if (col > 0.0) val += col;
    }
    return val;
  };

  if (k <= 12 && !force_heuristic) {
    std::vector<char> T(k, 0), U(k, 0);
    for (std::uint64_t mask = 1; mask < (1ULL << k); ++mask) {
      for (std::size_t i = 0; i < k; ++i) T[i] = (mask >> i) & 1;
      for (int sign : {1, -1}) {
        double val = eval_T(T, sign, U);
        if (val > best.lower_bound) {
          best.lower_bound = val;
          best.T = T;
          best.U = U;
        }
      }
    }
    best.exhaustive = true;
    return best;
  }

  std::vector<char> T(k), U(k), T2(k);
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    for (std::size_t i = 0; i < k; ++i) T[i] = uniform01(rng) < 0.5 ? 1 : 0;
    for (int sign : {1, -1}) {
      std::vector<char> Tc = T;
      double val = -1.0;
      for (int iter = 0; iter < 200; ++iter) {
        double v1 = eval_T(Tc, sign, U);
        // given U, re-optimize T by row sums
        for (std::size_t i = 0; i < k; ++i) {
          double row = 0.0;
          for (std::size_t j = 0; j < k; ++j)
            if (U[j]) row += dm[i * k + j];
          T2[i] = sign * row > 0.0 ? 1 : 0;
        }
        double v2 = 0.0;
        for (std::size_t i = 0; i < k; ++i)
          if (T2[i])
            for (std::size_t j = 0; j < k; ++j)
              if (U[j]) v2 += sign * dm[i * k + j];
        Tc = T2;
        double now = std::max(v1, v2);
        if (now <= val + 1e-15) break;
        val = now;
      }
      if (val > best.lower_bound) {
        best.lower_bound = val;
        best.T = Tc;
        best.U = U;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Cut distance upper bounds under the natural (order-preserving) alignment

struct DcutReport {
  double l1_bound = 0.0;
  double cutnorm_lb = 0.0;
  double dcut_upper = 0.0;
};

namespace detail {

inline std::vector<double> boundaries(const StepGraphon& w) {
  std::vector<double> b{0.0};
  double acc = 0.0;
  for (double m : w.measures) {
    acc += m;
    b.push_back(acc);
  }
  return b;
}

// Merge the two boundary partitions into a common refinement over [0, max].
inline std::vector<double> merge_boundaries(std::vector<double> a, std::vector<double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
            out.end());
  return out;
}

inline std::size_t block_of(const std::vector<double>& bounds, double mid) {
  auto it = std::upper_bound(bounds.begin(), bounds.end(), mid);
  if (it == bounds.begin()) return 0;
  return static_cast<std::size_t>(it - bounds.begin()) - 1;
}

}  // namespace detail

// Upper bound on d_cut via a single alignment: cells of the refinement carry
// the exact value difference, so the L1 norm bounds the cut norm from above;
// the reported figure is min(L1, cut-norm estimate of the refined difference)
// as the distance surrogate, with both components kept in the report.
inline DcutReport dcut_upper(const StepGraphon& w1, const StepGraphon& w2, std::size_t restarts,
                             rng_t& rng) {
  w1.validate();
  w2.validate();
  auto b1 = detail::boundaries(w1);
  auto b2 = detail::boundaries(w2);
  double tot = std::max(b1.back(), b2.back());
  if (b1.back() < tot) b1.push_back(tot);  // zero-extend the shorter support
  if (b2.back() < tot) b2.push_back(tot);
  auto bounds = detail::merge_boundaries(b1, b2);
  std::size_t k = bounds.size() - 1;
  std::vector<std::size_t> idx1(k), idx2(k);
  std::vector<double> cm(k);
  for (std::size_t c = 0; c < k; ++c) {
    double mid = 0.5 * (bounds[c] + bounds[c + 1]);
    cm[c] = bounds[c + 1] - bounds[c];
    idx1[c] = detail::block_of(b1, mid);
    idx2[c] = detail::block_of(b2, mid);
  }
  auto val = [&](const StepGraphon& w, std::size_t bi, std::size_t bj) {
    return bi < w.blocks() && bj < w.blocks() ? w.value(bi, bj) : 0.0;
  };
  std::vector<double> diff(k * k);
  double l1 = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double d = val(w1, idx1[a], idx1[b]) - val(w2, idx2[a], idx2[b]);
      diff[a * k + b] = d;
      l1 += std::abs(d) * cm[a] * cm[b];
    }
  DcutReport rep;
  rep.l1_bound = l1;
  rep.cutnorm_lb = cut_norm_estimate(diff, cm, restarts, rng).lower_bound;
  rep.dcut_upper = std::min(rep.l1_bound, std::max(rep.cutnorm_lb, 0.0));
  return rep;
}

inline DcutReport dcut_upper(const StepGraphon& w1, const AnalyticGraphon& w2,
                             std::size_t restarts, rng_t& rng) {
  w1.validate();
  auto bounds = detail::boundaries(w1);
  std::size_t k = w1.blocks();
  std::vector<double> diff(k * k);
  double l1 = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double v = w1.value(a, b);
      double avg = w2.cell_average(bounds[a], bounds[a + 1], bounds[b], bounds[b + 1]);
      diff[a * k + b] = v - avg;
      l1 += w2.cell_abs_integral(v, bounds[a], bounds[a + 1], bounds[b], bounds[b + 1]);
    }
  DcutReport rep;
  rep.l1_bound = l1;
  rep.cutnorm_lb = cut_norm_estimate(diff, w1.measures, restarts, rng).lower_bound;
  rep.dcut_upper = std::min(rep.l1_bound, std::max(rep.cutnorm_lb, 0.0));
  return rep;
}

// ---------------------------------------------------------------------------
// G_r(W) on a window of R+ (or of the unit square domain)

struct GrSample {
  SimpleGraph graph;           // vertex i <-> i-th Poisson point (isolated dropped)
  std::vector<double> points;  // all sampled point locations, ascending
};

template <typename W>
GrSample sample_gr_window(const W& w, double r, double window, rng_t& rng) {
  if (!(r > 0.0) || !(window > 0.0)) throw parameter_error("sample_gr_window: r, window > 0");
  GrSample out;
  std::poisson_distribution<std::uint64_t> po(r * window);
  std::uint64_t n = po(rng);
  out.points.resize(n);
  for (auto& x : out.points) x = uniform01(rng) * window;
  std::sort(out.points.begin(), out.points.end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double p = w.eval(out.points[i], out.points[j]);
      if (p > 0.0 && uniform01(rng) < p)
        out.graph.add_edge(static_cast<label_t>(i) + 1, static_cast<label_t>(j) + 1);
    }
  return out;
}

// ---------------------------------------------------------------------------

struct StatDistance {
  std::string stat;
  double mean_a = 0.0, mean_b = 0.0;
  double rel_diff = 0.0;  // |mean_a - mean_b| relative to the reference list b
  double ks = 0.0;
};

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// Distribution comparison of summary statistics between two sampled graph
// families (the empirical surrogate for convergence of G_r(W_n) to G_r(W)).
inline std::vector<StatDistance> subgraph_stats_distance(const std::vector<SimpleGraph>& a,
                                                         const std::vector<SimpleGraph>& b) {
  if (a.empty() || b.empty()) throw degenerate_error("subgraph_stats_distance: empty sample list");
  auto collect = [](const std::vector<SimpleGraph>& gs, auto fn) {
    std::vector<double> out;
    out.reserve(gs.size());
    for (const auto& g : gs) out.push_back(fn(g));
    return out;
  };
  auto max_degree = [](const SimpleGraph& g) {
    double mx = 0.0;
    for (auto& [v, d] : g.degrees()) mx = std::max(mx, static_cast<double>(d));
    return mx;
  };
  std::vector<std::pair<std::string, std::function<double(const SimpleGraph&)>>> stats = {
      {"vertices", [](const SimpleGraph& g) { return static_cast<double>(g.vertex_count()); }},
      {"edges", [](const SimpleGraph& g) { return static_cast<double>(g.edge_count()); }},
      {"triangles", [](const SimpleGraph& g) { return static_cast<double>(triangle_count(g)); }},
      {"max_degree", max_degree},
  };
  std::vector<StatDistance> out;
  for (auto& [name, fn] : stats) {
    auto va = collect(a, fn);
    auto vb = collect(b, fn);
    StatDistance d;
    d.stat = name;
    for (double x : va) d.mean_a += x;
    for (double x : vb) d.mean_b += x;
    d.mean_a /= static_cast<double>(va.size());
    d.mean_b /= static_cast<double>(vb.size());
    d.rel_diff = std::abs(d.mean_a - d.mean_b) / std::max(std::abs(d.mean_b), 1e-12);
    d.ks = ks_two_sample(va, vb);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace edgex
