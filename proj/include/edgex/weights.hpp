#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "edgex/errors.hpp"
#include "edgex/rng.hpp"

namespace edgex {

// Finite truncation of a nonnegative weight sequence (q_i), label i = index + 1.
// tail_mass is the (normalized) mass of the discarded indices beyond weights.size().
struct WeightSeq {
  std::vector<double> weights;
  double tail_mass = 0.0;
  std::string family_tag;

  double head_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  double total() const { return head_sum() + tail_mass; }
  std::size_t size() const { return weights.size(); }
  double q(std::size_t label) const {  // 1-based label
    return (label >= 1 && label <= weights.size()) ? weights[label - 1] : 0.0;
  }
  bool is_probability() const { return std::abs(total() - 1.0) <= 1e-12; }

  void validate() const {
    for (double w : weights)
      if (!(w >= 0.0)) throw parameter_error("WeightSeq: negative or NaN weight");
    if (!(tail_mass >= 0.0)) throw parameter_error("WeightSeq: negative tail mass");
    double t = total();
    if (!(t > 0.0) || !std::isfinite(t)) throw degenerate_error("WeightSeq: total mass not in (0, inf)");
  }
};

struct PowerLawFamily { double gamma; };          // base i^-gamma, gamma > 1
struct GeometricFamily { double b; };             // base b^-i, b > 1
struct SlowLogFamily {};                          // base 1/(i log^2 i), i >= 2 (labels shifted down by one)
struct ExplicitFamily { std::vector<double> weights; };

struct WeightFamilySpec {
  std::variant<PowerLawFamily, GeometricFamily, SlowLogFamily, ExplicitFamily> family;
  // Either a fixed truncation length or a tail-mass budget (fraction of total).
  std::size_t truncation_count = 0;
  double truncation_mass_budget = 0.0;
};

namespace detail {

// sum_{i > n} i^-gamma via direct summation plus an Euler-Maclaurin remainder.
inline double power_law_tail(double gamma, std::uint64_t n) {
  std::uint64_t m = n;
  double direct = 0.0;
  std::uint64_t steps = std::min<std::uint64_t>(4000, std::numeric_limits<std::uint64_t>::max() - m);
  for (std::uint64_t i = m + 1; i <= m + steps; ++i) direct += std::pow(static_cast<double>(i), -gamma);
  double a = static_cast<double>(m + steps) + 1.0;
  // sum_{i>=a} i^-g  ~ a^{1-g}/(g-1) + a^-g/2 - g a^{-g-1}/12
  double rem = std::pow(a, 1.0 - gamma) / (gamma - 1.0) + 0.5 * std::pow(a, -gamma)
             - gamma * std::pow(a, -gamma - 1.0) / 12.0;
  return direct + rem;
}

// sum_{i > n} 1/(i log^2 i) via direct summation plus integral remainder 1/log(a).
inline double slow_log_tail(std::uint64_t n) {
  double direct = 0.0;
  std::uint64_t steps = 4000;
  for (std::uint64_t i = n + 1; i <= n + steps; ++i) {
    double li = std::log(static_cast<double>(i));
    direct += 1.0 / (static_cast<double>(i) * li * li);
  }
  double a = static_cast<double>(n + steps) + 0.5;
  return direct + 1.0 / std::log(a);
}

inline double geometric_tail(double b, std::uint64_t n) {
  return std::pow(b, -static_cast<double>(n)) / (b - 1.0);
}

}  // namespace detail

// Builds the named deterministic weight families, normalized to a probability
// together with the analytic tail mass.
inline WeightSeq weights_family(const WeightFamilySpec& spec) {
  std::vector<double> base;
  double tail = 0.0;
  std::string tag;

  auto resolve_count = [&](auto tail_fn, double unit_total) -> std::size_t {
    if (spec.truncation_count > 0) return spec.truncation_count;
    if (!(spec.truncation_mass_budget > 0.0 && spec.truncation_mass_budget < 1.0))
      throw parameter_error("weights_family: need truncation_count or mass budget in (0,1)");
    std::size_t lo = 1, hi = 1;
    while (tail_fn(hi) / unit_total > spec.truncation_mass_budget) {
      lo = hi;
      if (hi > (1u << 26)) throw capacity_error("weights_family: truncation beyond 2^27 indices");
      hi *= 2;
    }
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (tail_fn(mid) / unit_total > spec.truncation_mass_budget) lo = mid + 1; else hi = mid;
    }
    return lo;
  };

  if (auto* p = std::get_if<PowerLawFamily>(&spec.family)) {
    if (!(p->gamma > 1.0)) throw parameter_error("power_law: gamma must be > 1");
    double g = p->gamma;
    double unit_total = 1.0 + detail::power_law_tail(g, 1);
    std::size_t n = resolve_count([&](std::size_t m) { return detail::power_law_tail(g, m); }, unit_total);
    base.resize(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = std::pow(static_cast<double>(i + 1), -g);
    tail = detail::power_law_tail(g, n);
    tag = "power_law(gamma=" + std::to_string(g) + ",n=" + std::to_string(n) + ")";
  } else if (auto* gm = std::get_if<GeometricFamily>(&spec.family)) {
    if (!(gm->b > 1.0)) throw parameter_error("geometric: b must be > 1");
    double b = gm->b;
    double unit_total = 1.0 / (b - 1.0);
    std::size_t n = resolve_count([&](std::size_t m) { return detail::geometric_tail(b, m); }, unit_total);
    base.resize(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = std::pow(b, -static_cast<double>(i + 1));
    tail = detail::geometric_tail(b, n);
    tag = "geometric(b=" + std::to_string(b) + ",n=" + std::to_string(n) + ")";
  } else if (std::get_if<SlowLogFamily>(&spec.family)) {
    double unit_total = detail::slow_log_tail(1);
    std::size_t n = resolve_count([&](std::size_t m) { return detail::slow_log_tail(m + 1); }, unit_total);
    base.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double x = static_cast<double>(i + 2);  // paper index starts at 2; label k holds index k+1
      double lx = std::log(x);
      base[i] = 1.0 / (x * lx * lx);
    }
    tail = detail::slow_log_tail(base.size() + 1);
    tag = "slow_log(n=" + std::to_string(n) + ")";
  } else {
    auto& e = std::get<ExplicitFamily>(spec.family);
    base = e.weights;
    for (double w : base)
      if (!(w >= 0.0)) throw parameter_error("explicit weights: negative entry");
    tail = 0.0;
    tag = "explicit(n=" + std::to_string(base.size()) + ")";
  }

  double head = std::accumulate(base.begin(), base.end(), 0.0);
  double tot = head + tail;
  if (!(head > 0.0)) throw degenerate_error("weights_family: truncation retains zero mass");
  WeightSeq out;
  out.weights.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out.weights[i] = base[i] / tot;
  out.tail_mass = tail / tot;
  out.family_tag = tag;
  out.validate();
  return out;
}

// Two-parameter GEM stick breaking: the i-th broken-off proportion is
// Beta(1-alpha, theta+i*alpha); stops when the remaining stick is below
// mass_epsilon, which is recorded as tail_mass.
inline WeightSeq stick_break_gem(double alpha, double theta, double mass_epsilon, rng_t& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw parameter_error("stick_break_gem: need 0 <= alpha < 1");
  if (!(theta > -alpha)) throw parameter_error("stick_break_gem: need theta > -alpha");
  if (!(mass_epsilon > 0.0 && mass_epsilon < 1.0)) throw parameter_error("stick_break_gem: mass_epsilon in (0,1)");

  auto beta_draw = [&](double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    double x = ga(rng), y = gb(rng);
    return x / (x + y);
  };

  WeightSeq out;
  double remaining = 1.0;
  for (std::size_t i = 1; remaining >= mass_epsilon; ++i) {
    double w = beta_draw(1.0 - alpha, theta + static_cast<double>(i) * alpha);
    out.weights.push_back(remaining * w);
    remaining *= (1.0 - w);
    if (i > 100000000) throw capacity_error("stick_break_gem: did not reach mass_epsilon");
  }
  out.tail_mass = remaining;
  out.family_tag = "gem(alpha=" + std::to_string(alpha) + ",theta=" + std::to_string(theta) + ")";
  out.validate();
  return out;
}

// Symmetric Dirichlet weights on N labels with the Polya-urn predictive
// (n_i + alpha)/(n + N alpha), i.e. all concentration parameters equal alpha.
inline WeightSeq polya_dirichlet_weights(std::size_t N, double alpha, rng_t& rng) {
  if (N < 2) throw parameter_error("polya_dirichlet_weights: N >= 2");
  if (!(alpha > 0.0)) throw parameter_error("polya_dirichlet_weights: alpha > 0");
  std::gamma_distribution<double> g(alpha, 1.0);
  WeightSeq out;
  out.weights.resize(N);
  double s = 0.0;
  for (auto& w : out.weights) { w = g(rng); s += w; }
  for (auto& w : out.weights) w /= s;
  out.tail_mass = 0.0;
  out.family_tag = "dirichlet(N=" + std::to_string(N) + ",alpha=" + std::to_string(alpha) + ")";
  out.validate();
  return out;
}

// Smallest retained index M so that the expected number of edge endpoints
// hitting labels > M up to time t, bounded by 2 t tail_mass(M), is <= epsilon.
inline std::size_t truncation_index(const WeightFamilySpec& spec, double t, double epsilon) {
  if (!(t >= 0.0)) throw parameter_error("truncation_index: t >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw parameter_error("truncation_index: epsilon in (0,1)");
  if (t == 0.0) return 1;

  double unit_total;
  std::function<double(std::uint64_t)> tail_fn;
  if (auto* p = std::get_if<PowerLawFamily>(&spec.family)) {
    if (!(p->gamma > 1.0)) throw parameter_error("truncation_index: gamma must be > 1");
    double g = p->gamma;
    unit_total = 1.0 + detail::power_law_tail(g, 1);
    tail_fn = [g](std::uint64_t m) { return detail::power_law_tail(g, m); };
  } else if (auto* gm = std::get_if<GeometricFamily>(&spec.family)) {
    if (!(gm->b > 1.0)) throw parameter_error("truncation_index: b must be > 1");
    double b = gm->b;
    unit_total = 1.0 / (b - 1.0);
    tail_fn = [b](std::uint64_t m) { return detail::geometric_tail(b, m); };
  } else if (std::get_if<SlowLogFamily>(&spec.family)) {
    unit_total = detail::slow_log_tail(1);
    tail_fn = [](std::uint64_t m) { return detail::slow_log_tail(m + 1); };
  } else {
    throw parameter_error("truncation_index: unsupported family (no analytic tail)");
  }

  auto bound = [&](std::uint64_t m) { return 2.0 * t * tail_fn(m) / unit_total; };
  std::uint64_t lo = 1, hi = 1;
  while (bound(hi) > epsilon) {
    lo = hi;
    if (hi > (1ULL << 40)) throw capacity_error("truncation_index: index beyond 2^40");
    hi *= 2;
  }
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (bound(mid) > epsilon) lo = mid + 1; else hi = mid;
  }
  return static_cast<std::size_t>(lo);
}

inline std::size_t truncation_index(const WeightSeq& q, double t, double epsilon) {
  if (!(t >= 0.0)) throw parameter_error("truncation_index: t >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw parameter_error("truncation_index: epsilon in (0,1)");
  if (t == 0.0) return 1;
  double suffix = q.tail_mass;
  std::size_t n = q.size();
  // walk back while the bound still holds one index earlier
  std::size_t m = n;
  while (m > 1 && 2.0 * t * (suffix + q.weights[m - 1]) / q.total() <= epsilon) {
    suffix += q.weights[m - 1];
    --m;
  }
  if (m == n && 2.0 * t * suffix / q.total() > epsilon)
    throw degenerate_error("truncation_index: sequence too short for requested budget");
  return m;
}

}  // namespace edgex
