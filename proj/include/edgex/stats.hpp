#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "edgex/errors.hpp"

namespace edgex {

struct MeanVar {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const { return n > 0 ? stddev() / std::sqrt(static_cast<double>(n)) : 0.0; }
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double chi_squared_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

// One-sample Kolmogorov-Smirnov distance against the standard normal.
inline double ks_normal(std::vector<double> xs) {
  if (xs.empty()) throw degenerate_error("ks_normal: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = normal_cdf(xs[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// Two-sample chi-square homogeneity test over categorical outcomes.
// Cells whose pooled count is below `min_pooled` are merged into one rest cell.
template <typename Key>
double chi_square_two_sample_p(const std::map<Key, std::uint64_t>& a,
                               const std::map<Key, std::uint64_t>& b,
                               std::uint64_t min_pooled = 10) {
  double n1 = 0, n2 = 0;
  std::map<Key, std::pair<double, double>> cells;
  for (auto& [k, c] : a) { cells[k].first += static_cast<double>(c); n1 += static_cast<double>(c); }
  for (auto& [k, c] : b) { cells[k].second += static_cast<double>(c); n2 += static_cast<double>(c); }
  if (n1 == 0 || n2 == 0) throw degenerate_error("chi_square: empty sample");

  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> rest{0.0, 0.0};
  for (auto& [k, c] : cells) {
    if (c.first + c.second < static_cast<double>(min_pooled)) {
      rest.first += c.first;
      rest.second += c.second;
    } else {
      merged.push_back(c);
    }
  }
  if (rest.first + rest.second > 0) merged.push_back(rest);
  if (merged.size() < 2) return 1.0;

  double stat = 0.0;
  for (auto& [c1, c2] : merged) {
    double tot = c1 + c2;
    double e1 = tot * n1 / (n1 + n2);
    double e2 = tot * n2 / (n1 + n2);
    stat += (c1 - e1) * (c1 - e1) / e1;
    stat += (c2 - e2) * (c2 - e2) / e2;
  }
  return chi_squared_sf(stat, static_cast<double>(merged.size() - 1));
}

// Total-variation distance between two empirical categorical laws.
template <typename Key>
double tv_distance(const std::map<Key, std::uint64_t>& a,
                   const std::map<Key, std::uint64_t>& b) {
  double n1 = 0, n2 = 0;
  for (auto& [k, c] : a) n1 += static_cast<double>(c);
  for (auto& [k, c] : b) n2 += static_cast<double>(c);
  if (n1 == 0 || n2 == 0) throw degenerate_error("tv_distance: empty sample");
  std::map<Key, std::pair<double, double>> cells;
  for (auto& [k, c] : a) cells[k].first = static_cast<double>(c) / n1;
  for (auto& [k, c] : b) cells[k].second = static_cast<double>(c) / n2;
  double tv = 0.0;
  for (auto& [k, c] : cells) tv += std::abs(c.first - c.second);
  return tv / 2.0;
}

}  // namespace edgex
