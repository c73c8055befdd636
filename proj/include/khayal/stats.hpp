#ifndef KHAYAL_STATS_HPP
#define KHAYAL_STATS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "khayal/error.hpp"

namespace khayal::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("mean of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) {
    if (xs.empty()) throw InsufficientDataError("sd of an empty sample");
    return 0.0;
  }
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Quantile of already sorted data by linear interpolation between order
/// statistics: position p * (n - 1).
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InsufficientDataError("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace khayal::stats

#endif  // KHAYAL_STATS_HPP
