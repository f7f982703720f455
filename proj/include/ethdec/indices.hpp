// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ethdec/distribution.hpp"
#include "ethdec/errors.hpp"

namespace ethdec {

namespace detail {

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace detail

/// Gini index from the empirical mean difference of the quantities,
///   G = sum_i sum_j |x_i - x_j| / (2 n^2 mu),
/// evaluated in O(n log n) via the sorted identity
///   sum_i sum_j |x_i - x_j| = 2 * sum_k (2k - n + 1) x_(k).
/// 0 is perfect equality; (n-1)/n is a single holder among n.
inline double gini(const ShareDistribution& d) {
  std::vector<double> x = d.quantities();
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double weighted = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    weighted += (2.0 * static_cast<double>(k) - n + 1.0) * x[k];
  }
  // n^2 * mu == n * total
  return detail::clamp01(weighted / (n * d.total()));
}

struct LorenzPoint {
  double population;  ///< cumulative population fraction, in [0,1]
  double share;       ///< cumulative resource fraction, in [0,1]

  bool operator==(const LorenzPoint&) const = default;
};

/// The empirical Lorenz polyline: entities sorted by ascending quantity,
/// points (k/n, cumulative share of the k smallest), from (0,0) to (1,1).
/// The share coordinate never exceeds the population coordinate.
inline std::vector<LorenzPoint> lorenz_points(const ShareDistribution& d) {
  std::vector<double> x = d.quantities();
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  double total = 0.0;
  for (double v : x) total += v;
  std::vector<LorenzPoint> pts;
  pts.reserve(n + 1);
  pts.push_back({0.0, 0.0});
  double cum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += x[k];
    pts.push_back({static_cast<double>(k + 1) / static_cast<double>(n), cum / total});
  }
  return pts;
}

/// Gini via the Lorenz route: one minus twice the trapezoid area under
/// the polyline. Exact for the empirical polyline, so it agrees with the
/// mean-difference form to rounding error; the two are kept as
/// independent code paths so they can cross-check each other.
inline double gini_from_lorenz(const ShareDistribution& d) {
  const auto pts = lorenz_points(d);
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    area += (pts[k].population - pts[k - 1].population) *
            (pts[k].share + pts[k - 1].share) / 2.0;
  }
  return detail::clamp01(1.0 - 2.0 * area);
}

/// Herfindahl-Hirschman index rescaled to (0, 1]: the sum of squared
/// proportions. 1 is a single-entity monopoly; 1/n is n equal entities.
inline double hhi(const ShareDistribution& d) {
  double sum = 0.0;
  for (double q : d.proportions()) sum += q * q;
  return std::min(1.0, sum);
}

/// US DoJ merger-guideline concentration bands, on the unscaled HHI.
enum class HhiClass { Unconcentrated, ModeratelyConcentrated, HighlyConcentrated };

inline std::string_view to_string(HhiClass c) {
  switch (c) {
    case HhiClass::Unconcentrated: return "unconcentrated";
    case HhiClass::ModeratelyConcentrated: return "moderately-concentrated";
    case HhiClass::HighlyConcentrated: return "highly-concentrated";
  }
  throw InvalidArgumentError("unknown HHI class");
}

/// Classifies a rescaled HHI theta in (0,1]. Unscales by 10^4, then:
/// < 1,500 unconcentrated; 1,500..2,500 inclusive moderately
/// concentrated; > 2,500 highly concentrated.
inline HhiClass hhi_classify(double theta) {
  if (!std::isfinite(theta) || theta <= 0.0 || theta > 1.0) {
    throw InvalidArgumentError("rescaled HHI must lie in (0, 1]");
  }
  const double unscaled = theta * 1e4;
  if (unscaled < 1500.0) return HhiClass::Unconcentrated;
  if (unscaled <= 2500.0) return HhiClass::ModeratelyConcentrated;
  return HhiClass::HighlyConcentrated;
}

/// Shannon entropy of the proportions, natural log, with 0*ln(0) := 0.
/// 0 for a single positive category, ln(n) for n equal categories.
inline double shannon(const ShareDistribution& d) {
  double h = 0.0;
  for (double q : d.proportions()) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return std::max(0.0, h);
}

/// Shannon entropy divided by its maximum ln(n); requires n >= 2.
/// 1 is maximally even, 0 fully concentrated.
inline double shannon_normalized(const ShareDistribution& d) {
  if (d.size() < 2) {
    throw InvalidArgumentError("normalized Shannon needs at least 2 categories");
  }
  return detail::clamp01(shannon(d) / std::log(static_cast<double>(d.size())));
}

/// Inequality-aversion parameter for the Atkinson index; must be > 0.
/// Larger values weigh the lower end of the distribution more heavily.
struct AtkinsonParams {
  double epsilon = 0.5;
};

struct AtkinsonValue {
  double value;
  /// True when a zero quantity with epsilon >= 1 forced the limit value
  /// of 1.0 (the power mean collapses to zero there).
  bool zero_limit;
};

/// Atkinson index, the social-welfare inequality measure:
///   epsilon != 1:  1 - ( (1/N) * sum (y_i/mu)^(1-eps) )^(1/(1-eps))
///   epsilon == 1:  1 - geometric_mean(y) / mu
/// Any zero quantity with epsilon >= 1 yields 1.0 by the limit
/// convention, reported via the zero_limit flag.
inline AtkinsonValue atkinson_value(const ShareDistribution& d, AtkinsonParams params) {
  const double eps = params.epsilon;
  if (!std::isfinite(eps) || eps <= 0.0) {
    throw InvalidArgumentError("inequality aversion must be > 0");
  }
  const std::vector<double> y = d.quantities();
  const double n = static_cast<double>(y.size());
  const double mu = d.total() / n;

  if (eps >= 1.0) {
    for (double v : y) {
      if (v == 0.0) return {1.0, true};
    }
  }
  double value;
  if (eps == 1.0) {
    double log_sum = 0.0;
    for (double v : y) log_sum += std::log(v);
    value = 1.0 - std::exp(log_sum / n) / mu;
  } else {
    double mean_pow = 0.0;
    for (double v : y) mean_pow += std::pow(v / mu, 1.0 - eps);
    mean_pow /= n;
    value = 1.0 - std::pow(mean_pow, 1.0 / (1.0 - eps));
  }
  return {detail::clamp01(value), false};
}

inline double atkinson(const ShareDistribution& d, AtkinsonParams params) {
  return atkinson_value(d, params).value;
}

/// Scales an inequality-aversion parameter down by an entity's market
/// share: base * (1 - omega). Used when the dominant entity is itself
/// internally decentralized (a DAO spreading stake across independent
/// operators) and should not be treated as one monolithic holder.
inline double adjusted_aversion(double base, double omega) {
  if (!std::isfinite(base) || base <= 0.0) {
    throw InvalidArgumentError("base aversion must be > 0");
  }
  if (!std::isfinite(omega) || omega < 0.0 || omega >= 1.0) {
    throw InvalidArgumentError("share weighting must lie in [0, 1)");
  }
  return base * (1.0 - omega);
}

/// Percentile by the rank-(N+1) linear-interpolation method: the rank is
/// i = p*(N+1)/100 over the ascending-sorted values; integral ranks
/// select directly, fractional ranks interpolate between neighbours, and
/// ranks outside [1, N] clamp to the extreme values.
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgumentError("percentile of an empty set");
  if (!std::isfinite(p) || p <= 0.0 || p >= 100.0) {
    throw InvalidArgumentError("percentile rank must lie in (0, 100)");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double i = p * (n + 1.0) / 100.0;
  if (i <= 1.0) return values.front();
  if (i >= n) return values.back();
  const double k = std::floor(i);
  const double frac = i - k;
  const std::size_t idx = static_cast<std::size_t>(k) - 1;
  return values[idx] + frac * (values[idx + 1] - values[idx]);
}

/// Tail ratios. A ratio whose denominator is zero is undefined and
/// reported as absent, never as infinity.
struct TailRatios {
  std::optional<double> palma;    ///< top 10% of entities vs bottom 40%
  std::optional<double> p90_p10;
  std::optional<double> p50_p10;
};

namespace detail {

/// Sum of the `count` largest (desc=true) or smallest quantities, with
/// the fractional boundary entity prorated linearly.
inline double prorated_tail_sum(std::vector<double> sorted_asc, double count, bool top) {
  if (top) std::reverse(sorted_asc.begin(), sorted_asc.end());
  double sum = 0.0;
  const std::size_t whole = static_cast<std::size_t>(std::floor(count));
  for (std::size_t k = 0; k < whole && k < sorted_asc.size(); ++k) sum += sorted_asc[k];
  const double frac = count - std::floor(count);
  if (frac > 0.0 && whole < sorted_asc.size()) sum += frac * sorted_asc[whole];
  return sum;
}

}  // namespace detail

inline TailRatios tail_ratios(const ShareDistribution& d) {
  std::vector<double> x = d.quantities();
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());

  TailRatios out;
  const double top_sum = detail::prorated_tail_sum(x, n / 10.0, true);
  const double bottom_sum = detail::prorated_tail_sum(x, n * 2.0 / 5.0, false);
  if (bottom_sum > 0.0) out.palma = top_sum / bottom_sum;

  const double p10 = percentile(x, 10.0);
  const double p50 = percentile(x, 50.0);
  const double p90 = percentile(x, 90.0);
  if (p10 > 0.0) {
    out.p90_p10 = p90 / p10;
    out.p50_p10 = p50 / p10;
  }
  return out;
}

/// Kullback-Leibler divergence sum p_i ln(p_i/q_i) between two
/// equal-length proportion vectors, natural log, 0*ln(0/.) := 0.
/// Requires q_i > 0 wherever p_i > 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidArgumentError("KL divergence needs equal-length vectors");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (!(q[i] > 0.0)) {
        throw InvalidArgumentError("KL divergence undefined: q has zero mass where p does not");
      }
      sum += p[i] * std::log(p[i] / q[i]);
    }
  }
  return std::max(0.0, sum);
}

/// Jensen-Shannon divergence between two aligned proportion vectors,
/// normalized by its upper bound ln 2 so the result lies in [0, 1]:
///   ( KL(p||m)/2 + KL(q||m)/2 ) / ln 2,  m = (p + q)/2.
/// 0 for identical vectors, 1 for disjoint supports; symmetric.
inline double jsd_normalized(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidArgumentError("JSD needs equal-length vectors");
  }
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (p[i] + q[i]) / 2.0;
  const double jsd = 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
  return detail::clamp01(jsd / std::log(2.0));
}

/// Normalized JSD between two distributions, aligned on the union of
/// their labels first so categorical snapshots from different days are
/// comparable.
inline double jsd_normalized(const ShareDistribution& p, const ShareDistribution& q) {
  const auto [vp, vq] = align(p, q);
  return jsd_normalized(std::span<const double>(vp), std::span<const double>(vq));
}

}  // namespace ethdec
