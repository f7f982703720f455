// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "ethdec/date.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/indices.hpp"
#include "ethdec/metrics.hpp"
#include "ethdec/store.hpp"

namespace ethdec {

/// The index families that can be aggregated across metrics.
enum class IndexFamily { Gini, HhiRescaled, ShannonNormalized, Atkinson };

inline constexpr std::array<IndexFamily, 4> kAllFamilies = {
    IndexFamily::Gini, IndexFamily::HhiRescaled, IndexFamily::ShannonNormalized,
    IndexFamily::Atkinson};

inline std::string_view to_string(IndexFamily f) {
  switch (f) {
    case IndexFamily::Gini: return "gini";
    case IndexFamily::HhiRescaled: return "hhi-rescaled";
    case IndexFamily::ShannonNormalized: return "shannon-normalized";
    case IndexFamily::Atkinson: return "atkinson";
  }
  throw InvalidArgumentError("unknown index family");
}

inline IndexFamily family_from_string(std::string_view s) {
  for (IndexFamily f : kAllFamilies) {
    if (to_string(f) == s) return f;
  }
  throw InvalidArgumentError("unknown index family '" + std::string(s) + "'");
}

/// Evaluates one family's index for one metric's distribution. The
/// staked-by-pool Atkinson aversion is scaled down by that day's largest
/// pool share, since the dominant staking entity spreads its stake
/// across independent node operators.
inline double family_index(IndexFamily family, MetricId metric,
                           const ShareDistribution& d, double base_epsilon = 0.5) {
  switch (family) {
    case IndexFamily::Gini:
      return gini(d);
    case IndexFamily::HhiRescaled:
      return hhi(d);
    case IndexFamily::ShannonNormalized:
      return shannon_normalized(d);
    case IndexFamily::Atkinson: {
      double eps = base_epsilon;
      if (metric == MetricId::StakedByPool) {
        const auto props = d.proportions();
        const double top = *std::max_element(props.begin(), props.end());
        eps = adjusted_aversion(base_epsilon, top);
      }
      return atkinson(d, {eps});
    }
  }
  throw InvalidArgumentError("unknown index family");
}

/// Normalized JSD between the stored distributions of one metric on two
/// dates. Missing snapshots are an error naming the date and metric.
inline double jsd_between(const SnapshotStore& store, MetricId metric, Date d1, Date d2) {
  if (!is_distribution(metric)) {
    throw InvalidArgumentError("JSD is defined for distribution metrics, not " +
                               std::string(to_string(metric)));
  }
  const Snapshot a = store.read(d1, metric);
  const Snapshot b = store.read(d2, metric);
  return jsd_normalized(a.distribution(), b.distribution());
}

/// Divergence of the end date against fixed lookback horizons. Horizons
/// whose snapshot is missing are absent, never errors.
struct JsdIntervals {
  std::optional<double> one_day;
  std::optional<double> thirty_day;
  std::optional<double> sixty_day;
  std::optional<double> ninety_day;
};

inline JsdIntervals jsd_intervals(const SnapshotStore& store, MetricId metric, Date end) {
  JsdIntervals out;
  if (!store.contains(end, metric)) return out;
  auto horizon = [&](int days) -> std::optional<double> {
    const Date from = end.plus_days(-days);
    if (!store.contains(from, metric)) return std::nullopt;
    return jsd_between(store, metric, from, end);
  };
  out.one_day = horizon(1);
  out.thirty_day = horizon(30);
  out.sixty_day = horizon(60);
  out.ninety_day = horizon(90);
  return out;
}

/// One day's input to the aggregate index: per-metric index values beta
/// in [0,1] with normalized weights summing to 1 over the included
/// terms.
struct MasterIndexInput {
  struct Term {
    MetricId metric;
    double beta;
    double weight;
    bool included = true;
  };
  Date date;
  IndexFamily family = IndexFamily::Gini;
  std::vector<Term> terms;
};

/// The aggregate value with its intermediate terms kept visible, since
/// the formula mixes scales (a geometric mean of weighted-and-rescaled
/// values against a min/max of raw values) and is only meaningful
/// relative to itself over time.
struct MasterIndexValue {
  double gamma;
  double geomean;  ///< geometric mean of the clamped (beta*weight*100) factors
  double min_beta;
  double max_beta;
};

/// Normalized weighted geometric mean across metrics:
///   gamma = ( (prod_i beta_i*omega_i*100)^(1/n) - min(beta) )
///           / ( (max(beta) - min(beta)) * 10^-2 )
/// Each factor beta_i*omega_i*100 is clamped below at 1e-9 so a single
/// zero value cannot annihilate the product. Terms are canonicalized by
/// metric id, making the result exactly invariant under reordering.
inline MasterIndexValue master_index(const MasterIndexInput& input) {
  std::vector<MasterIndexInput::Term> terms;
  for (const auto& t : input.terms) {
    if (t.included) terms.push_back(t);
  }
  if (terms.size() < 2) {
    throw InvalidArgumentError("master index needs at least 2 included metrics");
  }
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.metric < b.metric; });

  double weight_sum = 0.0;
  double min_beta = terms.front().beta;
  double max_beta = terms.front().beta;
  for (const auto& t : terms) {
    if (!std::isfinite(t.beta) || t.beta < 0.0 || t.beta > 1.0) {
      throw InvalidArgumentError("metric value out of [0,1] for " +
                                 std::string(to_string(t.metric)));
    }
    weight_sum += t.weight;
    min_beta = std::min(min_beta, t.beta);
    max_beta = std::max(max_beta, t.beta);
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    throw InvalidArgumentError("included weights must be normalized to sum to 1");
  }
  if (!(max_beta > min_beta)) {
    throw DegenerateRangeError("all metric values are equal; range denominator is zero");
  }

  double log_sum = 0.0;
  for (const auto& t : terms) {
    log_sum += std::log(std::max(t.beta * t.weight * 100.0, 1e-9));
  }
  const double geomean = std::exp(log_sum / static_cast<double>(terms.size()));
  const double gamma = (geomean - min_beta) / ((max_beta - min_beta) * 1e-2);
  return {gamma, geomean, min_beta, max_beta};
}

/// One day of a master series. Days missing any eligible metric are
/// flagged; the remaining metrics are used with renormalized weights.
/// Days where the aggregate is undefined (fewer than two metrics, or a
/// degenerate value range) keep an absent value and the flag.
struct MasterSeriesEntry {
  Date date;
  std::optional<MasterIndexValue> value;
  bool flagged = false;
  std::vector<MetricId> missing;
};

struct MasterSeries {
  IndexFamily family = IndexFamily::Gini;
  std::vector<MasterSeriesEntry> entries;
};

struct MasterSeriesOptions {
  double epsilon = 0.5;            ///< Atkinson base aversion
  std::set<MetricId> exclusions;   ///< metrics left out of the aggregate
};

inline MasterSeries master_series(const SnapshotStore& store, IndexFamily family,
                                  const MetricRegistry& registry, Date begin, Date end,
                                  const MasterSeriesOptions& options = {}) {
  if (begin > end) throw InvalidArgumentError("empty date range");

  std::vector<MetricId> eligible;
  for (const auto& row : registry.rows()) {
    if (row.in_master_index && row.kind == MetricKind::Distribution &&
        !options.exclusions.contains(row.id)) {
      eligible.push_back(row.id);
    }
  }

  MasterSeries series;
  series.family = family;
  for (Date day = begin; day <= end; day = day.plus_days(1)) {
    MasterSeriesEntry entry;
    entry.date = day;

    std::vector<MetricId> present;
    std::vector<double> betas;
    for (MetricId id : eligible) {
      auto snap = store.try_read(day, id);
      if (!snap) {
        entry.missing.push_back(id);
        continue;
      }
      try {
        betas.push_back(family_index(family, id, snap->distribution(), options.epsilon));
        present.push_back(id);
      } catch (const Error&) {
        entry.missing.push_back(id);
      }
    }
    entry.flagged = !entry.missing.empty();

    if (present.size() >= 2) {
      MasterIndexInput input;
      input.date = day;
      input.family = family;
      const std::vector<double> weights = registry.normalized_weights(present);
      for (std::size_t i = 0; i < present.size(); ++i) {
        input.terms.push_back({present[i], betas[i], weights[i], true});
      }
      try {
        entry.value = master_index(input);
      } catch (const Error&) {
        entry.flagged = true;
      }
    } else {
      entry.flagged = true;
    }
    series.entries.push_back(std::move(entry));
  }
  return series;
}

/// Daily economics inputs for the scalar metrics. Issuance and burn are
/// totals over the measured period.
struct ScalarEconomics {
  double issuance = 0.0;
  double burned = 0.0;
  double total_supply = 0.0;
  double staked = 0.0;

  void validate() const {
    if (!(issuance >= 0.0) || !(burned >= 0.0) || !(total_supply >= 0.0) ||
        !(staked >= 0.0)) {
      throw InvalidArgumentError("economics fields must be nonnegative");
    }
    if (staked > total_supply) {
      throw InvalidArgumentError("staked amount exceeds total supply");
    }
  }
};

/// Annualized net issuance as a fraction of supply:
///   (issuance - burned) / total_supply * (365 / period_days).
/// Negative when burn outpaces issuance.
inline double effective_inflation(const ScalarEconomics& e, int period_days) {
  e.validate();
  if (!(e.total_supply > 0.0)) throw InvalidArgumentError("total supply must be > 0");
  if (period_days < 1) throw InvalidArgumentError("period must cover at least one day");
  return (e.issuance - e.burned) / e.total_supply * (365.0 / period_days);
}

/// Fraction of total supply currently staked.
inline double staked_percentage(const ScalarEconomics& e) {
  e.validate();
  if (!(e.total_supply > 0.0)) throw InvalidArgumentError("total supply must be > 0");
  return e.staked / e.total_supply;
}

}  // namespace ethdec
