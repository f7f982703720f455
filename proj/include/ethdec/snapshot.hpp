// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>

#include "ethdec/date.hpp"
#include "ethdec/distribution.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/metrics.hpp"

namespace ethdec {

/// One day's recorded value for one metric: a full share distribution
/// for distribution metrics, a single real for scalar metrics. The unit
/// of persistence.
class Snapshot {
 public:
  Snapshot(Date date, MetricId metric, ShareDistribution distribution,
           std::string source, std::string fetched_at)
      : date_(date),
        metric_(metric),
        payload_(std::move(distribution)),
        source_(std::move(source)),
        fetched_at_(std::move(fetched_at)) {
    if (metric_kind(metric) != MetricKind::Distribution) {
      throw InvalidArgumentError("metric " + std::string(to_string(metric)) +
                                 " is scalar; got a distribution payload");
    }
  }

  Snapshot(Date date, MetricId metric, double value, std::string source,
           std::string fetched_at)
      : date_(date),
        metric_(metric),
        payload_(value),
        source_(std::move(source)),
        fetched_at_(std::move(fetched_at)) {
    if (metric_kind(metric) != MetricKind::Scalar) {
      throw InvalidArgumentError("metric " + std::string(to_string(metric)) +
                                 " is a distribution; got a scalar payload");
    }
    if (!std::isfinite(value)) {
      throw InvalidArgumentError("scalar payload must be finite");
    }
  }

  Date date() const { return date_; }
  MetricId metric() const { return metric_; }
  MetricKind kind() const { return metric_kind(metric_); }

  const ShareDistribution& distribution() const {
    if (const auto* d = std::get_if<ShareDistribution>(&payload_)) return *d;
    throw InvalidArgumentError("snapshot holds a scalar, not a distribution");
  }

  double value() const {
    if (const auto* v = std::get_if<double>(&payload_)) return *v;
    throw InvalidArgumentError("snapshot holds a distribution, not a scalar");
  }

  const std::string& source() const { return source_; }
  const std::string& fetched_at() const { return fetched_at_; }

 private:
  Date date_;
  MetricId metric_;
  std::variant<ShareDistribution, double> payload_;
  std::string source_;
  std::string fetched_at_;
};

}  // namespace ethdec
