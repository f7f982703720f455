// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "ethdec/errors.hpp"

namespace ethdec {

/// The measured dimensions: twelve share distributions plus two scalar
/// economics metrics.
enum class MetricId {
  ConsensusNodesByClient,
  ConsensusNodesByCountry,
  ExecutionNodesByClient,
  ExecutionNodesByCountry,
  NativeAssetDistribution,
  StakedByPool,
  BlocksByBuilder,
  BlocksByRelay,
  UseropsByBundler,
  WalletsByDeployer,
  RollupsByTvl,
  StablecoinsByTvl,
  EffectiveInflationRate,
  StakedSupplyPercentage,
};

enum class MetricKind { Distribution, Scalar };

inline constexpr std::array<MetricId, 14> kAllMetrics = {
    MetricId::ConsensusNodesByClient,  MetricId::ConsensusNodesByCountry,
    MetricId::ExecutionNodesByClient,  MetricId::ExecutionNodesByCountry,
    MetricId::NativeAssetDistribution, MetricId::StakedByPool,
    MetricId::BlocksByBuilder,         MetricId::BlocksByRelay,
    MetricId::UseropsByBundler,        MetricId::WalletsByDeployer,
    MetricId::RollupsByTvl,            MetricId::StablecoinsByTvl,
    MetricId::EffectiveInflationRate,  MetricId::StakedSupplyPercentage,
};

inline std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::ConsensusNodesByClient: return "consensus-nodes-by-client";
    case MetricId::ConsensusNodesByCountry: return "consensus-nodes-by-country";
    case MetricId::ExecutionNodesByClient: return "execution-nodes-by-client";
    case MetricId::ExecutionNodesByCountry: return "execution-nodes-by-country";
    case MetricId::NativeAssetDistribution: return "native-asset-distribution";
    case MetricId::StakedByPool: return "staked-by-pool";
    case MetricId::BlocksByBuilder: return "blocks-by-builder";
    case MetricId::BlocksByRelay: return "blocks-by-relay";
    case MetricId::UseropsByBundler: return "userops-by-bundler";
    case MetricId::WalletsByDeployer: return "wallets-by-deployer";
    case MetricId::RollupsByTvl: return "rollups-by-tvl";
    case MetricId::StablecoinsByTvl: return "stablecoins-by-tvl";
    case MetricId::EffectiveInflationRate: return "effective-inflation-rate";
    case MetricId::StakedSupplyPercentage: return "staked-supply-percentage";
  }
  throw InvalidArgumentError("unknown metric id");
}

inline MetricId metric_from_string(std::string_view s) {
  for (MetricId id : kAllMetrics) {
    if (to_string(id) == s) return id;
  }
  throw InvalidArgumentError("unknown metric '" + std::string(s) + "'");
}

inline MetricKind metric_kind(MetricId id) {
  switch (id) {
    case MetricId::EffectiveInflationRate:
    case MetricId::StakedSupplyPercentage:
      return MetricKind::Scalar;
    default:
      return MetricKind::Distribution;
  }
}

inline bool is_distribution(MetricId id) {
  return metric_kind(id) == MetricKind::Distribution;
}

/// Per-metric weight and master-index eligibility. The default weights
/// grade each subsystem by the blast radius its capture would have on
/// the network: core consensus, staking and asset-ownership dimensions
/// carry full weight, builder/relay middleware less (validators fall
/// back to local block production), account abstraction least.
class MetricRegistry {
 public:
  struct Row {
    MetricId id;
    MetricKind kind;
    double weight;
    bool in_master_index;
  };

  static MetricRegistry defaults() {
    MetricRegistry r;
    auto add = [&r](MetricId id, double weight) {
      const MetricKind kind = metric_kind(id);
      r.rows_.push_back({id, kind, weight, kind == MetricKind::Distribution});
    };
    add(MetricId::ConsensusNodesByClient, 1.0);
    add(MetricId::ConsensusNodesByCountry, 1.0);
    add(MetricId::ExecutionNodesByClient, 1.0);
    add(MetricId::ExecutionNodesByCountry, 1.0);
    add(MetricId::NativeAssetDistribution, 1.0);
    add(MetricId::StakedByPool, 1.0);
    add(MetricId::BlocksByBuilder, 0.7);
    add(MetricId::BlocksByRelay, 0.7);
    add(MetricId::UseropsByBundler, 0.2);
    add(MetricId::WalletsByDeployer, 0.2);
    add(MetricId::RollupsByTvl, 0.5);
    add(MetricId::StablecoinsByTvl, 0.3);
    add(MetricId::EffectiveInflationRate, 0.0);
    add(MetricId::StakedSupplyPercentage, 0.0);
    return r;
  }

  const std::vector<Row>& rows() const { return rows_; }

  const Row& row(MetricId id) const {
    for (const auto& r : rows_) {
      if (r.id == id) return r;
    }
    throw InvalidArgumentError("metric not registered: " + std::string(to_string(id)));
  }

  void set_weight(MetricId id, double weight) {
    if (!(weight >= 0.0)) {
      throw InvalidArgumentError("weight must be nonnegative for " +
                                 std::string(to_string(id)));
    }
    for (auto& r : rows_) {
      if (r.id == id) {
        r.weight = weight;
        return;
      }
    }
    throw InvalidArgumentError("metric not registered: " + std::string(to_string(id)));
  }

  /// Distribution metrics in registry order.
  std::vector<MetricId> distribution_metrics() const {
    std::vector<MetricId> out;
    for (const auto& r : rows_) {
      if (r.kind == MetricKind::Distribution) out.push_back(r.id);
    }
    return out;
  }

  /// Weights of `subset` rescaled to sum to 1.
  std::vector<double> normalized_weights(const std::vector<MetricId>& subset) const {
    if (subset.empty()) {
      throw InvalidArgumentError("cannot normalize an empty weight set");
    }
    double sum = 0.0;
    for (MetricId id : subset) sum += row(id).weight;
    if (!(sum > 0.0)) {
      throw InvalidArgumentError("weights in the selected set sum to zero");
    }
    std::vector<double> out;
    out.reserve(subset.size());
    for (MetricId id : subset) out.push_back(row(id).weight / sum);
    return out;
  }

 private:
  MetricRegistry() = default;
  std::vector<Row> rows_;
};

}  // namespace ethdec
