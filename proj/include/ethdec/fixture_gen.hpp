// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ethdec/date.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/ingest.hpp"

namespace ethdec {

/// Writes a deterministic synthetic fixture corpus: one payload per
/// default source per day, in each parser's expected schema. Shares
/// drift smoothly day to day, with two deliberate regime changes to make
/// divergence analytics non-trivial: the dominant block builder exits at
/// day 45, and a new rollup enters at day 78. Entities that exist with
/// zero share are emitted as zero, not dropped.
struct FixtureGenOptions {
  Date begin;
  Date end;
  std::uint64_t seed = 42;
};

namespace fixture_detail {

constexpr double kTau = 6.283185307179586;

struct Entity {
  const char* name;
  double base;  ///< relative base share
};

/// Smoothly drifting positive weight for entity i on day t.
inline double drift(const Entity& e, std::size_t i, std::int64_t t, std::uint64_t seed) {
  const double phase = kTau * std::fmod(static_cast<double>(i) * 0.6180339887 +
                                            static_cast<double>(seed % 997) / 997.0,
                                        1.0);
  return e.base * (1.0 + 0.12 * std::sin(kTau * static_cast<double>(t) / 90.0 + phase));
}

inline double round_to(double v, double unit) { return std::round(v / unit) * unit; }

inline nlohmann::json share_rows(const std::vector<Entity>& entities, std::int64_t t,
                                 std::uint64_t seed, double total, double unit,
                                 const char* label_field, const char* quantity_field) {
  double weight_sum = 0.0;
  std::vector<double> w(entities.size());
  for (std::size_t i = 0; i < entities.size(); ++i) {
    w[i] = entities[i].base > 0.0 ? drift(entities[i], i, t, seed) : 0.0;
    weight_sum += w[i];
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const double quantity = weight_sum > 0.0 ? round_to(total * w[i] / weight_sum, unit) : 0.0;
    rows.push_back({{label_field, entities[i].name}, {quantity_field, quantity}});
  }
  return rows;
}

inline void write_payload(const std::filesystem::path& dir, const std::string& source_id,
                          Date date, const nlohmann::json& payload) {
  const auto source_dir = dir / source_id;
  std::error_code ec;
  std::filesystem::create_directories(source_dir, ec);
  const auto path = source_dir / (date.to_string() + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write fixture " + path.string());
  out << payload.dump(1) << '\n';
}

}  // namespace fixture_detail

inline void generate_fixture_corpus(const std::filesystem::path& fixture_dir,
                                    const FixtureGenOptions& options) {
  namespace fd = fixture_detail;
  using fd::Entity;
  using nlohmann::json;

  if (options.begin > options.end) throw InvalidArgumentError("empty fixture date range");

  static const std::vector<Entity> consensus_clients = {
      {"prysm", 0.38}, {"lighthouse", 0.33}, {"teku", 0.17}, {"nimbus", 0.08},
      {"lodestar", 0.04}};
  static const std::vector<Entity> execution_clients = {
      {"geth", 0.60}, {"nethermind", 0.22}, {"erigon", 0.10}, {"besu", 0.06},
      {"reth", 0.02}};
  static const std::vector<Entity> countries = {
      {"United States", 0.36}, {"Germany", 0.16}, {"Finland", 0.08},
      {"France", 0.07},        {"United Kingdom", 0.06}, {"Netherlands", 0.05},
      {"Canada", 0.05},        {"Australia", 0.04}, {"Singapore", 0.04},
      {"Japan", 0.03},         {"Ireland", 0.03},   {"Switzerland", 0.03}};
  static const std::vector<Entity> pools = {
      {"Lido", 0.31},       {"solo-stakers", 0.29}, {"Coinbase", 0.10},
      {"Kraken", 0.07},     {"Binance", 0.06},      {"Rocket Pool", 0.05},
      {"stakefish", 0.04},  {"Frax", 0.03},         {"Figment", 0.03},
      {"others", 0.02}};
  static const std::vector<Entity> builders_early = {
      {"builder-a", 0.76}, {"beaverbuild", 0.10}, {"rsync-builder", 0.08},
      {"flashbots-builder", 0.04}, {"titan", 0.02}};
  static const std::vector<Entity> builders_late = {
      {"builder-a", 0.0}, {"beaverbuild", 0.40}, {"rsync-builder", 0.30},
      {"flashbots-builder", 0.18}, {"titan", 0.12}};
  static const std::vector<Entity> relays = {
      {"flashbots", 0.35}, {"ultra-sound", 0.25}, {"bloxroute-max-profit", 0.15},
      {"agnostic", 0.12},  {"aestus", 0.08},      {"manifold", 0.05}};
  static const std::vector<Entity> bundlers = {
      {"pimlico", 0.76}, {"stackup", 0.09}, {"alchemy", 0.07}, {"biconomy", 0.05},
      {"candide", 0.02}, {"unipass", 0.01}};
  static const std::vector<Entity> deployers = {
      {"zerodev", 0.87}, {"safe", 0.05}, {"argent", 0.04}, {"soul-wallet", 0.03},
      {"ambire", 0.01}};
  static const std::vector<Entity> rollups_early = {
      {"Arbitrum One", 0.60}, {"Optimism", 0.26}, {"zkSync Era", 0.06},
      {"Starknet", 0.03},     {"Linea", 0.02},    {"Scroll", 0.015},
      {"Metis", 0.01},        {"Boba", 0.005}};
  static const std::vector<Entity> rollups_late = {
      {"Arbitrum One", 0.543}, {"Optimism", 0.259}, {"Base", 0.08},
      {"zkSync Era", 0.055},   {"Starknet", 0.025}, {"Linea", 0.02},
      {"Scroll", 0.01},        {"Metis", 0.005},    {"Boba", 0.003}};
  static const std::vector<Entity> stablecoins = {
      {"USDT", 0.46}, {"USDC", 0.36}, {"DAI", 0.10}, {"TUSD", 0.04},
      {"BUSD", 0.02}, {"FRAX", 0.02}};

  // Native-asset histogram: (representative balance, held ETH) rows at
  // finer granularity than the canonical buckets, so parsing has to
  // aggregate.
  static const std::vector<std::pair<double, double>> balance_rows = {
      {0.004, 41000},  {0.03, 95000},    {0.25, 410000},  {0.6, 520000},
      {2.5, 1600000},  {7.0, 2100000},   {30.0, 4800000}, {150.0, 7600000},
      {600.0, 9200000},{2500.0, 14000000},{15000.0, 21000000},
      {60000.0, 26000000}, {250000.0, 31000000}};

  const std::uint64_t seed = options.seed;
  for (Date day = options.begin; day <= options.end; day = day.plus_days(1)) {
    const std::int64_t t = day - options.begin;
    const double wobble = 1.0 + 0.05 * std::sin(fd::kTau * static_cast<double>(t) / 30.0);

    fd::write_payload(fixture_dir, "migalabs-client-distribution", day,
                      json{{"client_distribution",
                            fd::share_rows(consensus_clients, t, seed,
                                           std::round(5200 * wobble), 1.0, "client",
                                           "node_count")}});
    fd::write_payload(fixture_dir, "migalabs-geo-distribution", day,
                      json{{"country_distribution",
                            fd::share_rows(countries, t, seed + 1,
                                           std::round(5200 * wobble), 1.0, "country",
                                           "node_count")}});
    fd::write_payload(fixture_dir, "ethernodes-clients", day,
                      fd::share_rows(execution_clients, t, seed + 2,
                                     std::round(7900 * wobble), 1.0, "client", "value"));
    fd::write_payload(fixture_dir, "ethernodes-countries", day,
                      fd::share_rows(countries, t, seed + 3, std::round(7900 * wobble),
                                     1.0, "country", "value"));

    json histogram = json::array();
    for (std::size_t i = 0; i < balance_rows.size(); ++i) {
      const double amount = fd::round_to(
          balance_rows[i].second *
              (1.0 + 0.04 * std::sin(fd::kTau * (static_cast<double>(t) / 90.0 +
                                                 static_cast<double>(i) * 0.13))),
          0.01);
      histogram.push_back({{"balance_eth", balance_rows[i].first}, {"total_eth", amount}});
    }
    fd::write_payload(fixture_dir, "messari-eth-metrics", day,
                      json{{"data", {{"balance_histogram", histogram}}}});

    fd::write_payload(
        fixture_dir, "dune-staked-by-pool", day,
        json{{"result",
              {{"rows", fd::share_rows(pools, t, seed + 4, fd::round_to(24900000 * wobble, 1000),
                                       0.001, "entity", "amount_staked")}}}});

    // The dominant builder exits the market at day 45; its zero-block
    // entry stays in the payload.
    const auto& builders = t < 45 ? builders_early : builders_late;
    fd::write_payload(fixture_dir, "mevboost-builders", day,
                      json{{"builders",
                            fd::share_rows(builders, t, seed + 5, std::round(7100 * wobble),
                                           1.0, "name", "blocks")},
                           {"relays", json::array()}});
    fd::write_payload(fixture_dir, "mevboost-relays", day,
                      json{{"builders", json::array()},
                           {"relays", fd::share_rows(relays, t, seed + 6,
                                                     std::round(6400 * wobble), 1.0,
                                                     "name", "blocks")}});

    const std::int64_t userops_total = 60 + (t * 73) % 242;
    fd::write_payload(
        fixture_dir, "dune-userops-by-bundler", day,
        json{{"result",
              {{"rows", fd::share_rows(bundlers, t, seed + 7,
                                       static_cast<double>(userops_total), 1.0, "bundler",
                                       "userops")}}}});
    fd::write_payload(
        fixture_dir, "dune-wallets-by-deployer", day,
        json{{"result",
              {{"rows", fd::share_rows(deployers, t, seed + 8,
                                       std::round(240 * wobble), 1.0, "deployer",
                                       "wallets")}}}});

    // A new rollup launches at day 78: absent from earlier payloads
    // entirely, so alignment has to pad.
    const auto& rollups = t < 78 ? rollups_early : rollups_late;
    fd::write_payload(fixture_dir, "l2beat-rollup-tvl", day,
                      json{{"projects",
                            fd::share_rows(rollups, t, seed + 9,
                                           fd::round_to(8.1e9 * wobble, 1000), 0.01,
                                           "name", "tvl_usd")}});

    fd::write_payload(fixture_dir, "llama-stablecoins", day,
                      json{{"peggedAssets",
                            fd::share_rows(stablecoins, t, seed + 10,
                                           fd::round_to(9.2e9 * wobble, 1000), 0.01,
                                           "symbol", "circulating_usd")}});
  }
}

}  // namespace ethdec
