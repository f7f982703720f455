// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ethdec/date.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/metrics.hpp"
#include "ethdec/snapshot.hpp"
#include "ethdec/store.hpp"

namespace ethdec {

/// Where and how one metric's raw data is obtained. The endpoint is the
/// upstream HTTP source; the parser id selects the payload schema, which
/// is frozen by the fixture corpus; schema drift fails loudly instead
/// of being guessed around.
struct SourceSpec {
  std::string source_id;
  MetricId metric = MetricId::ConsensusNodesByClient;
  std::string endpoint;
  std::string parser_id;
  bool requires_api_key = false;  ///< Dune-hosted queries need DUNE_API_KEY
  std::string cadence = "daily";
};

/// The default daily polling plan: one source per distribution metric.
inline std::vector<SourceSpec> default_sources() {
  return {
      {"migalabs-client-distribution", MetricId::ConsensusNodesByClient,
       "https://migalabs.es/api/v1/client-distribution", "migalabs-client"},
      {"migalabs-geo-distribution", MetricId::ConsensusNodesByCountry,
       "https://migalabs.es/api/v1/geo-distribution", "migalabs-geo"},
      {"ethernodes-clients", MetricId::ExecutionNodesByClient,
       "https://www.ethernodes.org/", "ethernodes-client"},
      {"ethernodes-countries", MetricId::ExecutionNodesByCountry,
       "https://www.ethernodes.org/countries", "ethernodes-country"},
      {"messari-eth-metrics", MetricId::NativeAssetDistribution,
       "https://data.messari.io/api/v1/assets/ethereum/metrics", "messari-balances"},
      {"dune-staked-by-pool", MetricId::StakedByPool,
       "https://api.dune.com/api/v1/query/2394100/results", "dune-staked-pool", true},
      {"mevboost-builders", MetricId::BlocksByBuilder,
       "https://mevboost.pics/data.html", "mevboost-builders"},
      {"mevboost-relays", MetricId::BlocksByRelay,
       "https://mevboost.pics/data.html", "mevboost-relays"},
      {"dune-userops-by-bundler", MetricId::UseropsByBundler,
       "https://dune.com/queries/2193933/3599135", "dune-bundlers", true},
      {"dune-wallets-by-deployer", MetricId::WalletsByDeployer,
       "https://dune.com/queries/2434102/3999582", "dune-deployers", true},
      {"l2beat-rollup-tvl", MetricId::RollupsByTvl,
       "https://l2beat.com/scaling/tvl", "l2beat-tvl"},
      {"llama-stablecoins", MetricId::StablecoinsByTvl,
       "https://stablecoins.llama.fi/stablecoins", "llama-stablecoins"},
  };
}

enum class FetchMode { Live, Fixture };

inline FetchMode fetch_mode_from_string(std::string_view s) {
  if (s == "live") return FetchMode::Live;
  if (s == "fixture") return FetchMode::Fixture;
  throw InvalidArgumentError("mode must be 'live' or 'fixture'");
}

struct FetchOptions {
  int attempts = 3;
  int backoff_ms = 250;   ///< first retry delay; doubles per attempt
  int timeout_ms = 10000;
  std::optional<std::string> dune_api_key;
};

/// Reads DUNE_API_KEY and ETHDEC_HTTP_TIMEOUT_MS from the environment.
inline FetchOptions fetch_options_from_env() {
  FetchOptions opts;
  if (const char* key = std::getenv("DUNE_API_KEY")) {
    if (*key) opts.dune_api_key = key;
  }
  if (const char* timeout = std::getenv("ETHDEC_HTTP_TIMEOUT_MS")) {
    const int ms = std::atoi(timeout);
    if (ms > 0) opts.timeout_ms = ms;
  }
  return opts;
}

struct FetchResult {
  std::string payload;
  std::string fetched_at;         ///< UTC, ISO-8601
  FetchMode mode = FetchMode::Fixture;
  std::string note;               ///< e.g. a live->fixture downgrade
};

inline std::string now_utc_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[24];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::filesystem::path fixture_path(const std::filesystem::path& fixture_dir,
                                          const SourceSpec& spec, Date date) {
  return fixture_dir / spec.source_id / (date.to_string() + ".json");
}

namespace detail {

inline std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgumentError("endpoint is not an absolute URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in) throw IoError("cannot read " + path.string());
  return buf.str();
}

}  // namespace detail

/// Retrieves one source's raw payload for one day. Fixture mode replays
/// the recorded file <fixture-dir>/<source-id>/<date>.json; live mode
/// issues an HTTP GET with bounded exponential backoff and surfaces the
/// full per-attempt trace on failure.
inline FetchResult fetch(const SourceSpec& spec, Date date, FetchMode mode,
                         const std::filesystem::path& fixture_dir,
                         const FetchOptions& options = {}) {
  if (mode == FetchMode::Fixture) {
    const auto path = fixture_path(fixture_dir, spec, date);
    if (!std::filesystem::is_regular_file(path)) {
      throw FixtureMissingError("fixture missing: " + path.string());
    }
    return {detail::read_file(path), now_utc_iso8601(), FetchMode::Fixture, ""};
  }

  const auto [base, path] = detail::split_url(spec.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(0, options.timeout_ms * 1000LL);
  client.set_read_timeout(0, options.timeout_ms * 1000LL);
  client.set_follow_location(true);
  httplib::Headers headers;
  if (spec.requires_api_key && options.dune_api_key) {
    headers.emplace("X-Dune-API-Key", *options.dune_api_key);
  }

  std::string trace;
  for (int attempt = 1; attempt <= options.attempts; ++attempt) {
    auto res = client.Get(path, headers);
    if (res && res->status >= 200 && res->status < 300) {
      return {res->body, now_utc_iso8601(), FetchMode::Live, ""};
    }
    if (!trace.empty()) trace += "; ";
    trace += "attempt " + std::to_string(attempt) + ": ";
    trace += res ? "HTTP " + std::to_string(res->status)
                 : std::string(httplib::to_string(res.error()));
    if (attempt < options.attempts) {
      const auto delay = std::chrono::milliseconds(options.backoff_ms) * (1 << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
  }
  throw SourceUnavailableError(spec.source_id + ": unavailable after " +
                               std::to_string(options.attempts) + " attempts (" +
                               trace + ")");
}

namespace detail {

inline nlohmann::json parse_json(const SourceSpec& spec, std::string_view payload) {
  try {
    return nlohmann::json::parse(payload);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(spec.source_id, e.byte, e.what());
  }
}

inline const nlohmann::json& require(const SourceSpec& spec, const nlohmann::json& j,
                                     const char* field) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw SchemaMismatchError(spec.source_id + ": missing field '" + field + "'");
  }
  return *it;
}

inline double require_number(const SourceSpec& spec, const nlohmann::json& j,
                             const char* field) {
  const auto& v = require(spec, j, field);
  if (!v.is_number()) {
    throw SchemaMismatchError(spec.source_id + ": field '" + field + "' is not a number");
  }
  return v.get<double>();
}

inline std::string require_string(const SourceSpec& spec, const nlohmann::json& j,
                                  const char* field) {
  const auto& v = require(spec, j, field);
  if (!v.is_string()) {
    throw SchemaMismatchError(spec.source_id + ": field '" + field + "' is not a string");
  }
  return v.get<std::string>();
}

/// Builds entries from an array of objects, taking labels verbatim.
inline ShareDistribution entries_from_array(const SourceSpec& spec,
                                            const nlohmann::json& arr,
                                            const char* label_field,
                                            const char* quantity_field) {
  if (!arr.is_array() || arr.empty()) {
    throw SchemaMismatchError(spec.source_id + ": expected a nonempty array");
  }
  std::vector<ShareEntry> entries;
  entries.reserve(arr.size());
  for (const auto& item : arr) {
    entries.push_back({require_string(spec, item, label_field),
                       require_number(spec, item, quantity_field)});
  }
  return ShareDistribution(std::move(entries));
}

}  // namespace detail

/// Canonical ETH balance buckets for the native-asset distribution:
/// powers of ten from 0.01 to 100k ETH. Every bucket is always present
/// (zero allowed) so category alignment is stable across days.
struct BalanceBucket {
  double upper;  ///< exclusive upper bound in ETH; +inf for the last
  const char* label;
};

inline const std::vector<BalanceBucket>& balance_buckets() {
  static const std::vector<BalanceBucket> buckets = {
      {0.01, "<0.01"},      {0.1, "0.01-0.1"},   {1.0, "0.1-1"},
      {10.0, "1-10"},       {100.0, "10-100"},   {1000.0, "100-1k"},
      {10000.0, "1k-10k"},  {100000.0, "10k-100k"},
      {std::numeric_limits<double>::infinity(), ">=100k"},
  };
  return buckets;
}

/// Parses one raw payload into a Snapshot according to the source's
/// parser id. Malformed JSON is a parse error with the byte offset;
/// a structurally valid payload with missing fields is a schema
/// mismatch.
inline Snapshot parse_payload(const SourceSpec& spec, std::string_view payload,
                              Date date, const std::string& fetched_at) {
  using nlohmann::json;
  const json j = detail::parse_json(spec, payload);
  auto dist_snapshot = [&](ShareDistribution d) {
    return Snapshot(date, spec.metric, std::move(d), spec.source_id, fetched_at);
  };

  if (spec.parser_id == "migalabs-client") {
    return dist_snapshot(detail::entries_from_array(
        spec, detail::require(spec, j, "client_distribution"), "client", "node_count"));
  }
  if (spec.parser_id == "migalabs-geo") {
    return dist_snapshot(detail::entries_from_array(
        spec, detail::require(spec, j, "country_distribution"), "country", "node_count"));
  }
  if (spec.parser_id == "ethernodes-client") {
    return dist_snapshot(detail::entries_from_array(spec, j, "client", "value"));
  }
  if (spec.parser_id == "ethernodes-country") {
    return dist_snapshot(detail::entries_from_array(spec, j, "country", "value"));
  }
  if (spec.parser_id == "messari-balances") {
    // Histogram rows at arbitrary granularity, accumulated into the
    // canonical balance buckets before storage.
    const auto& rows = detail::require(spec, detail::require(spec, j, "data"),
                                       "balance_histogram");
    if (!rows.is_array() || rows.empty()) {
      throw SchemaMismatchError(spec.source_id + ": expected a nonempty balance histogram");
    }
    const auto& buckets = balance_buckets();
    std::vector<double> totals(buckets.size(), 0.0);
    for (const auto& row : rows) {
      const double balance = detail::require_number(spec, row, "balance_eth");
      const double amount = detail::require_number(spec, row, "total_eth");
      std::size_t b = 0;
      while (b + 1 < buckets.size() && balance >= buckets[b].upper) ++b;
      totals[b] += amount;
    }
    std::vector<ShareEntry> entries;
    entries.reserve(buckets.size());
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      entries.push_back({buckets[b].label, totals[b]});
    }
    return dist_snapshot(ShareDistribution(std::move(entries)));
  }
  if (spec.parser_id == "dune-staked-pool") {
    const auto& rows = detail::require(spec, detail::require(spec, j, "result"), "rows");
    return dist_snapshot(detail::entries_from_array(spec, rows, "entity", "amount_staked"));
  }
  if (spec.parser_id == "mevboost-builders") {
    return dist_snapshot(detail::entries_from_array(
        spec, detail::require(spec, j, "builders"), "name", "blocks"));
  }
  if (spec.parser_id == "mevboost-relays") {
    return dist_snapshot(detail::entries_from_array(
        spec, detail::require(spec, j, "relays"), "name", "blocks"));
  }
  if (spec.parser_id == "dune-bundlers") {
    const auto& rows = detail::require(spec, detail::require(spec, j, "result"), "rows");
    return dist_snapshot(detail::entries_from_array(spec, rows, "bundler", "userops"));
  }
  if (spec.parser_id == "dune-deployers") {
    const auto& rows = detail::require(spec, detail::require(spec, j, "result"), "rows");
    return dist_snapshot(detail::entries_from_array(spec, rows, "deployer", "wallets"));
  }
  if (spec.parser_id == "l2beat-tvl") {
    return dist_snapshot(detail::entries_from_array(
        spec, detail::require(spec, j, "projects"), "name", "tvl_usd"));
  }
  if (spec.parser_id == "llama-stablecoins") {
    return dist_snapshot(detail::entries_from_array(
        spec, detail::require(spec, j, "peggedAssets"), "symbol", "circulating_usd"));
  }
  if (spec.parser_id == "scalar-value") {
    return Snapshot(date, spec.metric, detail::require_number(spec, j, "value"),
                    spec.source_id, fetched_at);
  }
  throw InvalidArgumentError("unknown parser id '" + spec.parser_id + "'");
}

/// Per-source outcome of one ingestion day.
struct IngestOutcome {
  enum class Status { Stored, Skipped, Failed };
  std::string source_id;
  MetricId metric = MetricId::ConsensusNodesByClient;
  Status status = Status::Failed;
  std::string detail;
};

struct IngestReport {
  Date date;
  std::vector<IngestOutcome> outcomes;

  int stored() const { return count(IngestOutcome::Status::Stored); }
  int skipped() const { return count(IngestOutcome::Status::Skipped); }
  int failed() const { return count(IngestOutcome::Status::Failed); }

 private:
  int count(IngestOutcome::Status s) const {
    int n = 0;
    for (const auto& o : outcomes) n += o.status == s;
    return n;
  }
};

/// Ingests one day across all sources. Sources are attempted
/// independently (one failure never blocks the others) and every
/// outcome is itemized. Live fetches run concurrently; a Dune source
/// without an API key is downgraded to fixture replay with a note.
/// Existing (date, metric) records are skipped unless `overwrite`.
inline IngestReport ingest_day(const std::vector<SourceSpec>& specs, Date date,
                               FetchMode mode, SnapshotStore& store,
                               const std::filesystem::path& fixture_dir,
                               const FetchOptions& options = {}, bool overwrite = false) {
  struct Fetched {
    FetchResult result;
    std::string note;
  };
  auto fetch_one = [&](const SourceSpec& spec) -> Fetched {
    if (mode == FetchMode::Live && spec.requires_api_key && !options.dune_api_key) {
      FetchResult r = fetch(spec, date, FetchMode::Fixture, fixture_dir, options);
      r.note = "no DUNE_API_KEY in environment; fell back to fixture";
      return {std::move(r), "no DUNE_API_KEY in environment; fell back to fixture"};
    }
    FetchResult r = fetch(spec, date, mode, fixture_dir, options);
    return {std::move(r), ""};
  };

  // Fetch stage: network fetches in parallel, fixture reads inline.
  std::vector<std::future<Fetched>> futures;
  if (mode == FetchMode::Live) {
    futures.reserve(specs.size());
    for (const auto& spec : specs) {
      futures.push_back(std::async(std::launch::async, fetch_one, std::cref(spec)));
    }
  }

  IngestReport report;
  report.date = date;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SourceSpec& spec = specs[i];
    IngestOutcome outcome;
    outcome.source_id = spec.source_id;
    outcome.metric = spec.metric;
    try {
      Fetched fetched = mode == FetchMode::Live ? futures[i].get() : fetch_one(spec);
      Snapshot snap = parse_payload(spec, fetched.result.payload, date,
                                    fetched.result.fetched_at);
      store.append(snap, overwrite);
      outcome.status = IngestOutcome::Status::Stored;
      outcome.detail = fetched.note;
    } catch (const DuplicateSnapshotError& e) {
      outcome.status = IngestOutcome::Status::Skipped;
      outcome.detail = e.what();
    } catch (const Error& e) {
      outcome.status = IngestOutcome::Status::Failed;
      outcome.detail = e.what();
    }
    report.outcomes.push_back(std::move(outcome));
  }
  return report;
}

}  // namespace ethdec
