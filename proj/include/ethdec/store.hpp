// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ethdec/date.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/metrics.hpp"
#include "ethdec/snapshot.hpp"

namespace ethdec {

/// Append-only daily snapshot store.
///
/// Layout: <root>/<metric>/<YYYY-MM>.jsonl, one self-describing JSON
/// record per line. Lines are never rewritten; overwriting appends a
/// newer record for the same (date, metric) and readers take the last
/// match, so the file stays a complete audit trail. Writes are
/// serialized through a store-level lock; reads need no lock.
class SnapshotStore {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit SnapshotStore(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  /// One line of the on-disk format. Keys are emitted in sorted order
  /// and numbers in shortest round-trip form, so serialize(deserialize(x))
  /// is byte-stable.
  static std::string serialize(const Snapshot& snap) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["date"] = snap.date().to_string();
    j["metric"] = std::string(to_string(snap.metric()));
    if (snap.kind() == MetricKind::Distribution) {
      j["kind"] = "distribution";
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& e : snap.distribution().entries()) {
        entries.push_back({{"label", e.label}, {"quantity", e.quantity}});
      }
      j["entries"] = std::move(entries);
    } else {
      j["kind"] = "scalar";
      j["value"] = snap.value();
    }
    j["source"] = snap.source();
    j["fetched_at"] = snap.fetched_at();
    return j.dump();
  }

  static Snapshot deserialize(std::string_view line) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("store", e.byte, e.what());
    }
    auto field = [&j](const char* name) -> const nlohmann::json& {
      auto it = j.find(name);
      if (it == j.end()) {
        throw SchemaMismatchError(std::string("store record missing field '") + name + "'");
      }
      return *it;
    };
    if (!field("schema_version").is_number_integer() ||
        field("schema_version").get<int>() != kSchemaVersion) {
      throw SchemaMismatchError("unsupported store schema version");
    }
    const Date date = Date::parse(field("date").get<std::string>());
    const MetricId metric = metric_from_string(field("metric").get<std::string>());
    const std::string kind = field("kind").get<std::string>();
    const std::string source = field("source").get<std::string>();
    const std::string fetched_at = field("fetched_at").get<std::string>();
    if (kind == "distribution") {
      std::vector<ShareEntry> entries;
      for (const auto& e : field("entries")) {
        if (!e.contains("label") || !e.contains("quantity") || !e["quantity"].is_number()) {
          throw SchemaMismatchError("store entry needs 'label' and numeric 'quantity'");
        }
        entries.push_back({e["label"].get<std::string>(), e["quantity"].get<double>()});
      }
      return Snapshot(date, metric, ShareDistribution(std::move(entries)), source, fetched_at);
    }
    if (kind == "scalar") {
      if (!field("value").is_number()) {
        throw SchemaMismatchError("scalar store record needs a numeric 'value'");
      }
      return Snapshot(date, metric, field("value").get<double>(), source, fetched_at);
    }
    throw SchemaMismatchError("unknown store record kind '" + kind + "'");
  }

  bool contains(Date date, MetricId metric) const {
    return find_line(date, metric).has_value();
  }

  /// Appends one record. Rejects an existing (date, metric) unless
  /// `overwrite` is set, in which case a newer record is appended and
  /// shadows the old one.
  void append(const Snapshot& snap, bool overwrite = false) {
    std::lock_guard<std::mutex> lock(write_mu_);
    if (!overwrite && contains(snap.date(), snap.metric())) {
      throw DuplicateSnapshotError("snapshot already stored for " +
                                   snap.date().to_string() + " " +
                                   std::string(to_string(snap.metric())));
    }
    const auto path = file_for(snap.metric(), snap.date());
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open " + path.string() + " for append");
    out << serialize(snap) << '\n';
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
  }

  Snapshot read(Date date, MetricId metric) const {
    auto line = find_line(date, metric);
    if (!line) {
      throw MissingDataError("no snapshot for " + date.to_string() + " " +
                             std::string(to_string(metric)));
    }
    return deserialize(*line);
  }

  std::optional<Snapshot> try_read(Date date, MetricId metric) const {
    auto line = find_line(date, metric);
    if (!line) return std::nullopt;
    return deserialize(*line);
  }

  /// All dates stored for one metric, ascending and unique.
  std::vector<Date> dates(MetricId metric) const {
    std::set<Date> found;
    const auto dir = root_ / std::string(to_string(metric));
    if (std::filesystem::is_directory(dir)) {
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".jsonl") continue;
        for_each_line(entry.path(), [&found](const std::string& line) {
          found.insert(Date::parse(date_of(line)));
        });
      }
    }
    return {found.begin(), found.end()};
  }

  /// Union of stored dates over all metrics, ascending and unique.
  std::vector<Date> dates() const {
    std::set<Date> found;
    for (MetricId id : kAllMetrics) {
      for (Date d : dates(id)) found.insert(d);
    }
    return {found.begin(), found.end()};
  }

 private:
  std::filesystem::path file_for(MetricId metric, Date date) const {
    return root_ / std::string(to_string(metric)) / (date.month_key() + ".jsonl");
  }

  template <typename Fn>
  static void for_each_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) fn(line);
    }
  }

  // Serialized keys are sorted, so every record starts with its date
  // field; that makes matching a cheap prefix test.
  static std::string_view date_of(std::string_view line) {
    constexpr std::string_view prefix = "{\"date\":\"";
    if (line.size() < prefix.size() + 10 || line.substr(0, prefix.size()) != prefix) {
      throw SchemaMismatchError("malformed store line");
    }
    return line.substr(prefix.size(), 10);
  }

  std::optional<std::string> find_line(Date date, MetricId metric) const {
    const auto path = file_for(metric, date);
    const std::string want = date.to_string();
    std::optional<std::string> last;
    for_each_line(path, [&](const std::string& line) {
      if (date_of(line) == want) last = line;
    });
    return last;
  }

  std::filesystem::path root_;
  mutable std::mutex write_mu_;
};

/// The latest maximal run of consecutive stored days, used as the
/// default reporting range.
inline std::optional<std::pair<Date, Date>> latest_contiguous_run(const SnapshotStore& store) {
  const std::vector<Date> all = store.dates();
  if (all.empty()) return std::nullopt;
  Date end = all.back();
  Date begin = end;
  for (auto it = all.rbegin() + 1; it != all.rend(); ++it) {
    if (begin - *it == 1) {
      begin = *it;
    } else {
      break;
    }
  }
  return std::make_pair(begin, end);
}

}  // namespace ethdec
