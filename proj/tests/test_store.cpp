// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "ethdec/store.hpp"
#include "helpers.hpp"

using namespace ethdec;
using testutil::TempDir;

namespace {

Snapshot sample_distribution(Date date) {
  return Snapshot(date, MetricId::StakedByPool,
                  ShareDistribution({{"Lido", 7730000.25}, {"solo", 7200000.0},
                                     {"Coinbase", 2490000.5}, {"zero-pool", 0.0}}),
                  "dune-staked-by-pool", "2023-08-20T06:00:00Z");
}

}  // namespace

TEST_CASE("write then read returns an equal snapshot") {
  TempDir tmp("store-rt");
  SnapshotStore store(tmp.path());
  const Date day = Date::parse("2023-05-23");
  const Snapshot written = sample_distribution(day);
  store.append(written);
  const Snapshot read = store.read(day, MetricId::StakedByPool);
  CHECK(SnapshotStore::serialize(read) == SnapshotStore::serialize(written));
  CHECK(read.distribution().entries() == written.distribution().entries());
  CHECK(read.source() == written.source());
  CHECK(read.fetched_at() == written.fetched_at());
}

TEST_CASE("serialized records are byte-stable through round-trips") {
  const Snapshot snap = sample_distribution(Date::parse("2023-06-15"));
  const std::string once = SnapshotStore::serialize(snap);
  const std::string twice = SnapshotStore::serialize(SnapshotStore::deserialize(once));
  CHECK(once == twice);

  const Snapshot scalar(Date::parse("2023-06-15"), MetricId::EffectiveInflationRate,
                        -0.0094, "ultrasound", "2023-06-15T00:00:00Z");
  const std::string s1 = SnapshotStore::serialize(scalar);
  CHECK(s1 == SnapshotStore::serialize(SnapshotStore::deserialize(s1)));
}

TEST_CASE("store rejects malformed and mismatched records") {
  CHECK_THROWS_AS(SnapshotStore::deserialize("{not json"), ParseError);
  CHECK_THROWS_AS(SnapshotStore::deserialize("{}"), SchemaMismatchError);
  CHECK_THROWS_AS(
      SnapshotStore::deserialize(
          R"({"schema_version":99,"date":"2023-05-23","metric":"staked-by-pool","kind":"scalar","value":1,"source":"s","fetched_at":"t"})"),
      SchemaMismatchError);
}

TEST_CASE("appending an existing day is rejected without the overwrite flag") {
  TempDir tmp("store-dup");
  SnapshotStore store(tmp.path());
  const Date day = Date::parse("2023-05-23");
  store.append(sample_distribution(day));
  CHECK_THROWS_AS(store.append(sample_distribution(day)), DuplicateSnapshotError);

  // overwrite appends a shadowing record; the newest one wins
  const Snapshot updated(day, MetricId::StakedByPool,
                         ShareDistribution({{"Lido", 1.0}, {"other", 1.0}}),
                         "dune-staked-by-pool", "2023-08-21T06:00:00Z");
  store.append(updated, true);
  CHECK(store.read(day, MetricId::StakedByPool).fetched_at() == "2023-08-21T06:00:00Z");
  CHECK(store.read(day, MetricId::StakedByPool).distribution().size() == 2);
}

TEST_CASE("reading an unknown record is a missing-data error") {
  TempDir tmp("store-miss");
  SnapshotStore store(tmp.path());
  CHECK_THROWS_AS(store.read(Date::parse("2023-05-23"), MetricId::StakedByPool),
                  MissingDataError);
  CHECK_FALSE(store.try_read(Date::parse("2023-05-23"), MetricId::StakedByPool).has_value());
  CHECK_FALSE(store.contains(Date::parse("2023-05-23"), MetricId::StakedByPool));
}

TEST_CASE("records shard into one file per metric and month") {
  TempDir tmp("store-layout");
  SnapshotStore store(tmp.path());
  store.append(sample_distribution(Date::parse("2023-05-31")));
  store.append(sample_distribution(Date::parse("2023-06-01")));
  CHECK(std::filesystem::is_regular_file(tmp.path() / "staked-by-pool" / "2023-05.jsonl"));
  CHECK(std::filesystem::is_regular_file(tmp.path() / "staked-by-pool" / "2023-06.jsonl"));

  const auto dates = store.dates(MetricId::StakedByPool);
  REQUIRE(dates.size() == 2);
  CHECK(dates[0].to_string() == "2023-05-31");
  CHECK(dates[1].to_string() == "2023-06-01");
}

TEST_CASE("latest contiguous run skips over gaps") {
  TempDir tmp("store-run");
  SnapshotStore store(tmp.path());
  CHECK_FALSE(latest_contiguous_run(store).has_value());

  for (const char* day : {"2023-05-01", "2023-05-02", "2023-05-10", "2023-05-11",
                          "2023-05-12"}) {
    store.append(sample_distribution(Date::parse(day)));
  }
  const auto run = latest_contiguous_run(store);
  REQUIRE(run.has_value());
  CHECK(run->first.to_string() == "2023-05-10");
  CHECK(run->second.to_string() == "2023-05-12");
}
