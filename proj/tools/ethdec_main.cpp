// SPDX-License-Identifier: Apache-2.0
//
// ethdec: decentralization analytics over daily Ethereum snapshots.
//
// Subcommands: ingest, indices, jsd, master, report, lorenz, synth.
// Exit codes: 0 success, 1 operational failure (itemized), 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ethdec/date.hpp"
#include "ethdec/errors.hpp"
#include "ethdec/fixture_gen.hpp"
#include "ethdec/indices.hpp"
#include "ethdec/ingest.hpp"
#include "ethdec/metrics.hpp"
#include "ethdec/report.hpp"
#include "ethdec/store.hpp"
#include "ethdec/timeseries.hpp"

namespace {

using namespace ethdec;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string store_path = "snapshots";
  std::string fixture_dir = "fixtures";
  std::string mode = "fixture";
  std::string output_dir = "out";
  std::string format = "all";  // csv | svg | terminal | all
  std::string date;
  std::string range;  // YYYY-MM-DD..YYYY-MM-DD
  std::string metric;
  std::vector<std::string> exclude;
  std::string weights_file;
  double epsilon = 0.5;
  std::uint64_t seed = 42;
  bool overwrite = false;
};

Date parse_date_flag(const std::string& s, const char* flag) {
  try {
    return Date::parse(s);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::pair<Date, Date> parse_range_flag(const std::string& s) {
  const auto sep = s.find("..");
  if (sep == std::string::npos) {
    throw UsageError("--range expects YYYY-MM-DD..YYYY-MM-DD");
  }
  const Date begin = parse_date_flag(s.substr(0, sep), "--range");
  const Date end = parse_date_flag(s.substr(sep + 2), "--range");
  if (begin > end) throw UsageError("--range start is after its end");
  return {begin, end};
}

std::pair<Date, Date> resolve_range(const CliConfig& cfg, const SnapshotStore& store) {
  if (!cfg.range.empty()) return parse_range_flag(cfg.range);
  if (!cfg.date.empty()) {
    const Date d = parse_date_flag(cfg.date, "--date");
    return {d, d};
  }
  auto run = latest_contiguous_run(store);
  if (!run) throw Error("store is empty; pass --date or --range");
  return *run;
}

Date resolve_date(const CliConfig& cfg, const SnapshotStore& store) {
  if (!cfg.date.empty()) return parse_date_flag(cfg.date, "--date");
  const auto all = store.dates();
  if (all.empty()) throw Error("store is empty; pass --date");
  return all.back();
}

MetricRegistry build_registry(const CliConfig& cfg) {
  MetricRegistry registry = MetricRegistry::defaults();
  if (cfg.weights_file.empty()) return registry;
  std::ifstream in(cfg.weights_file);
  if (!in) throw UsageError("cannot open weights file " + cfg.weights_file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("weights file: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("weights file must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw UsageError("weight for '" + key + "' is not a number");
    try {
      registry.set_weight(metric_from_string(key), value.get<double>());
    } catch (const InvalidArgumentError& e) {
      throw UsageError(std::string("weights file: ") + e.what());
    }
  }
  return registry;
}

std::set<MetricId> build_exclusions(const CliConfig& cfg) {
  std::set<MetricId> out;
  for (const auto& name : cfg.exclude) {
    try {
      out.insert(metric_from_string(name));
    } catch (const InvalidArgumentError& e) {
      throw UsageError(std::string("--exclude: ") + e.what());
    }
  }
  return out;
}

std::optional<MetricId> build_metric_filter(const CliConfig& cfg) {
  if (cfg.metric.empty()) return std::nullopt;
  try {
    return metric_from_string(cfg.metric);
  } catch (const InvalidArgumentError& e) {
    throw UsageError(std::string("--metric: ") + e.what());
  }
}

bool wants(const CliConfig& cfg, const char* fmt) {
  return cfg.format == "all" || cfg.format == fmt;
}

std::filesystem::path out_path(const CliConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

void validate_common(const CliConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
  if (cfg.mode != "live" && cfg.mode != "fixture") {
    throw UsageError("--mode must be 'live' or 'fixture'");
  }
  if (cfg.format != "all" && cfg.format != "csv" && cfg.format != "svg" &&
      cfg.format != "terminal") {
    throw UsageError("--format must be csv, svg, terminal or all");
  }
}

int cmd_ingest(const CliConfig& cfg) {
  if (cfg.date.empty() && cfg.range.empty()) {
    throw UsageError("ingest needs --date or --range");
  }
  SnapshotStore store{cfg.store_path};
  const auto [begin, end] = !cfg.range.empty()
                                ? parse_range_flag(cfg.range)
                                : std::pair{parse_date_flag(cfg.date, "--date"),
                                            parse_date_flag(cfg.date, "--date")};
  const FetchMode mode = fetch_mode_from_string(cfg.mode);
  const FetchOptions options = fetch_options_from_env();
  const auto specs = default_sources();

  int total_failed = 0;
  for (Date day = begin; day <= end; day = day.plus_days(1)) {
    const IngestReport report =
        ingest_day(specs, day, mode, store, cfg.fixture_dir, options, cfg.overwrite);
    for (const auto& o : report.outcomes) {
      if (o.status == IngestOutcome::Status::Stored) {
        std::cout << day.to_string() << ' ' << o.source_id << " stored";
        if (!o.detail.empty()) std::cout << " (" << o.detail << ')';
        std::cout << '\n';
      } else if (o.status == IngestOutcome::Status::Skipped) {
        std::cout << day.to_string() << ' ' << o.source_id << " skipped (already stored)\n";
      } else {
        std::cout << day.to_string() << ' ' << o.source_id << " FAILED: " << o.detail
                  << '\n';
      }
    }
    std::cout << day.to_string() << " summary: " << report.stored() << " stored, "
              << report.skipped() << " skipped, " << report.failed() << " failed\n";
    total_failed += report.failed();
  }
  return total_failed > 0 ? 1 : 0;
}

int cmd_indices(const CliConfig& cfg) {
  SnapshotStore store{cfg.store_path};
  const Date date = resolve_date(cfg, store);
  const MetricRegistry registry = build_registry(cfg);
  const IndexReport report =
      index_report(store, date, registry, cfg.epsilon, build_metric_filter(cfg));
  const std::string csv = indices_csv(report);
  std::cout << csv;
  if (wants(cfg, "csv")) {
    write_file(out_path(cfg, "indices_" + date.to_string() + ".csv"), csv);
    if (!report.scalars.empty()) {
      write_file(out_path(cfg, "scalars_" + date.to_string() + ".csv"),
                 scalars_csv(report));
    }
  }
  return 0;
}

int cmd_jsd(const CliConfig& cfg) {
  SnapshotStore store{cfg.store_path};
  const Date end = resolve_date(cfg, store);
  const MetricRegistry registry = MetricRegistry::defaults();
  const auto filter = build_metric_filter(cfg);

  std::vector<std::pair<MetricId, JsdIntervals>> rows;
  for (MetricId id : registry.distribution_metrics()) {
    if (filter && id != *filter) continue;
    rows.emplace_back(id, jsd_intervals(store, id, end));
  }
  const std::string csv = jsd_intervals_csv(rows, end);
  std::cout << csv;
  if (wants(cfg, "csv")) {
    write_file(out_path(cfg, "jsd_intervals_" + end.to_string() + ".csv"), csv);
  }
  return 0;
}

std::vector<MasterSeries> compute_master(const CliConfig& cfg, const SnapshotStore& store,
                                         Date begin, Date end) {
  const MetricRegistry registry = build_registry(cfg);
  MasterSeriesOptions options;
  options.epsilon = cfg.epsilon;
  options.exclusions = build_exclusions(cfg);
  std::vector<MasterSeries> out;
  for (IndexFamily family : kAllFamilies) {
    out.push_back(master_series(store, family, registry, begin, end, options));
  }
  return out;
}

int cmd_master(const CliConfig& cfg) {
  SnapshotStore store{cfg.store_path};
  const auto [begin, end] = resolve_range(cfg, store);
  const auto series = compute_master(cfg, store, begin, end);
  const std::string csv = master_series_csv(series);
  std::cout << csv;
  if (wants(cfg, "csv")) write_file(out_path(cfg, "master_series.csv"), csv);
  if (wants(cfg, "svg")) write_file(out_path(cfg, "master_chart.svg"), master_series_svg(series));
  return 0;
}

int cmd_report(const CliConfig& cfg) {
  SnapshotStore store{cfg.store_path};
  const auto [begin, end] = resolve_range(cfg, store);
  const MetricRegistry registry = build_registry(cfg);

  const AveragesTable averages = averages_table(store, begin, end, registry, cfg.epsilon);
  const JsdTable divergences = jsd_table(store, end);
  const auto series = compute_master(cfg, store, begin, end);
  std::vector<IndexSeries> per_metric;
  for (IndexFamily family : kAllFamilies) {
    per_metric.push_back(index_series(store, family, registry, begin, end, cfg.epsilon));
  }

  if (wants(cfg, "csv")) {
    write_file(out_path(cfg, "averages.csv"), averages_csv(averages));
    write_file(out_path(cfg, "jsd_table.csv"), jsd_table_csv(divergences));
    write_file(out_path(cfg, "master_series.csv"), master_series_csv(series));
    write_file(out_path(cfg, "index_series.csv"), index_series_csv(per_metric));
  }
  if (wants(cfg, "svg")) {
    write_file(out_path(cfg, "master_chart.svg"), master_series_svg(series));
    for (const auto& s : per_metric) {
      write_file(out_path(cfg, "index_series_" + std::string(to_string(s.family)) + ".svg"),
                 index_series_svg(s));
    }
  }
  if (wants(cfg, "terminal")) {
    std::cout << averages_terminal(averages);
  }
  return 0;
}

int cmd_lorenz(const CliConfig& cfg) {
  if (cfg.metric.empty()) throw UsageError("lorenz needs --metric");
  SnapshotStore store{cfg.store_path};
  const Date date = resolve_date(cfg, store);
  const auto filter = build_metric_filter(cfg);
  if (!is_distribution(*filter)) {
    throw UsageError("lorenz needs a distribution metric");
  }
  const Snapshot snap = store.read(date, *filter);
  const auto points = lorenz_points(snap.distribution());
  const std::string csv = lorenz_csv(points);
  std::cout << csv;
  const std::string stem =
      "lorenz_" + std::string(to_string(*filter)) + "_" + date.to_string();
  if (wants(cfg, "csv")) write_file(out_path(cfg, stem + ".csv"), csv);
  if (wants(cfg, "svg")) {
    write_file(out_path(cfg, stem + ".svg"),
               lorenz_svg(points, std::string(to_string(*filter)) + " " + date.to_string()));
  }
  return 0;
}

int cmd_synth(const CliConfig& cfg) {
  FixtureGenOptions options;
  if (!cfg.range.empty()) {
    std::tie(options.begin, options.end) = parse_range_flag(cfg.range);
  } else {
    options.begin = Date::from_ymd(2023, 5, 23);
    options.end = options.begin.plus_days(89);
  }
  options.seed = cfg.seed;
  generate_fixture_corpus(cfg.fixture_dir, options);
  const auto days = options.end - options.begin + 1;
  std::cout << "wrote " << default_sources().size() * days << " fixture payloads ("
            << default_sources().size() << " sources x " << days << " days) under "
            << cfg.fixture_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cfg;
  CLI::App app{"Decentralization analytics over daily Ethereum snapshots"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--store", cfg.store_path, "Snapshot store root");
    cmd->add_option("--fixtures", cfg.fixture_dir, "Fixture corpus directory");
    cmd->add_option("--mode", cfg.mode, "Fetch mode: live or fixture");
    cmd->add_option("--output-dir", cfg.output_dir, "Directory for emitted artifacts");
    cmd->add_option("--format", cfg.format, "Artifact format: csv, svg, terminal or all");
    cmd->add_option("--date", cfg.date, "Day, YYYY-MM-DD");
    cmd->add_option("--range", cfg.range, "Day range, YYYY-MM-DD..YYYY-MM-DD");
    cmd->add_option("--metric", cfg.metric, "Restrict to one metric id");
    cmd->add_option("--exclude", cfg.exclude, "Metric ids to exclude from the aggregate")
        ->delimiter(',');
    cmd->add_option("--weights", cfg.weights_file, "JSON file of metric weight overrides");
    cmd->add_option("--epsilon", cfg.epsilon, "Atkinson inequality aversion");
    cmd->add_option("--seed", cfg.seed, "Seed for synthetic data");
    cmd->add_flag("--overwrite", cfg.overwrite, "Allow re-ingesting stored days");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "Fetch, parse and store snapshots");
  CLI::App* indices = app.add_subcommand("indices", "Per-metric index values for a day");
  CLI::App* jsd = app.add_subcommand("jsd", "Interval divergences against an end day");
  CLI::App* master = app.add_subcommand("master", "Aggregate index series");
  CLI::App* report = app.add_subcommand("report", "Averages table, divergence table and charts");
  CLI::App* lorenz = app.add_subcommand("lorenz", "Lorenz curve points for one metric");
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic fixture corpus");
  for (CLI::App* cmd : {ingest, indices, jsd, master, report, lorenz, synth}) {
    add_common(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    validate_common(cfg);
    if (app.got_subcommand(ingest)) return cmd_ingest(cfg);
    if (app.got_subcommand(indices)) return cmd_indices(cfg);
    if (app.got_subcommand(jsd)) return cmd_jsd(cfg);
    if (app.got_subcommand(master)) return cmd_master(cfg);
    if (app.got_subcommand(report)) return cmd_report(cfg);
    if (app.got_subcommand(lorenz)) return cmd_lorenz(cfg);
    if (app.got_subcommand(synth)) return cmd_synth(cfg);
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ethdec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
