// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every gate criterion against the library and
// the built CLI, printing one pass/fail line per criterion.
//
//   usage: acceptance <cli-binary> <fixture-corpus-dir>
//
// The fixture corpus is the committed 90-day synthetic dataset
// (12 sources x 90 days starting 2023-05-23).

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ethdec/date.hpp"
#include "ethdec/distribution.hpp"
#include "ethdec/indices.hpp"
#include "ethdec/ingest.hpp"
#include "ethdec/metrics.hpp"
#include "ethdec/report.hpp"
#include "ethdec/store.hpp"
#include "ethdec/timeseries.hpp"

using namespace ethdec;
namespace fs = std::filesystem;

namespace {

struct Harness {
  int failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      notes.push_back(what);
    }
  }

  void expect_near(double got, double want, double tol, const std::string& what) {
    std::ostringstream msg;
    msg << what << " (got " << got << ", want " << want << " +- " << tol << ")";
    expect(std::isfinite(got) && std::abs(got - want) <= tol, msg.str());
  }
};

struct Criterion {
  std::string name;
  double seconds_limit;
  std::function<void(Harness&)> body;
};

std::string g_cli;
fs::path g_corpus;
fs::path g_scratch;

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " > " +
                          (g_scratch / "cli_out.txt").string() + " 2> " +
                          (g_scratch / "cli_err.txt").string();
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ShareDistribution dist(const std::vector<double>& q) {
  return ShareDistribution::from_quantities(q);
}

double gini_double_sum(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  for (double v : x) total += v;
  double sum = 0.0;
  for (double a : x) {
    for (double b : x) sum += std::abs(a - b);
  }
  return sum / (2.0 * n * n * (total / n));
}

ShareDistribution random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> value(0.0, 1000.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> q(n);
  bool any = false;
  for (auto& v : q) {
    v = unit(rng) < 0.1 ? 0.0 : value(rng);
    any |= v > 0.0;
  }
  if (!any) q[0] = 1.0 + value(rng);
  return dist(q);
}

// --------------------------------------------------------------------
// 1. Index value suite
// --------------------------------------------------------------------
void index_correctness(Harness& h) {
  h.expect_near(gini(dist({1, 1, 0, 0})), 0.5, 1e-9, "gini([1,1,0,0])");
  h.expect_near(gini(dist({1, 0, 0, 0})), 0.75, 1e-9, "gini([1,0,0,0])");
  h.expect_near(hhi(dist({1})), 1.0, 1e-9, "hhi(single entity)");
  h.expect_near(hhi(synth(SynthKind::Monopoly, 6)), 1.0, 1e-9, "hhi(monopoly)");
  h.expect_near(hhi(dist({1, 1})), 0.5, 1e-9, "hhi(two equal)");
  for (std::size_t n : {2, 4, 16, 101}) {
    h.expect_near(shannon(synth(SynthKind::Uniform, n)), std::log(double(n)), 1e-9,
                  "shannon(uniform " + std::to_string(n) + ")");
  }
  h.expect_near(atkinson(dist({2, 2, 8, 8}), {1.0}), 0.2, 1e-9, "atkinson([2,2,8,8], eps=1)");
  h.expect_near(adjusted_aversion(0.5, 0.3), 0.35, 1e-9, "adjusted_aversion(0.5, 0.3)");
}

// --------------------------------------------------------------------
// 2. The two Gini routes agree on 1,000 random distributions
// --------------------------------------------------------------------
void oracle_equivalence(Harness& h) {
  std::mt19937_64 rng(0xE7DEC);
  std::uniform_int_distribution<std::size_t> size(2, 10000);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_distribution(rng, size(rng));
    worst = std::max(worst, std::abs(gini(d) - gini_from_lorenz(d)));
  }
  std::ostringstream msg;
  msg << "max |gini - gini_from_lorenz| = " << worst;
  h.expect(worst < 1e-9, msg.str());
}

// --------------------------------------------------------------------
// 3. JSD identity, disjoint bound, hand value, symmetry and range
// --------------------------------------------------------------------
void jsd_suite(Harness& h) {
  const ShareDistribution same({{"a", 2.0}, {"b", 1.0}});
  h.expect(jsd_normalized(same, same) == 0.0, "jsd(p, p) must be exactly 0");
  h.expect_near(jsd_normalized(ShareDistribution({{"a", 1.0}}),
                               ShareDistribution({{"b", 1.0}})),
                1.0, 1e-12, "jsd of disjoint supports");
  h.expect_near(jsd_normalized(ShareDistribution({{"a", 1.0}, {"b", 0.0}}),
                               ShareDistribution({{"a", 1.0}, {"b", 1.0}})),
                0.311278, 1e-6, "jsd([1,0] vs [0.5,0.5])");

  std::mt19937_64 rng(0x15D);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    // different sizes exercise the zero-padding alignment path
    const auto p = random_distribution(rng, std::max<std::size_t>(1, size(rng)));
    const auto q = random_distribution(rng, std::max<std::size_t>(1, size(rng)));
    const double pq = jsd_normalized(p, q);
    const double qp = jsd_normalized(q, p);
    if (std::abs(pq - qp) > 1e-12 || pq < 0.0 || pq > 1.0) {
      h.expect(false, "jsd symmetry/bounds violated at trial " + std::to_string(trial));
      return;
    }
  }
}

// --------------------------------------------------------------------
// 4. Two hypothetical half-societies converge to the same Gini
// --------------------------------------------------------------------
void two_society(Harness& h) {
  const auto a = synth(SynthKind::TwoSocietyA, 1000);
  const auto b = synth(SynthKind::TwoSocietyB, 1000);
  const double ga = gini_double_sum(a.quantities());
  const double gb = gini_double_sum(b.quantities());
  h.expect_near(ga, 0.5, 0.01, "equal-half society gini at n=1000");
  h.expect_near(gb, 0.5, 0.01, "single-half-holder society gini at n=1000");
  h.expect(std::abs(ga - gb) < 0.01, "societies differ by more than 0.01");
  h.expect_near(gini(a), ga, 1e-9, "implementation matches oracle (A)");
  h.expect_near(gini(b), gb, 1e-9, "implementation matches oracle (B)");
}

// --------------------------------------------------------------------
// 5. Concentration bands at the documented boundaries
// --------------------------------------------------------------------
void classification_bounds(Harness& h) {
  h.expect(hhi_classify(0.1499) == HhiClass::Unconcentrated, "0.1499 must be unconcentrated");
  h.expect(hhi_classify(0.15) == HhiClass::ModeratelyConcentrated,
           "0.15 must be moderately concentrated");
  h.expect(hhi_classify(0.25) == HhiClass::ModeratelyConcentrated,
           "0.25 must be moderately concentrated");
  h.expect(hhi_classify(0.2501) == HhiClass::HighlyConcentrated,
           "0.2501 must be highly concentrated");
  h.expect(hhi_classify(0.45) == HhiClass::HighlyConcentrated,
           "0.45 must be highly concentrated");
}

// --------------------------------------------------------------------
// 6. Scalar economics metrics
// --------------------------------------------------------------------
void scalar_metrics(Harness& h) {
  ScalarEconomics staking;
  staking.total_supply = 120218472.0;
  staking.staked = 24932109.0;
  h.expect_near(staked_percentage(staking), 0.2074, 1e-4, "staked supply percentage");

  ScalarEconomics burn;
  burn.total_supply = 120000000.0;
  burn.issuance = 600000.0;
  burn.burned = 1728000.0;  // net -1,128,000 over a year
  h.expect_near(effective_inflation(burn, 365), -0.0094, 1e-4, "effective inflation");
}

// --------------------------------------------------------------------
// 7. Pipeline regression over the committed corpus, twice, byte-compared
// --------------------------------------------------------------------
struct PipelineRun {
  fs::path store;
  fs::path out;
};

PipelineRun run_pipeline(Harness& h, const std::string& tag) {
  PipelineRun run;
  run.store = g_scratch / ("store-" + tag);
  run.out = g_scratch / ("out-" + tag);
  const std::string common = " --store " + run.store.string() + " --fixtures " +
                             g_corpus.string() + " --output-dir " + run.out.string() + " ";
  h.expect(run_cli("ingest" + common + "--range 2023-05-23..2023-08-20") == 0,
           "ingest over the corpus must succeed (" + tag + ")");
  h.expect(run_cli("report" + common +
                   "--range 2023-05-23..2023-08-20 "
                   "--exclude userops-by-bundler,wallets-by-deployer") == 0,
           "report over the corpus must succeed (" + tag + ")");
  return run;
}

void pipeline_regression(Harness& h) {
  const PipelineRun a = run_pipeline(h, "a");

  // 12 metrics x 90 days
  SnapshotStore store(a.store);
  const MetricRegistry registry = MetricRegistry::defaults();
  std::size_t records = 0;
  for (MetricId id : registry.distribution_metrics()) {
    records += store.dates(id).size();
  }
  h.expect(records == 12 * 90,
           "expected 1080 snapshots, found " + std::to_string(records));

  const std::string averages_a = slurp(a.out / "averages.csv");
  const std::string jsd_a = slurp(a.out / "jsd_table.csv");
  const std::string master_a = slurp(a.out / "master_series.csv");
  const std::string chart_a = slurp(a.out / "master_chart.svg");
  h.expect(!averages_a.empty() && !jsd_a.empty() && !master_a.empty() && !chart_a.empty(),
           "all report artifacts must be emitted");

  // 7-decimal formatting in the divergence table
  bool formatted = true;
  std::istringstream lines(jsd_a);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto last_comma = line.rfind(',');
    const std::string value = line.substr(last_comma + 1);
    const auto dot = value.find('.');
    formatted &= dot != std::string::npos && value.size() - dot - 1 == 7;
  }
  h.expect(formatted, "divergence values must carry exactly 7 decimals");

  const PipelineRun b = run_pipeline(h, "b");
  h.expect(slurp(b.out / "averages.csv") == averages_a, "averages.csv must be byte-identical");
  h.expect(slurp(b.out / "jsd_table.csv") == jsd_a, "jsd_table.csv must be byte-identical");
  h.expect(slurp(b.out / "master_series.csv") == master_a,
           "master_series.csv must be byte-identical");
  h.expect(slurp(b.out / "master_chart.svg") == chart_a,
           "master_chart.svg must be byte-identical");
}

// --------------------------------------------------------------------
// 8. Property suites: invariances, monotonicity, transfers, round-trips,
//    CLI/library equality
// --------------------------------------------------------------------
void property_suites(Harness& h) {
  std::mt19937_64 rng(0xF00D);

  // scale and permutation invariance of every index
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_distribution(rng, 2 + trial % 50);
    auto entries = d.entries();
    std::shuffle(entries.begin(), entries.end(), rng);
    const ShareDistribution p(entries);
    for (auto& e : entries) e.quantity *= 737.5;
    const ShareDistribution s(entries);
    const bool invariant = std::abs(gini(p) - gini(d)) < 1e-12 &&
                           std::abs(gini(s) - gini(d)) < 1e-12 &&
                           std::abs(hhi(p) - hhi(d)) < 1e-12 &&
                           std::abs(hhi(s) - hhi(d)) < 1e-12 &&
                           std::abs(shannon(p) - shannon(d)) < 1e-12 &&
                           std::abs(shannon(s) - shannon(d)) < 1e-12 &&
                           std::abs(atkinson(p, {0.5}) - atkinson(d, {0.5})) < 1e-12 &&
                           std::abs(atkinson(s, {0.5}) - atkinson(d, {0.5})) < 1e-12;
    if (!invariant) {
      h.expect(false, "scale/permutation invariance violated at trial " + std::to_string(trial));
      break;
    }
  }

  // Atkinson monotone in the aversion parameter
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(3 + trial % 20);
    std::uniform_real_distribution<double> positive(0.1, 100.0);
    for (auto& v : q) v = positive(rng);
    const auto d = dist(q);
    double previous = -1.0;
    bool monotone = true;
    for (double eps : {0.25, 0.5, 1.0, 1.5}) {
      const double a = atkinson(d, {eps});
      monotone &= a >= previous - 1e-12;
      previous = a;
    }
    if (!monotone) {
      h.expect(false, "atkinson must be non-decreasing in epsilon");
      break;
    }
  }

  // transfers from a larger to a smaller holder never increase inequality
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_distribution(rng, 4 + trial % 20);
    auto q = d.quantities();
    std::uniform_int_distribution<std::size_t> pick(0, q.size() - 1);
    std::size_t hi = pick(rng), lo = pick(rng);
    if (q[hi] < q[lo]) std::swap(hi, lo);
    if (q[hi] == q[lo]) continue;
    auto moved = q;
    const double t = unit(rng) * (q[hi] - q[lo]) / 2.0;
    moved[hi] -= t;
    moved[lo] += t;
    const bool ok = gini(dist(moved)) <= gini(dist(q)) + 1e-12 &&
                    atkinson(dist(moved), {0.5}) <= atkinson(dist(q), {0.5}) + 1e-12;
    if (!ok) {
      h.expect(false, "transfer principle violated at trial " + std::to_string(trial));
      break;
    }
  }

  // parse -> store -> read -> serialize byte stability across the corpus
  const Date begin = Date::parse("2023-05-23");
  SnapshotStore roundtrip(g_scratch / "roundtrip-store");
  bool stable = true;
  std::size_t checked = 0;
  for (const auto& spec : default_sources()) {
    for (Date day = begin; day <= begin.plus_days(89); day = day.plus_days(1)) {
      const FetchResult raw = fetch(spec, day, FetchMode::Fixture, g_corpus);
      const Snapshot snap = parse_payload(spec, raw.payload, day, "2023-08-20T00:00:00Z");
      const std::string once = SnapshotStore::serialize(snap);
      roundtrip.append(snap);
      const Snapshot back = roundtrip.read(day, spec.metric);
      stable &= SnapshotStore::serialize(back) == once;
      stable &= SnapshotStore::serialize(SnapshotStore::deserialize(once)) == once;
      ++checked;
    }
  }
  h.expect(stable && checked == 1080,
           "parse->store->read->serialize must be byte-stable corpus-wide");

  // CLI output equals direct library computation on the same store
  const fs::path store_dir = g_scratch / "store-a";  // built by criterion 7
  const fs::path out_dir = g_scratch / "out-a";
  if (fs::exists(store_dir) && fs::exists(out_dir / "averages.csv")) {
    SnapshotStore store(store_dir);
    const std::string expected = averages_csv(averages_table(
        store, begin, begin.plus_days(89), MetricRegistry::defaults()));
    h.expect(slurp(out_dir / "averages.csv") == expected,
             "CLI averages.csv must byte-equal the library result");

    MasterSeriesOptions options;
    options.exclusions = {MetricId::UseropsByBundler, MetricId::WalletsByDeployer};
    std::vector<MasterSeries> series;
    for (IndexFamily family : kAllFamilies) {
      series.push_back(master_series(store, family, MetricRegistry::defaults(), begin,
                                     begin.plus_days(89), options));
    }
    h.expect(slurp(out_dir / "master_series.csv") == master_series_csv(series),
             "CLI master_series.csv must byte-equal the library result");
  } else {
    h.expect(false, "pipeline outputs missing; cannot check CLI/library equality");
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <fixture-corpus-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_corpus = fs::absolute(argv[2]);
  g_scratch = fs::temp_directory_path() /
              ("ethdec-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(g_scratch);

  const std::vector<Criterion> criteria = {
      {"index value suite", 1.0, index_correctness},
      {"gini route equivalence on 1000 random distributions", 30.0, oracle_equivalence},
      {"jsd identity, disjoint bound, hand value, symmetry", 30.0, jsd_suite},
      {"two-society asymptotic gini", 30.0, two_society},
      {"concentration classification boundaries", 1.0, classification_bounds},
      {"scalar economics metrics", 1.0, scalar_metrics},
      {"pipeline regression over the 90-day corpus", 60.0, pipeline_regression},
      {"property suites and cross-surface equality", 120.0, property_suites},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Harness h;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].body(h);
    } catch (const std::exception& e) {
      h.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criteria[i].seconds_limit) {
      h.expect(false, "runtime " + std::to_string(seconds) + "s exceeds " +
                          std::to_string(criteria[i].seconds_limit) + "s");
    }
    const bool ok = h.failures == 0;
    failed += !ok;
    std::printf("[%s] criterion %zu: %s (%.2fs)\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name.c_str(), seconds);
    for (const auto& note : h.notes) {
      std::printf("       - %s\n", note.c_str());
    }
    std::fflush(stdout);
  }

  std::error_code ec;
  fs::remove_all(g_scratch, ec);

  if (failed > 0) {
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
