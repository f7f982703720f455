// SPDX-License-Identifier: Apache-2.0
//
// Property suites over seeded random distributions: invariances, bounds,
// monotonicity, transfer principle, and the cross-check between the two
// Gini routes.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "ethdec/indices.hpp"
#include "helpers.hpp"

using namespace ethdec;
using testutil::random_distribution;

namespace {

ShareDistribution scaled(const ShareDistribution& d, double k) {
  std::vector<ShareEntry> entries = d.entries();
  for (auto& e : entries) e.quantity *= k;
  return ShareDistribution(std::move(entries));
}

ShareDistribution shuffled(const ShareDistribution& d, std::mt19937_64& rng) {
  std::vector<ShareEntry> entries = d.entries();
  std::shuffle(entries.begin(), entries.end(), rng);
  return ShareDistribution(std::move(entries));
}

}  // namespace

TEST_CASE("indices are scale invariant") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(rng, 2 + trial % 40);
    for (double k : {1e-6, 3.7, 1e6}) {
      const auto s = scaled(d, k);
      CHECK(std::abs(gini(s) - gini(d)) < 1e-12);
      CHECK(std::abs(hhi(s) - hhi(d)) < 1e-12);
      CHECK(std::abs(shannon(s) - shannon(d)) < 1e-12);
      CHECK(std::abs(atkinson(s, {0.5}) - atkinson(d, {0.5})) < 1e-12);
    }
  }
  const auto a = random_distribution(rng, 15);
  const auto b = random_distribution(rng, 12);
  CHECK(std::abs(jsd_normalized(scaled(a, 42.0), b) - jsd_normalized(a, b)) < 1e-12);
}

TEST_CASE("indices are permutation invariant") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(rng, 3 + trial % 30);
    const auto p = shuffled(d, rng);
    CHECK(std::abs(gini(p) - gini(d)) < 1e-12);
    CHECK(std::abs(gini_from_lorenz(p) - gini_from_lorenz(d)) < 1e-12);
    CHECK(std::abs(hhi(p) - hhi(d)) < 1e-12);
    CHECK(std::abs(shannon(p) - shannon(d)) < 1e-12);
    CHECK(std::abs(atkinson(p, {0.5}) - atkinson(d, {0.5})) < 1e-12);
  }
  // alignment canonicalizes, so jsd is exactly order-blind
  const auto d = random_distribution(rng, 20, 0.0);
  const auto e = random_distribution(rng, 20, 0.0);
  CHECK(jsd_normalized(shuffled(d, rng), e) == jsd_normalized(d, e));
}

TEST_CASE("the two gini routes agree to 1e-9 across sizes") {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> size(2, 10000);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_distribution(rng, size(rng));
    CHECK(std::abs(gini(d) - gini_from_lorenz(d)) < 1e-9);
  }
}

TEST_CASE("gini matches the brute-force oracle on small inputs") {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_distribution(rng, std::max<std::size_t>(2, size(rng)));
    CHECK(gini(d) == Catch::Approx(testutil::gini_double_sum(d.quantities())).margin(1e-11));
  }
}

TEST_CASE("hhi lies in [1/n, 1] with equality at the extremes") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 25;
    const auto d = random_distribution(rng, n);
    const double theta = hhi(d);
    CHECK(theta >= 1.0 / static_cast<double>(n) - 1e-12);
    CHECK(theta <= 1.0);
  }
  CHECK(hhi(synth(SynthKind::Uniform, 8)) == Catch::Approx(1.0 / 8.0).margin(1e-12));
  CHECK(hhi(synth(SynthKind::Monopoly, 8)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("normalized shannon is 1 only at uniform and 0 only at monopoly") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(rng, 2 + trial % 25);
    const double h = shannon_normalized(d);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
  }
  CHECK(shannon_normalized(synth(SynthKind::Uniform, 9)) == 1.0);
  CHECK(shannon_normalized(synth(SynthKind::Monopoly, 9)) == 0.0);
  CHECK(shannon_normalized(synth(SynthKind::ParetoLike, 9, 3)) < 1.0);
  CHECK(shannon_normalized(synth(SynthKind::ParetoLike, 9, 3)) > 0.0);
}

TEST_CASE("atkinson is monotone non-decreasing in the aversion parameter") {
  std::mt19937_64 rng(707);
  const double epsilons[] = {0.25, 0.5, 1.0, 1.5};
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(rng, 3 + trial % 20, /*zero_prob=*/0.0);
    double previous = -1.0;
    for (double eps : epsilons) {
      const double a = atkinson(d, {eps});
      CHECK(a >= previous - 1e-12);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      previous = a;
    }
  }
}

TEST_CASE("transfers from larger to smaller holders never increase inequality") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_distribution(rng, 4 + trial % 20, /*zero_prob=*/0.05);
    auto q = d.quantities();
    std::uniform_int_distribution<std::size_t> pick(0, q.size() - 1);
    std::size_t hi = pick(rng), lo = pick(rng);
    if (q[hi] < q[lo]) std::swap(hi, lo);
    if (q[hi] == q[lo]) continue;
    const double t = unit(rng) * (q[hi] - q[lo]) / 2.0;
    auto transferred = q;
    transferred[hi] -= t;
    transferred[lo] += t;
    const auto before = ShareDistribution::from_quantities(q);
    const auto after = ShareDistribution::from_quantities(transferred);
    CHECK(gini(after) <= gini(before) + 1e-12);
    CHECK(atkinson(after, {0.5}) <= atkinson(before, {0.5}) + 1e-12);
  }
}

TEST_CASE("the two hypothetical half-societies converge to the same gini") {
  // At n = 4 they differ (0.5 vs 0.25); the equality is asymptotic.
  CHECK(gini(synth(SynthKind::TwoSocietyA, 4)) == Catch::Approx(0.5).margin(1e-12));
  CHECK(gini(synth(SynthKind::TwoSocietyB, 4)) == Catch::Approx(0.25).margin(1e-12));

  const double a = gini(synth(SynthKind::TwoSocietyA, 1000));
  const double b = gini(synth(SynthKind::TwoSocietyB, 1000));
  CHECK(std::abs(a - 0.5) < 0.01);
  CHECK(std::abs(b - 0.5) < 0.01);
  CHECK(std::abs(a - b) < 0.01);
}

TEST_CASE("jsd is symmetric and bounded, including padded label sets") {
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  for (int trial = 0; trial < 200; ++trial) {
    // different sizes force zero-padding over the label union
    const auto p = random_distribution(rng, std::max<std::size_t>(1, size(rng)));
    const auto q = random_distribution(rng, std::max<std::size_t>(1, size(rng)));
    const double pq = jsd_normalized(p, q);
    const double qp = jsd_normalized(q, p);
    CHECK(std::abs(pq - qp) <= 1e-12);
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
  }
}

TEST_CASE("lorenz curve is monotone and never above the diagonal") {
  std::mt19937_64 rng(111);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(rng, 2 + trial % 50);
    const auto pts = lorenz_points(d);
    CHECK(pts.front() == LorenzPoint{0.0, 0.0});
    CHECK(pts.back().population == 1.0);
    CHECK(pts.back().share == 1.0);
    for (std::size_t k = 1; k < pts.size(); ++k) {
      CHECK(pts[k].share >= pts[k - 1].share - 1e-15);
      CHECK(pts[k].share <= pts[k].population + 1e-12);
    }
  }
}
