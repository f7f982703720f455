// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ethdec/errors.hpp"

namespace ethdec {

struct ShareEntry {
  std::string label;
  double quantity;

  bool operator==(const ShareEntry&) const = default;
};

/// An ordered list of labeled nonnegative quantities for one metric on
/// one day: node counts per client, ETH per staking pool, USD per
/// stablecoin. Unit-agnostic; only the proportions matter to the
/// indices. Zero-quantity entries are retained on purpose: they carry
/// population counts and keep category alignment stable across days.
/// Immutable after construction, safe to share across threads.
class ShareDistribution {
 public:
  explicit ShareDistribution(std::vector<ShareEntry> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty()) {
      throw InvalidDistributionError("distribution has no entries");
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(entries_.size());
    for (const auto& e : entries_) {
      if (!std::isfinite(e.quantity) || e.quantity < 0.0) {
        throw InvalidDistributionError("entry '" + e.label +
                                       "' has a negative or non-finite quantity");
      }
      if (!seen.insert(e.label).second) {
        throw InvalidDistributionError("duplicate label '" + e.label + "'");
      }
      total_ += e.quantity;
    }
    if (!(total_ > 0.0)) {
      throw InvalidDistributionError("all quantities are zero");
    }
  }

  /// Convenience constructor with generated labels, zero-padded so that
  /// lexicographic label order matches positional order.
  static ShareDistribution from_quantities(const std::vector<double>& quantities) {
    std::vector<ShareEntry> entries;
    entries.reserve(quantities.size());
    std::size_t width = 1;
    for (std::size_t n = quantities.size(); n >= 10; n /= 10) ++width;
    for (std::size_t i = 0; i < quantities.size(); ++i) {
      const std::string digits = std::to_string(i + 1);
      entries.push_back(
          {"e" + std::string(width - std::min(width, digits.size()), '0') + digits,
           quantities[i]});
    }
    return ShareDistribution(std::move(entries));
  }

  const std::vector<ShareEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double total() const { return total_; }

  std::vector<double> quantities() const {
    std::vector<double> q;
    q.reserve(entries_.size());
    for (const auto& e : entries_) q.push_back(e.quantity);
    return q;
  }

  /// Shares q_i = quantity_i / sum(quantities), in entry order.
  /// Scale-invariant; sums to 1 within 1e-9.
  std::vector<double> proportions() const {
    std::vector<double> p;
    p.reserve(entries_.size());
    for (const auto& e : entries_) p.push_back(e.quantity / total_);
    return p;
  }

 private:
  std::vector<ShareEntry> entries_;
  double total_ = 0.0;
};

/// Aligns two distributions onto the union of their labels, in
/// lexicographic label order, and returns the two proportion vectors.
/// Labels absent on one side contribute proportion zero there, which is
/// what makes categorical divergences between different-day snapshots
/// well defined.
inline std::pair<std::vector<double>, std::vector<double>> align(
    const ShareDistribution& p, const ShareDistribution& q) {
  std::map<std::string_view, std::pair<double, double>> merged;
  for (const auto& e : p.entries()) merged[e.label].first = e.quantity / p.total();
  for (const auto& e : q.entries()) merged[e.label].second = e.quantity / q.total();
  std::vector<double> vp, vq;
  vp.reserve(merged.size());
  vq.reserve(merged.size());
  for (const auto& [label, shares] : merged) {
    vp.push_back(shares.first);
    vq.push_back(shares.second);
  }
  return {std::move(vp), std::move(vq)};
}

/// Synthetic distribution shapes used by tests and fixture generation.
///   Uniform      - every entity holds the same amount.
///   Monopoly     - one entity holds everything.
///   TwoSocietyA  - half the entities share everything equally, half hold zero.
///   TwoSocietyB  - one entity holds half, the rest share half equally.
///   ParetoLike   - deterministic heavy tail, jittered from the seed.
enum class SynthKind { Uniform, Monopoly, TwoSocietyA, TwoSocietyB, ParetoLike };

inline SynthKind synth_kind_from_string(std::string_view s) {
  if (s == "uniform") return SynthKind::Uniform;
  if (s == "monopoly") return SynthKind::Monopoly;
  if (s == "two-society-a") return SynthKind::TwoSocietyA;
  if (s == "two-society-b") return SynthKind::TwoSocietyB;
  if (s == "pareto-like") return SynthKind::ParetoLike;
  throw InvalidArgumentError("unknown synthetic kind '" + std::string(s) + "'");
}

inline std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::Uniform: return "uniform";
    case SynthKind::Monopoly: return "monopoly";
    case SynthKind::TwoSocietyA: return "two-society-a";
    case SynthKind::TwoSocietyB: return "two-society-b";
    case SynthKind::ParetoLike: return "pareto-like";
  }
  throw InvalidArgumentError("unknown synthetic kind");
}

inline ShareDistribution synth(SynthKind kind, std::size_t n, std::uint64_t seed = 0) {
  if (n < 2) throw InvalidArgumentError("synthetic distribution needs n >= 2");
  std::vector<double> q(n, 0.0);
  switch (kind) {
    case SynthKind::Uniform:
      std::fill(q.begin(), q.end(), 1.0);
      break;
    case SynthKind::Monopoly:
      q[0] = 1.0;
      break;
    case SynthKind::TwoSocietyA:
      for (std::size_t i = 0; i < (n + 1) / 2; ++i) q[i] = 1.0;
      break;
    case SynthKind::TwoSocietyB:
      // One entity matches the combined holdings of everyone else.
      q[0] = static_cast<double>(n - 1);
      for (std::size_t i = 1; i < n; ++i) q[i] = 1.0;
      break;
    case SynthKind::ParetoLike: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> jitter(0.9, 1.1);
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = std::pow(static_cast<double>(i + 1), -1.16) * jitter(rng);
      }
      break;
    }
  }
  return ShareDistribution::from_quantities(q);
}

}  // namespace ethdec
