// SPDX-License-Identifier: Apache-2.0
//
// Test-only utilities: temp dirs, CLI invocation, CSV re-parsing, random
// distribution generators and the brute-force Gini oracle.
#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ethdec/distribution.hpp"

namespace testutil {

class TempDir {
 public:
  explicit TempDir(const std::string& prefix) {
    static std::atomic<int> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    path_ = base / (prefix + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Path of the built CLI binary, passed in via the environment.
inline std::string cli_path() {
  const char* p = std::getenv("ETHDEC_CLI");
  return p ? p : "";
}

/// Runs the CLI with the given argument string; returns the exit code
/// and captures stdout/stderr when requested.
inline int run_cli(const std::string& args, const std::filesystem::path& scratch,
                   std::string* out = nullptr, std::string* err = nullptr) {
  const auto out_file = scratch / "cli_stdout.txt";
  const auto err_file = scratch / "cli_stderr.txt";
  const std::string cmd = "\"" + cli_path() + "\" " + args + " > " + out_file.string() +
                          " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  if (out) *out = slurp(out_file);
  if (err) *err = slurp(err_file);
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Minimal RFC-4180-style reader, enough to round-trip our own output.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Random distribution with optional zero entries; always at least one
/// positive quantity.
inline ethdec::ShareDistribution random_distribution(std::mt19937_64& rng, std::size_t n,
                                                     double zero_prob = 0.1) {
  std::uniform_real_distribution<double> value(0.0, 1000.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> q(n);
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = unit(rng) < zero_prob ? 0.0 : value(rng);
    any_positive |= q[i] > 0.0;
  }
  if (!any_positive) q[0] = value(rng) + 1.0;
  return ethdec::ShareDistribution::from_quantities(q);
}

/// O(n^2) mean-difference Gini, the independent oracle for the
/// production implementations.
inline double gini_double_sum(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  for (double v : x) total += v;
  const double mu = total / n;
  double sum = 0.0;
  for (double a : x) {
    for (double b : x) sum += std::abs(a - b);
  }
  return sum / (2.0 * n * n * mu);
}

}  // namespace testutil
