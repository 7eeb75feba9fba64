// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and reference implementations for the test suites.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpursm/profile.hpp"

namespace gpursm::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline Eigen::MatrixXd unit_columns(Eigen::MatrixXd m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) /= m.col(j).norm();
  return m;
}

struct SubsetFit {
  std::vector<std::size_t> support;
  Eigen::VectorXd coefficients;
  double residual = 0.0;
};

/// Least squares restricted to `support`, solved by column-pivoting QR.
inline SubsetFit fit_subset(const Eigen::MatrixXd& d, const Eigen::VectorXd& t,
                            const std::vector<std::size_t>& support) {
  Eigen::MatrixXd sub(d.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k)
    sub.col(static_cast<Eigen::Index>(k)) = d.col(static_cast<Eigen::Index>(support[k]));
  SubsetFit f;
  f.support = support;
  f.coefficients = sub.colPivHouseholderQr().solve(t);
  f.residual = (t - sub * f.coefficients).norm();
  return f;
}

/// Exhaustive best-subset least squares over all supports of size k.
inline SubsetFit best_subset(const Eigen::MatrixXd& d, const Eigen::VectorXd& t, std::size_t k) {
  const auto c = static_cast<std::size_t>(d.cols());
  std::vector<bool> mask(c, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  SubsetFit best;
  best.residual = std::numeric_limits<double>::infinity();
  do {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < c; ++i)
      if (mask[i]) support.push_back(i);
    auto f = fit_subset(d, t, support);
    if (f.residual < best.residual) best = f;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

inline ProfileTable parse(const std::string& csv) {
  std::istringstream in(csv);
  return parse_profile_csv(in);
}

/// Profile rows: one per (workload, frequency) with the given counter values.
struct SyntheticRow {
  std::string kernel;
  std::string workload;
  std::int64_t frequency_mhz;
  double time_s;
  double sm_util;
  std::vector<std::pair<std::string, double>> events;
};

inline ProfileTable make_table(const std::vector<SyntheticRow>& rows) {
  ProfileTable t;
  for (const auto& r : rows) {
    RunRecord rec;
    rec.kernel_name = r.kernel;
    rec.workload_id = r.workload;
    rec.frequency_mhz = r.frequency_mhz;
    rec.exec_time_s = r.time_s;
    rec.sm_utilization = r.sm_util;
    for (const auto& [e, v] : r.events) {
      rec.event_counts[e] = v;
      if (std::find(t.event_universe.begin(), t.event_universe.end(), e) == t.event_universe.end())
        t.event_universe.push_back(e);
    }
    t.records.push_back(std::move(rec));
  }
  return t;
}

/// Two-kernel comparison fixture.
struct Scenario {
  double dram_factor = 2.0;
  double noise_sigma = 0.0;  // lognormal jitter of the FMA counter in the variant
  int workloads = 12;
  std::uint64_t seed = 1;
};

/// "base" and "variant" kernels in one table; time follows DRAM traffic and
/// every other counter is unrelated to it.
inline ProfileTable scenario(const Scenario& s) {
  std::mt19937_64 rng(s.seed);
  std::lognormal_distribution<double> size(0.0, 0.5);
  std::uniform_real_distribution<double> spread(0.2, 1.0), mix(0.8, 1.2);
  std::lognormal_distribution<double> noise(0.0, s.noise_sigma > 0 ? s.noise_sigma : 1e-9);
  std::vector<SyntheticRow> rows;
  for (int w = 0; w < s.workloads; ++w) {
    const std::string wl = "w" + std::to_string(w);
    const double n = 1000.0 * spread(rng);
    const double r = n * mix(rng), wr = 0.5 * n * mix(rng);
    const double fma = 3000.0 * size(rng), smem = 2.0 * n * size(rng);
    const auto time = [](double dram) { return 1e-6 * (50.0 + dram); };
    rows.push_back({"base", wl, 1200, time(r + wr), 0.6,
                    {{"fb_subp0_read_sectors", r},
                     {"fb_subp1_write_sectors", wr},
                     {"inst_executed_fma_pipe_s0", fma},
                     {"shared_ld_transactions", smem}}});
    const double r2 = s.dram_factor * r, wr2 = s.dram_factor * wr;
    const double fma2 = s.noise_sigma > 0 ? fma * noise(rng) : fma;
    rows.push_back({"variant", wl, 1200, time(r2 + wr2), 0.6,
                    {{"fb_subp0_read_sectors", r2},
                     {"fb_subp1_write_sectors", wr2},
                     {"inst_executed_fma_pipe_s0", fma2},
                     {"shared_ld_transactions", smem}}});
  }
  return make_table(rows);
}

}  // namespace gpursm::testing
