// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <set>

#include "gpursm/error.hpp"
#include "gpursm/pipeline.hpp"
#include "gpursm/targets.hpp"
#include "support.hpp"

using namespace gpursm;
using gpursm::testing::gaussian_matrix;
using gpursm::testing::make_table;
using gpursm::testing::SyntheticRow;

namespace {

const std::vector<std::string> kEvents{
    "shared_ld_bank_conflict", "shared_st_bank_conflict",   // BANK
    "fb_subp0_read_sectors",   "fb_subp1_write_sectors",    // DRAM
    "inst_executed_fma_pipe_s0",                            // FMA
    "shared_ld_transactions",                               // SMEM
    "pcie_rx_active_pulse",                                 // PCIE
    "elapsed_cycles_sm",                                    // uncategorized
    "l2_subp0_read_hit_sector_queries",                     // excluded
};

// Positive counts with a target driven by the first event.
Dictionary planted(Eigen::Index rows, std::uint64_t seed, Eigen::VectorXd* target) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> jitter(0.0, 0.6);
  Dictionary d;
  d.values.resize(rows, static_cast<Eigen::Index>(kEvents.size()));
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    for (Eigen::Index i = 0; i < rows; ++i) d.values(i, j) = 1000.0 * jitter(rng);
  d.col_labels = kEvents;
  d.col_stats.assign(kEvents.size(), ColumnStats{});
  for (Eigen::Index i = 0; i < rows; ++i) d.row_labels.push_back("w" + std::to_string(i));
  *target = d.values.col(0) / d.values.col(0).maxCoeff();
  return d;
}

AnalysisParams quick(std::uint64_t seed = 7) {
  AnalysisParams p;
  p.draws = 400;
  p.seed = seed;
  p.threads = 1;
  return p;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gpursm::Error");
  return Errc::Io;
}

}  // namespace

TEST_CASE("planted driver dominates the resource ranking") {
  Eigen::VectorXd t;
  const auto d = planted(30, 1, &t);
  const auto a = analyze_dictionary(d, t, default_model(), quick());
  CHECK(a.rows == 30);
  CHECK(a.columns == 8);
  CHECK(a.k_max == 4);
  CHECK(a.excluded == std::vector<std::string>{"l2_subp0_read_hit_sector_queries"});
  CHECK(a.uncategorized == std::vector<std::string>{"elapsed_cycles_sm"});

  const auto& rsm = a.rsm.per_resource;
  REQUIRE(rsm.count("BANK"));
  REQUIRE(rsm.count(std::string(kUncategorizedGroup)));
  for (const auto& [group, v] : rsm) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (group != "BANK") CHECK(v < rsm.at("BANK"));
  }
  CHECK(rsm.at("BANK") > 0.9);
  CHECK(a.events.front().event == "shared_ld_bank_conflict");
  CHECK(a.events.front().group == "BANK");
  CHECK(a.events.front().selection_frequency > 0.5);
}

TEST_CASE("both normalization modes find the driver") {
  Eigen::VectorXd t;
  const auto d = planted(25, 2, &t);
  for (auto mode : {NormalizationMode::UnitNorm, NormalizationMode::ZScore}) {
    auto p = quick();
    p.normalization = mode;
    const auto a = analyze_dictionary(d, t, default_model(), p);
    const auto best = std::max_element(a.rsm.per_resource.begin(), a.rsm.per_resource.end(),
                                       [](auto& x, auto& y) { return x.second < y.second; });
    CHECK(best->first == "BANK");
  }
}

TEST_CASE("analysis is reproducible and seed dependent") {
  Eigen::VectorXd t;
  const auto d = planted(20, 3, &t);
  auto p = quick(11);
  p.tau = 4;
  const auto a = analyze_dictionary(d, t, default_model(), p);
  p.threads = 3;
  const auto b = analyze_dictionary(d, t, default_model(), p);
  CHECK(a.rsm.per_resource == b.rsm.per_resource);
  CHECK(a.rsm.per_event == b.rsm.per_event);
  p.seed = 12;
  const auto c = analyze_dictionary(d, t, default_model(), p);
  CHECK(c.rsm.per_event != a.rsm.per_event);
}

TEST_CASE("constant columns get zero belief") {
  Eigen::VectorXd t;
  auto d = planted(12, 4, &t);
  d.values.col(4).setConstant(5.0);
  const auto a = analyze_dictionary(d, t, default_model(), quick());
  CHECK(a.constants == std::vector<std::string>{"inst_executed_fma_pipe_s0"});
  const auto& fma = a.events[4];
  CHECK(fma.constant);
  CHECK(fma.belief == 0.0);
  CHECK(fma.selection_frequency == 0.0);
  CHECK(a.rsm.per_resource.at("FMA") == 0.0);
}

TEST_CASE("workload subsets average per-workload significance") {
  Eigen::VectorXd t;
  const auto d = planted(24, 5, &t);
  std::vector<RowSubset> subsets{{"a", {}}, {"b", {}}};
  for (Eigen::Index r = 0; r < 24; ++r) subsets[static_cast<std::size_t>(r % 2)].rows.push_back(r);
  const auto a = analyze_dictionary(d, t, default_model(), quick(), subsets);
  REQUIRE(a.rsm.workload_breakdown.size() == 2);
  for (const auto& [group, v] : a.rsm.per_resource) {
    const double mean =
        (a.rsm.workload_breakdown.at("a").at(group) + a.rsm.workload_breakdown.at("b").at(group)) /
        2.0;
    CHECK(v == doctest::Approx(mean).epsilon(1e-12));
  }

  // Subset w is the single-subset analysis of its rows with seed + w.
  Dictionary rows_b;
  rows_b.col_labels = d.col_labels;
  rows_b.col_stats = d.col_stats;
  rows_b.values.resize(12, d.cols());
  Eigen::VectorXd t_b(12);
  for (Eigen::Index i = 0; i < 12; ++i) {
    rows_b.values.row(i) = d.values.row(2 * i + 1);
    t_b(i) = t(2 * i + 1);
    rows_b.row_labels.push_back(d.row_labels[static_cast<std::size_t>(2 * i + 1)]);
  }
  const auto single = analyze_dictionary(rows_b, t_b, default_model(), quick(8));
  for (const auto& [group, v] : single.rsm.per_resource)
    CHECK(a.rsm.workload_breakdown.at("b").at(group) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("analysis input errors") {
  Eigen::VectorXd t;
  const auto d = planted(10, 6, &t);
  CHECK(code_of([&] { analyze_dictionary(d, t.head(9), default_model(), quick()); }) ==
        Errc::DimensionMismatch);
  const auto only_hits = select_columns(d, {"l2_subp0_read_hit_sector_queries"});
  CHECK(code_of([&] { analyze_dictionary(only_hits, t, default_model(), quick()); }) ==
        Errc::EmptyGroupPartition);
  auto p = quick();
  p.kappa = 0.0;
  CHECK(code_of([&] { analyze_dictionary(d, t, default_model(), p); }) == Errc::InvalidKappa);
}

TEST_CASE("fit_target centering") {
  const Eigen::Vector3d t(1.0, 2.0, 6.0);
  const auto z = fit_target(t, NormalizationMode::ZScore);
  CHECK(z.sum() == doctest::Approx(0.0));
  CHECK(z(2) == doctest::Approx(3.0));
  CHECK(fit_target(t, NormalizationMode::UnitNorm) == t);
}

TEST_CASE("workload subsets from a profile") {
  std::vector<SyntheticRow> rows;
  for (const auto& w : {"w2", "w1"})
    for (std::int64_t f : {900, 1200})
      rows.push_back({"k", w, f, 1.0, 0.5, {{"global_load", static_cast<double>(f)}}});
  const auto table = make_table(rows);
  RowKeySpec key;
  CHECK(workload_subsets(table, "k", key, WorkloadKey::None).empty());

  const auto by_w = workload_subsets(table, "k", key, WorkloadKey::Workload);
  REQUIRE(by_w.size() == 2);
  const auto labels = group_rows(table, "k", key);
  for (const auto& s : by_w) {
    CHECK(s.rows.size() == 2);
    for (auto r : s.rows) CHECK(labels[static_cast<std::size_t>(r)].workload_id == s.label);
  }
  const auto by_f = workload_subsets(table, "k", key, WorkloadKey::Frequency);
  REQUIRE(by_f.size() == 2);
  std::set<std::string> names{by_f[0].label, by_f[1].label};
  CHECK(names == std::set<std::string>{"900MHz", "1200MHz"});

  auto no_freq = table;
  for (auto& r : no_freq.records) r.frequency_mhz.reset();
  CHECK(code_of([&] { workload_subsets(no_freq, "k", key, WorkloadKey::Frequency); }) ==
        Errc::InvalidConfig);
}

TEST_CASE("workload key names") {
  for (auto k : {WorkloadKey::None, WorkloadKey::Workload, WorkloadKey::Frequency})
    CHECK(workload_key_from_string(to_string(k)) == k);
  CHECK(code_of([] { workload_key_from_string("kernel"); }) == Errc::InvalidConfig);
}

TEST_CASE("end to end from a profile table") {
  std::mt19937_64 rng(21);
  std::lognormal_distribution<double> jitter(0.0, 0.4);
  std::vector<SyntheticRow> rows;
  for (int w = 0; w < 16; ++w) {
    const double drive = 100.0 * jitter(rng);
    rows.push_back({"k", "w" + std::to_string(w), 1200, 1e-3 * (1.0 + drive), 0.6,
                    {{"fb_subp0_read_sectors", 50.0 * drive},
                     {"global_load", 1000.0 * jitter(rng)},
                     {"shared_ld_transactions", 500.0 * jitter(rng)},
                     {"inst_executed_fma_pipe_s0", 800.0 * jitter(rng)}}});
  }
  const auto table = make_table(rows);
  const auto dict = build_dictionary(table, "k");
  const auto target = compute_target(TargetKind::Ts, table, "k");
  const auto a = analyze_dictionary(dict, target.values, default_model(), quick());
  const auto n = normalize_rsm(a.rsm);
  double sum = 0.0;
  for (const auto& [g, v] : n.per_resource) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  const auto best = std::max_element(n.per_resource.begin(), n.per_resource.end(),
                                     [](auto& x, auto& y) { return x.second < y.second; });
  CHECK(best->first == "DRAM");
}
