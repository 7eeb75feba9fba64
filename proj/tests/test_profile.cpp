// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "gpursm/error.hpp"
#include "gpursm/profile.hpp"
#include "support.hpp"

using namespace gpursm;
using gpursm::testing::parse;

namespace {

Errc code_of(const std::string& csv) {
  try {
    parse(csv);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return Errc::Io;
}

std::optional<std::size_t> row_of(const std::string& csv) {
  try {
    parse(csv);
  } catch (const Error& e) {
    return e.row();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("minimal two-row profile") {
  const auto t = parse("kernel,workload,time_s,sm_util,ev_a\nk1,w1,1.0,0.5,10\nk1,w2,2.0,0.6,20\n");
  REQUIRE(t.records.size() == 2);
  CHECK(t.event_universe == std::vector<std::string>{"ev_a"});
  CHECK(t.records[0].kernel_name == "k1");
  CHECK(t.records[1].workload_id == "w2");
  CHECK(t.records[1].exec_time_s == 2.0);
  CHECK(t.records[1].sm_utilization == doctest::Approx(0.6));
  CHECK(t.records[0].event_counts.at("ev_a") == 10.0);
  CHECK_FALSE(t.records[0].frequency_mhz.has_value());
  CHECK_FALSE(t.records[0].power_w.has_value());
}

TEST_CASE("utilization above one is rejected with its row") {
  const std::string csv = "kernel,workload,time_s,sm_util,ev_a\nk1,w1,1.0,0.5,10\nk1,w2,2.0,1.7,20\n";
  CHECK(code_of(csv) == Errc::UtilizationOutOfRange);
  CHECK(row_of(csv) == std::optional<std::size_t>(2));
}

TEST_CASE("different event sets within one kernel") {
  const std::string csv =
      "kernel,workload,time_s,sm_util,ev_a,ev_b\nk1,w1,1.0,0.5,10,\nk1,w2,2.0,0.6,,20\n";
  try {
    parse(csv);
    FAIL("expected InconsistentEventSet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InconsistentEventSet);
    CHECK(e.subject() == "k1");
  }
}

TEST_CASE("kernels may differ in their event sets") {
  const auto t = parse(
      "kernel,workload,time_s,sm_util,ev_a,ev_b\nk1,w1,1.0,0.5,10,\nk2,w1,2.0,0.6,,20\n");
  CHECK(t.event_universe == std::vector<std::string>{"ev_a", "ev_b"});
  CHECK(t.kernels() == std::vector<std::string>{"k1", "k2"});
}

TEST_CASE("malformed input") {
  SUBCASE("missing metadata column") {
    CHECK(code_of("kernel,workload,time_s,ev_a\nk1,w1,1.0,10\n") == Errc::MissingColumn);
  }
  SUBCASE("non-numeric event cell carries coordinates") {
    const std::string csv = "kernel,workload,time_s,sm_util,ev_a\nk1,w1,1.0,0.5,ten\n";
    try {
      parse(csv);
      FAIL("expected NonNumericCell");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonNumericCell);
      CHECK(e.subject() == "ev_a");
      CHECK(e.row() == std::optional<std::size_t>(1));
    }
  }
  SUBCASE("negative counter") {
    CHECK(code_of("kernel,workload,time_s,sm_util,ev_a\nk1,w1,1.0,0.5,-3\n") ==
          Errc::NegativeValue);
  }
  SUBCASE("negative time") {
    CHECK(code_of("kernel,workload,time_s,sm_util,ev_a\nk1,w1,-1.0,0.5,3\n") ==
          Errc::NegativeValue);
  }
  SUBCASE("ragged row") {
    CHECK(code_of("kernel,workload,time_s,sm_util,ev_a\nk1,w1,1.0,0.5\n") ==
          Errc::NonNumericCell);
  }
  SUBCASE("fractional frequency") {
    CHECK(code_of("kernel,workload,frequency_mhz,time_s,sm_util,ev_a\nk1,w1,1200.5,1.0,0.5,3\n") ==
          Errc::NonNumericCell);
  }
  SUBCASE("thousands separator is not a number") {
    CHECK(code_of("kernel,workload,time_s,sm_util,ev_a\nk1,w1,1.0,0.5,\"1,000\"\n") ==
          Errc::NonNumericCell);
  }
  SUBCASE("duplicate event column") {
    CHECK(code_of("kernel,workload,time_s,sm_util,ev_a,ev_a\nk1,w1,1.0,0.5,1,2\n") ==
          Errc::MissingColumn);
  }
  SUBCASE("empty input") { CHECK(code_of("") == Errc::MissingColumn); }
}

TEST_CASE("quoted fields, BOM, CRLF and custom schema") {
  ColumnSchema s;
  s.kernel = "name";
  s.time = "seconds";
  std::istringstream in(
      "\xEF\xBB\xBFname,workload,seconds,sm_util,\"ev,x\"\r\n\"k \"\"1\"\"\",w1,0.5,0.25,7\r\n");
  const auto t = parse_profile_csv(in, s);
  REQUIRE(t.records.size() == 1);
  CHECK(t.records[0].kernel_name == "k \"1\"");
  CHECK(t.event_universe == std::vector<std::string>{"ev,x"});
  CHECK(t.records[0].exec_time_s == 0.5);
}

TEST_CASE("missing file names the path") {
  try {
    load_profile_csv("/nonexistent/profile.csv");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
    CHECK(e.category() == ErrorCategory::Data);
    CHECK(std::string(e.what()).find("/nonexistent/profile.csv") != std::string::npos);
  }
}

TEST_CASE("build_dictionary shapes and labels") {
  const auto t = parse(
      "kernel,workload,frequency_mhz,time_s,sm_util,ev_a,ev_b\n"
      "k1,w1,1000,1,0.5,1,2\nk1,w2,1000,1,0.5,3,4\nk1,w3,1000,1,0.5,5,6\nk2,w1,1000,1,0.5,7,8\n");
  const auto d = build_dictionary(t, "k1");
  CHECK(d.rows() == 3);
  CHECK(d.cols() == 2);
  CHECK(d.row_labels == std::vector<std::string>{"w1@1000MHz", "w2@1000MHz", "w3@1000MHz"});
  CHECK(d.col_labels == std::vector<std::string>{"ev_a", "ev_b"});
  CHECK(d.values(2, 1) == 6.0);
  CHECK_FALSE(d.normalization.has_value());

  try {
    build_dictionary(t, "k9");
    FAIL("expected UnknownKernel");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownKernel);
    CHECK(e.category() == ErrorCategory::Config);
  }
}

TEST_CASE("replicates are averaged or kept") {
  const auto t = parse(
      "kernel,workload,time_s,sm_util,ev_a\nk1,w1,1,0.5,10\nk1,w1,1,0.5,30\nk1,w2,1,0.5,5\n");
  CHECK(t.records[0].replicate == 0);
  CHECK(t.records[1].replicate == 1);
  const auto avg = build_dictionary(t, "k1");
  REQUIRE(avg.rows() == 2);
  CHECK(avg.values(0, 0) == 20.0);

  RowKeySpec keep;
  keep.average_replicates = false;
  const auto sep = build_dictionary(t, "k1", keep);
  CHECK(sep.rows() == 3);
  CHECK(sep.row_labels[0] == "w1#0");
  CHECK(sep.row_labels[1] == "w1#1");
}

TEST_CASE("kernel without counters is an empty selection") {
  const auto t = parse("kernel,workload,time_s,sm_util,ev_a\nk1,w1,1,0.5,\nk2,w1,1,0.5,4\n");
  CHECK_THROWS_AS(build_dictionary(t, "k1"), Error);
  try {
    build_dictionary(t, "k1");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptySelection);
  }
}

TEST_CASE("build_dictionary ignores record order") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1e6);
  ProfileTable t;
  t.event_universe = {"ev_a", "ev_b", "ev_c"};
  for (int w = 0; w < 5; ++w)
    for (int rep = 0; rep < 3; ++rep) {
      RunRecord r;
      r.kernel_name = "k";
      r.workload_id = "w" + std::to_string(w);
      r.frequency_mhz = 1000 + 100 * (rep % 2);
      r.exec_time_s = 1.0;
      r.sm_utilization = 0.5;
      for (const auto& e : t.event_universe) r.event_counts[e] = u(rng);
      t.records.push_back(r);
    }
  const auto reference = build_dictionary(t, "k");
  for (int trial = 0; trial < 20; ++trial) {
    auto shuffled = t;
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
    const auto d = build_dictionary(shuffled, "k");
    CHECK(d.row_labels == reference.row_labels);
    CHECK((d.values.array() == reference.values.array()).all());
  }
}

TEST_CASE("order independent mean") {
  CHECK(order_independent_mean({1e16, 1.0, -1e16, 1.0}) ==
        order_independent_mean({1.0, -1e16, 1.0, 1e16}));
  CHECK(order_independent_mean({2.0, 4.0}) == 3.0);
}

TEST_CASE("CSV round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    ProfileTable t;
    const int events = 1 + trial % 4;
    for (int e = 0; e < events; ++e) t.event_universe.push_back("ev_" + std::to_string(e));
    std::map<std::tuple<std::string, std::string, std::optional<std::int64_t>>, std::size_t> reps;
    for (int r = 0; r < 6; ++r) {
      RunRecord rec;
      rec.kernel_name = r % 2 ? "k,odd" : "k\"even\"";
      rec.workload_id = "w" + std::to_string(r % 3);
      if (trial % 2) rec.frequency_mhz = 900 + r;
      rec.exec_time_s = u(rng) * 1e-3;
      rec.sm_utilization = u(rng);
      if (trial % 3) rec.power_w = 100.0 * u(rng);
      for (const auto& e : t.event_universe) rec.event_counts[e] = std::floor(u(rng) * 1e9) / 7.0;
      rec.replicate = reps[{rec.kernel_name, rec.workload_id, rec.frequency_mhz}]++;
      t.records.push_back(rec);
    }
    std::stringstream buf;
    write_profile_csv(buf, t);
    const auto back = parse_profile_csv(buf);
    CHECK(back == t);
  }
}

TEST_CASE("normalize_columns") {
  Dictionary d;
  d.values.resize(2, 1);
  d.values << 3, 4;
  d.col_labels = {"a"};
  d.row_labels = {"r1", "r2"};
  d.col_stats.assign(1, {});

  SUBCASE("unit norm on the 3-4-5 triangle") {
    const auto n = normalize_columns(d, NormalizationMode::UnitNorm);
    CHECK(n.values(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n.values(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(n.col_stats[0].norm == doctest::Approx(5.0));
    CHECK(n.normalization == NormalizationMode::UnitNorm);
  }
  SUBCASE("constant column dropped") {
    Dictionary c;
    c.values.resize(3, 2);
    c.values << 5, 1, 5, 2, 5, 4;
    c.col_labels = {"flat", "ramp"};
    c.row_labels = {"a", "b", "c"};
    c.col_stats.assign(2, {});
    for (auto mode : {NormalizationMode::UnitNorm, NormalizationMode::ZScore}) {
      const auto n = normalize_columns(c, mode);
      CHECK(n.col_labels == std::vector<std::string>{"ramp"});
      CHECK(n.dropped_constants == std::vector<std::string>{"flat"});
    }
  }
  SUBCASE("all constant") {
    Dictionary c;
    c.values.resize(3, 2);
    c.values << 5, 1, 5, 1, 5, 1;
    c.col_labels = {"x", "y"};
    c.row_labels = {"a", "b", "c"};
    c.col_stats.assign(2, {});
    try {
      normalize_columns(c, NormalizationMode::UnitNorm);
      FAIL("expected AllColumnsConstant");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::AllColumnsConstant);
    }
  }
}

TEST_CASE("normalized columns have unit norm, zscore columns zero mean") {
  const Eigen::MatrixXd raw = gpursm::testing::gaussian_matrix(30, 12, 99).array().abs() * 1e5;
  Dictionary d;
  d.values = raw;
  for (int j = 0; j < 12; ++j) d.col_labels.push_back("e" + std::to_string(j));
  for (int i = 0; i < 30; ++i) d.row_labels.push_back("r" + std::to_string(i));
  d.col_stats.assign(12, {});

  const auto u = normalize_columns(d, NormalizationMode::UnitNorm);
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    CHECK(std::abs(u.values.col(j).dot(u.values.col(j)) - 1.0) <= 1e-12);

  const auto z = normalize_columns(d, NormalizationMode::ZScore);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    CHECK(std::abs(z.values.col(j).mean()) <= 1e-12);
    CHECK(std::abs(z.values.col(j).norm() - 1.0) <= 1e-12);
  }

  // Coefficients map back to the raw scale: D_norm * a == (D_raw - offset) * raw_a.
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(12, -1.0, 1.0);
  const Eigen::VectorXd back = raw_scale_coefficients(z, a);
  Eigen::MatrixXd centered = raw;
  for (Eigen::Index j = 0; j < 12; ++j)
    centered.col(j).array() -= z.col_stats[static_cast<std::size_t>(j)].offset;
  CHECK((z.values * a - centered * back).norm() <= 1e-9 * (z.values * a).norm());
}

TEST_CASE("select_columns keeps requested order") {
  const auto t = parse("kernel,workload,time_s,sm_util,a,b,c\nk,w1,1,0.5,1,2,3\nk,w2,1,0.5,4,5,6\n");
  const auto d = build_dictionary(t, "k");
  const auto s = select_columns(d, {"c", "a"});
  CHECK(s.col_labels == std::vector<std::string>{"c", "a"});
  CHECK(s.values(1, 0) == 6.0);
  CHECK_THROWS_AS(select_columns(d, {"zz"}), Error);
}

TEST_CASE("normalization names") {
  CHECK(normalization_from_string("zscore") == NormalizationMode::ZScore);
  CHECK(normalization_from_string(to_string(NormalizationMode::UnitNorm)) ==
        NormalizationMode::UnitNorm);
  CHECK_THROWS_AS(normalization_from_string("l1"), Error);
}
