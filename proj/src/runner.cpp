// SPDX-License-Identifier: Apache-2.0
#include "gpursm/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "gpursm/error.hpp"
#include "gpursm/report.hpp"
#include "gpursm/schema.hpp"
#include "gpursm/svg.hpp"
#include "embedded_defaults.hpp"

namespace gpursm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class TableCache {
 public:
  explicit TableCache(const TaskConfig& cfg) : cfg_(cfg) {}

  const ProfileTable& get(const std::string& path) {
    auto it = tables_.find(path);
    if (it == tables_.end())
      it = tables_.emplace(path, load_profile_csv(cfg_.resolve(path).string(), cfg_.columns)).first;
    return it->second;
  }

 private:
  const TaskConfig& cfg_;
  std::map<std::string, ProfileTable> tables_;
};

const std::string& task_data(const TaskConfig& cfg, const TaskSpec& t) {
  return t.data.empty() ? cfg.data : t.data;
}

KernelResult analyze_kernel(const ProfileTable& table, const std::string& kernel,
                            const TaskSpec& spec, const AnalysisParams& params,
                            const TaskConfig& cfg, const MachineModel& model,
                            const std::vector<SuggestionRule>& rules) {
  if (!table.has_kernel(kernel))
    throw Error(Errc::UnknownKernel, "task '" + spec.name + "' names kernel '" + kernel +
                                         "' which the profile does not contain", kernel);
  RowKeySpec row_key;
  row_key.average_replicates = !spec.keep_replicates;

  KernelResult k;
  k.kernel = kernel;
  k.target = compute_target(spec.target, table, kernel, row_key, cfg.alpha);
  const Dictionary raw = build_dictionary(table, kernel, row_key);
  std::vector<RowSubset> subsets;
  if (spec.workload_key != WorkloadKey::None)
    subsets = workload_subsets(table, kernel, row_key, spec.workload_key);
  k.analysis = analyze_dictionary(raw, k.target.values, model, params, subsets);
  k.normalized = normalize_rsm(k.analysis.rsm);
  k.suggestions =
      suggest(k.normalized, rules, model, cfg.suggest.top_k, cfg.suggest.threshold, kernel);
  return k;
}

void write_views(const json& report, const fs::path& dir, std::vector<fs::path>& files) {
  for (const auto& task : report.at("tasks")) {
    const auto path =
        dir / ("sunburst_" + sanitize_filename(task.at("name").get<std::string>()) + ".svg");
    write_file_atomic(path, render_sunburst_svg(sunburst_from_json(task.at("sunburst"))));
    files.push_back(path);
  }
  for (const auto& c : report.at("comparisons")) {
    const auto chart = chart_from_json(c);
    const auto path = dir / ("compare_" + sanitize_filename(chart.name) + ".svg");
    write_file_atomic(path, render_comparison_svg(chart));
    files.push_back(path);
  }
}

}  // namespace

void apply_overrides(TaskConfig& cfg, const RunOverrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  auto apply = [&](Hyperparams& h) {
    if (o.draws) h.draws = *o.draws;
    if (o.kappa) h.kappa = *o.kappa;
    if (o.tau) h.tau = *o.tau;
    if (o.gamma) h.gamma = *o.gamma;
    if (o.threads) h.threads = *o.threads;
  };
  apply(cfg.hyperparams);
  for (auto& t : cfg.tasks) apply(t.hyperparams);
  if (o.kappa && !(*o.kappa > 0.0 && *o.kappa <= 1.0))
    throw Error(Errc::InvalidKappa, "--kappa must lie in (0, 1]", "kappa");
  if (o.tau && *o.tau < 1) throw Error(Errc::InvalidConfig, "--tau must be at least 1", "tau");
  if (o.draws && *o.draws < 1)
    throw Error(Errc::InvalidConfig, "--draws must be at least 1", "draws");
  if (o.gamma && !(*o.gamma > 0.0))
    throw Error(Errc::InvalidConfig, "--gamma must be positive", "gamma");
}

const std::string& report_schema_text() {
  static const std::string text(embedded::kReportSchema);
  return text;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write '" + tmp.string() + "'", tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::Io, "short write to '" + tmp.string() + "'", tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::Io, "cannot move output into '" + path.string() + "'", path.string());
  }
}

RunSummary run_analysis(const TaskConfig& cfg, const fs::path& output_dir, std::ostream& log) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();

  const MachineModel model =
      cfg.model.empty() ? default_model() : load_model_file(cfg.resolve(cfg.model).string());
  const std::vector<SuggestionRule> rules =
      cfg.suggest.rules.empty() ? default_rules(model)
                                : load_rules_file(cfg.resolve(cfg.suggest.rules).string(), model);

  TableCache tables(cfg);
  RunResults results;
  results.config = &cfg;
  results.model = &model;
  results.rules = &rules;

  std::map<std::string, const TaskResult*> by_name;
  for (const auto& spec : cfg.tasks) {
    const ProfileTable& table = tables.get(task_data(cfg, spec));
    TaskResult tr;
    tr.spec = spec;
    tr.params = to_analysis_params(spec.hyperparams, cfg.seed);
    const auto kernels = spec.kernels.empty() ? table.kernels() : spec.kernels;
    std::vector<SunburstKernel> sun;
    for (const auto& kernel : kernels) {
      log << "task " << spec.name << ", kernel " << kernel << ": " << to_string(spec.target)
          << ", R=" << tr.params.draws << "\n";
      tr.kernels.push_back(analyze_kernel(table, kernel, spec, tr.params, cfg, model, rules));
      sun.push_back({kernel, tr.kernels.back().normalized, tr.kernels.back().analysis.partition});
    }
    tr.sunburst = build_sunburst(spec.name, sun);
    results.tasks.push_back(std::move(tr));
  }
  for (const auto& t : results.tasks) by_name[t.spec.name] = &t;

  for (const auto& c : cfg.comparisons) {
    const TaskSpec& base = by_name.at(c.baseline.task)->spec;
    const TaskSpec& var = by_name.at(c.variant.task)->spec;
    const ProfileTable& t1 = tables.get(task_data(cfg, base));
    const ProfileTable& t2 = tables.get(task_data(cfg, var));
    for (const auto& [ref, table] : {std::pair{&c.baseline, &t1}, std::pair{&c.variant, &t2}})
      if (!table->has_kernel(ref->kernel))
        throw Error(Errc::UnknownKernel, "comparison '" + c.name + "' names kernel '" +
                                             ref->kernel + "' which the profile does not contain",
                    ref->kernel);
    log << "comparison " << c.name << "\n";
    RowKeySpec row_key;
    row_key.average_replicates = !base.keep_replicates;
    const ComparisonSide s1{&t1, c.baseline.kernel, base.target, c.baseline.label()};
    const ComparisonSide s2{&t2, c.variant.kernel, var.target, c.variant.label()};
    const auto paired = align_pairs(s1, s2, c.join, row_key, cfg.alpha);

    ComparisonResult cr;
    cr.spec = c;
    cr.params = to_analysis_params(base.hyperparams, cfg.seed);
    cr.params.polarity = Polarity::Positive;
    cr.join_labels = paired.join_labels;
    cr.unmatched_baseline = paired.unmatched_rows_1;
    cr.unmatched_variant = paired.unmatched_rows_2;
    cr.dropped_columns_baseline = paired.dropped_columns_1;
    cr.dropped_columns_variant = paired.dropped_columns_2;
    cr.result = comparative_rsm(paired, model, cr.params);
    results.comparisons.push_back(std::move(cr));
  }

  const json report = build_report(results);
  const auto problems = validate_json(report, json::parse(report_schema_text()));
  if (!problems.empty()) {
    std::string msg = "report fails its schema:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::logic_error(msg);
  }

  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec)
    throw Error(Errc::Io, "cannot create output directory '" + output_dir.string() + "'",
                output_dir.string());

  RunSummary summary;
  summary.output_dir = output_dir;
  const auto report_path = output_dir / "report.json";
  write_file_atomic(report_path, dump_report(report));
  summary.files.push_back(report_path);
  write_views(report, output_dir, summary.files);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json files = json::array();
  for (const auto& f : summary.files) files.push_back(f.filename().string());
  const json meta = {{"started_at", utc_timestamp(started)},
                     {"finished_at", utc_timestamp(std::chrono::system_clock::now())},
                     {"elapsed_seconds", elapsed},
                     {"hardware_threads", std::thread::hardware_concurrency()},
                     {"files", files}};
  const auto meta_path = output_dir / "run_meta.json";
  write_file_atomic(meta_path, meta.dump(2) + "\n");
  summary.files.push_back(meta_path);
  return summary;
}

RunSummary render_report(const fs::path& report_path, const fs::path& output_dir) {
  std::ifstream in(report_path);
  if (!in) throw Error(Errc::Io, "cannot open report '" + report_path.string() + "'",
                       report_path.string());
  json report;
  try {
    report = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Io, "report '" + report_path.string() + "' is not JSON: " + e.what(),
                report_path.string());
  }
  const auto problems = validate_json(report, json::parse(report_schema_text()));
  if (!problems.empty())
    throw Error(Errc::Io,
                "report '" + report_path.string() + "' fails the schema: " + problems.front(),
                report_path.string());
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec)
    throw Error(Errc::Io, "cannot create output directory '" + output_dir.string() + "'",
                output_dir.string());
  RunSummary summary;
  summary.output_dir = output_dir;
  write_views(report, output_dir, summary.files);
  return summary;
}

int exit_code(ErrorCategory category) { return static_cast<int>(category); }

int analyze_command(const fs::path& config, const RunOverrides& overrides,
                    const std::optional<fs::path>& render_only, std::ostream& log,
                    std::ostream& err) {
  try {
    RunSummary summary;
    if (render_only) {
      const fs::path dir = overrides.out_dir ? *overrides.out_dir
                                             : fs::absolute(*render_only).parent_path();
      summary = render_report(*render_only, dir);
    } else {
      TaskConfig cfg = load_task_config(config);
      apply_overrides(cfg, overrides);
      const fs::path dir = overrides.out_dir ? *overrides.out_dir : cfg.resolve(cfg.output_dir);
      summary = run_analysis(cfg, dir, log);
    }
    for (const auto& f : summary.files) log << "wrote " << f.string() << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.row()) err << " (row " << *e.row() << ")";
    err << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gpursm
