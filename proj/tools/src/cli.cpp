#include "strata_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "strata/error.hpp"
#include "strata/report.hpp"

namespace strata::cli {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kConfig, fmt::format("cannot read config file {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<MetricId> parse_metric_list(const std::vector<std::string>& names) {
  std::vector<MetricId> out;
  for (const auto& n : names) out.push_back(MetricId::parse(n));
  return out;
}

// Tested metrics that are still among the evaluated ones.
std::vector<MetricId> restrict_to(const std::vector<MetricId>& tested, const std::vector<MetricId>& metrics) {
  std::vector<MetricId> kept;
  for (const auto& m : tested) {
    if (std::find(metrics.begin(), metrics.end(), m) != metrics.end()) kept.push_back(m);
  }
  return kept;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stratified subgroup evaluation of binary classifier predictions.", "strata"};
  app.set_version_flag("--version", std::string(version()));

  std::string config_path, input, score_col, label_col, threshold, out_dir, ci_method;
  std::vector<std::string> attrs, value_cols, metrics, test_metrics;
  std::size_t min_group_size = 0, max_level = 0, n_boot = 0, n_perm = 0, bins = 0, top_k = 0;
  double alpha = 0.0, recg_min = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  app.add_option("--config", config_path, "JSON run configuration; flags override its fields");
  app.add_option("--input", input, "Input CSV with a header row");
  app.add_option("--score-col", score_col, "Score column (default: score)");
  app.add_option("--label-col", label_col, "Label column (default: label)");
  app.add_option("--attrs", attrs, "Comma-separated categorical attribute columns")->delimiter(',');
  app.add_option("--value-cols", value_cols, "Comma-separated per-row value columns for mean:<col> metrics")
      ->delimiter(',');
  app.add_option("--metrics", metrics, "Comma-separated metric ids (default: accuracy,auroc)")->delimiter(',');
  app.add_option("--test-metrics", test_metrics, "Metrics tested against complementary groups")->delimiter(',');
  app.add_option("--threshold", threshold, "fixed:<t>, base-rate or max-gmean (default: base-rate)");
  app.add_option("--min-group-size", min_group_size, "Smallest subgroup to evaluate (default: 1)");
  app.add_option("--max-level", max_level, "Largest number of combined attributes (default: 1)");
  app.add_option("--alpha", alpha, "Confidence level 1 - alpha for intervals (default: 0.05)");
  app.add_option("--n-boot", n_boot, "Bootstrap resamples for intervals (default: 2000)");
  app.add_option("--ci-method", ci_method, "auto, analytic or bootstrap (default: auto)");
  app.add_option("--n-perm", n_perm, "Permutations per test (default: 1000)");
  app.add_option("--recg-min", recg_min, "Lower recall-gain limit of pauprg (default: 0.2)");
  app.add_option("--bins", bins, "Calibration bins, 0 for the per-group default");
  app.add_option("--top-k", top_k, "Rows of the ranking table in the report (default: 20)");
  app.add_option("--seed", seed, "Random seed (default: 0)");
  app.add_option("--threads", threads, "Worker threads, 0 for all cores");
  app.add_option("--out-dir", out_dir, "Output directory (default: out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = run_config_from_json(read_file(config_path), cfg);
    auto given = [&](const char* flag) { return app.count(flag) > 0; };
    if (given("--input")) cfg.data.input = input;
    if (given("--score-col")) cfg.data.score_col = score_col;
    if (given("--label-col")) cfg.data.label_col = label_col;
    if (given("--attrs")) cfg.data.attrs = attrs;
    if (given("--value-cols")) cfg.data.value_cols = value_cols;
    if (given("--metrics")) cfg.metrics = parse_metric_list(metrics);
    if (given("--test-metrics")) cfg.tested_metrics = parse_metric_list(test_metrics);
    if (given("--threshold")) cfg.threshold = ThresholdRule::parse(threshold);
    if (given("--min-group-size")) cfg.enumeration.min_group_size = min_group_size;
    if (given("--max-level")) cfg.enumeration.max_level = max_level;
    if (given("--alpha")) cfg.ci.alpha = alpha;
    if (given("--n-boot")) cfg.ci.n_boot = n_boot;
    if (given("--ci-method")) {
      if (ci_method == "auto") cfg.ci.method_override.reset();
      else if (ci_method == "analytic") cfg.ci.method_override = CiMethod::kAnalytic;
      else if (ci_method == "bootstrap") cfg.ci.method_override = CiMethod::kBootstrap;
      else fail(ErrorKind::kConfig, fmt::format("unknown ci method '{}'", ci_method));
    }
    if (given("--n-perm")) cfg.n_perm = n_perm;
    if (given("--recg-min")) cfg.recg_min = recg_min;
    if (given("--bins")) cfg.n_bins = bins;
    if (given("--top-k")) cfg.top_k = top_k;
    if (given("--seed")) cfg.seed = seed;
    if (given("--threads")) cfg.threads = threads;
    if (given("--out-dir")) cfg.output_dir = out_dir;
    if (given("--metrics") && !given("--test-metrics")) cfg.tested_metrics = restrict_to(cfg.tested_metrics, cfg.metrics);
    if (cfg.data.input.empty()) fail(ErrorKind::kConfig, "no input file given (--input)");
    cfg.validate();

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
      fail(ErrorKind::kConfig, fmt::format("output directory {} is not writable", cfg.output_dir.string()));
    }

    const auto bundle = run_evaluation(cfg);
    render_json(bundle, cfg.output_dir / "results.json");
    render_html(bundle, cfg.output_dir / "report.html");
    out << fmt::format("wrote {} and {}\n", (cfg.output_dir / "report.html").string(),
                       (cfg.output_dir / "results.json").string());
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_config_error() ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace strata::cli
