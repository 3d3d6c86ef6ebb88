#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "strata/curves.hpp"
#include "strata/dataset.hpp"
#include "strata/inference.hpp"
#include "strata/metrics.hpp"
#include "strata/subgroups.hpp"
#include "strata/uncertainty.hpp"

namespace strata {

inline constexpr int kResultsSchemaVersion = 1;

std::string_view version() noexcept;

struct ColumnBindings {
  std::filesystem::path input;
  std::string score_col = "score";
  std::string label_col = "label";
  std::vector<std::string> attrs;
  std::vector<std::string> value_cols;
};

struct RunConfig {
  ColumnBindings data;
  std::vector<MetricId> metrics = {MetricId{MetricKind::kAccuracy, {}}, MetricId{MetricKind::kAuroc, {}}};
  std::vector<MetricId> tested_metrics = {MetricId{MetricKind::kAccuracy, {}}, MetricId{MetricKind::kAuroc, {}}};
  ThresholdRule threshold = ThresholdRule::base_rate();
  CiConfig ci;
  EnumerationConfig enumeration;
  std::size_t n_perm = 1000;
  double recg_min = 0.2;
  std::size_t n_bins = 0;  // 0: per-group default
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::size_t top_k = 20;
  std::size_t inner_boot = 50;
  std::size_t curve_boot = 200;
  unsigned threads = 0;

  /// Throws Error(kConfig) naming the offending field.
  void validate() const;
};

/// JSON form of a RunConfig (the --config file format). The output
/// directory and thread count are not part of the echo written to
/// results.json since they do not affect results.
std::string run_config_to_json(const RunConfig& cfg, bool include_runtime = true);

/// Overlays the fields present in `json` onto `base`. Throws Error(kConfig).
RunConfig run_config_from_json(std::string_view json, RunConfig base = {});

struct GroupInfo {
  SubgroupSpec spec;
  std::size_t n = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t complement_n = 0;
};

struct Provenance {
  std::string tool = "strata";
  std::string version;
  std::uint64_t seed = 0;
  std::string input;
  std::size_t rows = 0;
  std::string threshold_rule;
  double threshold = 0.0;
  double base_rate = 0.0;
};

struct AttributeCurves {
  std::string attribute;
  std::vector<CurveSet> sets;  // roc, pr, prg, calibration
};

struct ReportBundle {
  RunConfig config;
  Provenance provenance;
  std::vector<GroupInfo> groups;                // canonical order
  std::vector<MetricResult> overall;            // one per config.metrics entry
  std::vector<std::vector<MetricResult>> grid;  // [group][metric]
  std::vector<TestResult> tests;                // group-major, tested-metric order
  std::map<std::string, std::vector<RankedGroup>> ranking;  // per tested metric
  std::vector<AttributeCurves> curves;
};

/// Ingests cfg.data.input and runs the full evaluation.
ReportBundle run_evaluation(const RunConfig& cfg);

/// Full evaluation of an already loaded table: threshold, enumeration,
/// per-group metrics with CIs, curves, complement tests, Holm adjustment and
/// ranking. Deterministic given cfg.seed.
ReportBundle evaluate_table(const EvalTable& table, const RunConfig& cfg, std::string input_label = {});

/// results.json content: sorted keys, floats rounded to 12 significant
/// digits, schema_version 1.
std::string render_json_string(const ReportBundle& bundle);
void render_json(const ReportBundle& bundle, const std::filesystem::path& out);

/// Self-contained report.html (inline SVG, no scripts or external assets).
std::string render_html_string(const ReportBundle& bundle);
void render_html(const ReportBundle& bundle, const std::filesystem::path& out);

/// Rounds to 12 significant digits as written to results.json.
double round_significant(double value);

}  // namespace strata
