#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/dataset.hpp"

namespace strata {

/// A metric value that may be undefined (e.g. precision with no positive
/// predictions). Undefined values carry the reason so reports can show it.
struct MetricValue {
  std::optional<double> value;
  std::string undefined_reason;

  static MetricValue of(double v) { return {v, {}}; }
  static MetricValue undefined(std::string reason) { return {std::nullopt, std::move(reason)}; }

  bool defined() const noexcept { return value.has_value(); }
  double operator*() const { return *value; }
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t n() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Prediction is positive iff score >= threshold. Throws Error(kEmptyInput).
ConfusionCounts confusion(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold);

enum class RatioKind { kAccuracy, kSensitivity, kSpecificity, kPrecision, kBalancedAccuracy };

MetricValue ratio_metric(RatioKind kind, const ConfusionCounts& c);

/// successes / trials behind a simple ratio metric (not balanced accuracy).
struct RatioParts {
  std::size_t successes = 0;
  std::size_t trials = 0;
};
RatioParts ratio_parts(RatioKind kind, const ConfusionCounts& c);

/// Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie).
/// O(n log n) via midranks; undefined when a class is absent.
MetricValue auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Mean squared error of the scores. The balanced variant averages the two
/// per-class means and throws Error(kOneClassOnly) if a class is missing.
double brier(std::span<const double> scores, std::span<const std::uint8_t> labels, bool balanced);

/// Arithmetic mean of per-row values (dice scores, losses, ...).
double average_metric(std::span<const double> values);

/// max(1, min(15, n / 10)).
std::size_t default_calibration_bins(std::size_t n);

/// Debiased root mean squared calibration error over equal-count bins:
/// sqrt(max(0, sum_b n_b/n [(c_b - a_b)^2 - a_b (1 - a_b) / (n_b - 1)])),
/// with c_b the mean score and a_b the mean label of bin b.
/// Throws Error(kTooFewSamples) if any bin would hold fewer than 2 rows.
double drmsce(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t n_bins);

/// Plug-in RMSCE over the same bins, without the variance correction.
double rmsce_plugin(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t n_bins);

/// Row ranges [begin, end) of equal-count bins over rows sorted by
/// (score, label); returns the sort order alongside.
struct CalibrationBins {
  std::vector<std::size_t> order;
  std::vector<std::size_t> bounds;  // n_bins + 1 entries
};
CalibrationBins equal_count_bins(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                 std::size_t n_bins);

// ---------------------------------------------------------------------------
// Metric registry

enum class MetricKind {
  kAccuracy,
  kSensitivity,
  kSpecificity,
  kPrecision,
  kBalancedAccuracy,
  kAuroc,
  kBrier,
  kBalancedBrier,
  kPauprg,
  kDrmsce,
  kMean,
};

/// Identifies a metric; kMean carries the name of the value column it
/// averages ("mean:<column>").
struct MetricId {
  MetricKind kind = MetricKind::kAccuracy;
  std::string column;

  /// Accepts accuracy, sensitivity, specificity, precision,
  /// balanced_accuracy, auroc, brier, balanced_brier, pauprg, drmsce and
  /// mean:<column>. Throws Error(kConfig) naming the id otherwise.
  static MetricId parse(std::string_view text);
  std::string name() const;

  bool operator==(const MetricId&) const = default;
};

bool is_thresholded(const MetricId& id) noexcept;
/// Metrics that need at least one positive and one negative row.
bool requires_both_classes(const MetricId& id) noexcept;
/// Metrics whose value depends on the class composition of the sample, for
/// which bootstrap resampling is stratified by label.
bool class_dependent(const MetricId& id) noexcept;
/// Metrics bounded to [0, 1].
bool unit_bounded(const MetricId& id) noexcept;

/// Settings shared by all metric evaluations within a run.
struct MetricContext {
  double threshold = 0.5;
  std::size_t n_bins = 0;  // 0: default_calibration_bins(n)
  double recg_min = 0.2;
};

/// Non-owning columns of a sample. `values` is the value column of a kMean
/// metric and may be empty otherwise.
struct SampleView {
  std::span<const double> scores;
  std::span<const std::uint8_t> labels;
  std::span<const double> values;

  std::size_t size() const noexcept { return scores.size(); }
  std::size_t positives() const noexcept;
};

/// Owning copy of selected rows.
struct Sample {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  std::vector<double> values;

  SampleView view() const noexcept { return {scores, labels, values}; }
  std::size_t size() const noexcept { return scores.size(); }

  /// Copies `rows` of `table`; `value_column` < 0 leaves values empty.
  static Sample gather(const EvalTable& table, const RowSet& rows, int value_column = -1);
  /// Sample for evaluating `metric`, resolving its value column.
  static Sample for_metric(const EvalTable& table, const RowSet& rows, const MetricId& metric);
};

/// Evaluates any registered metric. Never throws for data-dependent
/// undefinedness; returns an undefined MetricValue with a reason instead.
MetricValue evaluate(const MetricId& metric, const SampleView& sample, const MetricContext& ctx);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::string method;
};

/// One (metric, group) cell of a report.
struct MetricResult {
  std::string metric_id;
  std::optional<double> value;
  std::size_t n = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::optional<ConfidenceInterval> ci;
  std::string undefined_reason;
  std::string ci_missing_reason;
  std::map<std::string, double> meta;
};

}  // namespace strata
