#include "strata/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "strata/curves.hpp"
#include "strata/error.hpp"

namespace strata {

ConfusionCounts confusion(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold) {
  if (scores.empty()) fail(ErrorKind::kEmptyInput, "confusion counts of an empty sample");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

RatioParts ratio_parts(RatioKind kind, const ConfusionCounts& c) {
  switch (kind) {
    case RatioKind::kAccuracy: return {c.tp + c.tn, c.n()};
    case RatioKind::kSensitivity: return {c.tp, c.tp + c.fn};
    case RatioKind::kSpecificity: return {c.tn, c.tn + c.fp};
    case RatioKind::kPrecision: return {c.tp, c.tp + c.fp};
    case RatioKind::kBalancedAccuracy: break;
  }
  fail(ErrorKind::kDomain, "balanced accuracy is not a simple ratio");
}

MetricValue ratio_metric(RatioKind kind, const ConfusionCounts& c) {
  auto ratio = [](RatioParts p, const char* reason) {
    if (p.trials == 0) return MetricValue::undefined(reason);
    return MetricValue::of(static_cast<double>(p.successes) / static_cast<double>(p.trials));
  };
  switch (kind) {
    case RatioKind::kAccuracy: return ratio(ratio_parts(kind, c), "empty sample");
    case RatioKind::kSensitivity: return ratio(ratio_parts(kind, c), "no positive samples");
    case RatioKind::kSpecificity: return ratio(ratio_parts(kind, c), "no negative samples");
    case RatioKind::kPrecision: return ratio(ratio_parts(kind, c), "no positive predictions");
    case RatioKind::kBalancedAccuracy: {
      const auto sens = ratio_metric(RatioKind::kSensitivity, c);
      const auto spec = ratio_metric(RatioKind::kSpecificity, c);
      if (!sens.defined()) return sens;
      if (!spec.defined()) return spec;
      return MetricValue::of((*sens + *spec) / 2.0);
    }
  }
  return MetricValue::undefined("unknown ratio metric");
}

MetricValue auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (auto y : labels) positives += y;
  const std::size_t negatives = n - positives;
  if (positives == 0) return MetricValue::undefined("no positive samples");
  if (negatives == 0) return MetricValue::undefined("no negative samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::size_t pos_in_tie = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      pos_in_tie += labels[order[j]];
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += midrank * static_cast<double>(pos_in_tie);
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return MetricValue::of(u / (p * static_cast<double>(negatives)));
}

double brier(std::span<const double> scores, std::span<const std::uint8_t> labels, bool balanced) {
  if (scores.empty()) fail(ErrorKind::kEmptyInput, "Brier score of an empty sample");
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - labels[i];
    sum[labels[i]] += d * d;
    ++count[labels[i]];
  }
  if (!balanced) return (sum[0] + sum[1]) / static_cast<double>(scores.size());
  if (count[0] == 0 || count[1] == 0) fail(ErrorKind::kOneClassOnly, "balanced Brier score needs both classes");
  return 0.5 * (sum[0] / static_cast<double>(count[0]) + sum[1] / static_cast<double>(count[1]));
}

double average_metric(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::kEmptyInput, "average of no values");
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::kNonFiniteValue, "average of a non-finite value");
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

std::size_t default_calibration_bins(std::size_t n) { return std::max<std::size_t>(1, std::min<std::size_t>(15, n / 10)); }

CalibrationBins equal_count_bins(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                 std::size_t n_bins) {
  const std::size_t n = scores.size();
  if (n_bins == 0) fail(ErrorKind::kDomain, "calibration needs at least one bin");
  if (n < 2 * n_bins) {
    fail(ErrorKind::kTooFewSamples, fmt::format("{} rows cannot fill {} bins with >= 2 rows each", n, n_bins));
  }
  CalibrationBins bins;
  bins.order.resize(n);
  std::iota(bins.order.begin(), bins.order.end(), std::size_t{0});
  std::sort(bins.order.begin(), bins.order.end(), [&](auto a, auto b) {
    return scores[a] != scores[b] ? scores[a] < scores[b] : labels[a] < labels[b];
  });
  bins.bounds.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b) bins.bounds[b] = b * n / n_bins;
  return bins;
}

namespace {

double calibration_error(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t n_bins,
                         bool debias) {
  const auto bins = equal_count_bins(scores, labels, n_bins);
  const double n = static_cast<double>(scores.size());
  double total = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    double score_sum = 0.0;
    double label_sum = 0.0;
    for (std::size_t k = bins.bounds[b]; k < bins.bounds[b + 1]; ++k) {
      score_sum += scores[bins.order[k]];
      label_sum += labels[bins.order[k]];
    }
    const double nb = static_cast<double>(bins.bounds[b + 1] - bins.bounds[b]);
    const double c = score_sum / nb;
    const double a = label_sum / nb;
    double term = (c - a) * (c - a);
    if (debias) term -= a * (1.0 - a) / (nb - 1.0);
    total += nb / n * term;
  }
  return std::sqrt(std::max(0.0, total));
}

}  // namespace

double drmsce(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t n_bins) {
  return calibration_error(scores, labels, n_bins, true);
}

double rmsce_plugin(std::span<const double> scores, std::span<const std::uint8_t> labels, std::size_t n_bins) {
  return calibration_error(scores, labels, n_bins, false);
}

// ---------------------------------------------------------------------------

MetricId MetricId::parse(std::string_view text) {
  static const std::pair<std::string_view, MetricKind> kNames[] = {
      {"accuracy", MetricKind::kAccuracy},
      {"sensitivity", MetricKind::kSensitivity},
      {"specificity", MetricKind::kSpecificity},
      {"precision", MetricKind::kPrecision},
      {"balanced_accuracy", MetricKind::kBalancedAccuracy},
      {"auroc", MetricKind::kAuroc},
      {"brier", MetricKind::kBrier},
      {"balanced_brier", MetricKind::kBalancedBrier},
      {"pauprg", MetricKind::kPauprg},
      {"drmsce", MetricKind::kDrmsce},
  };
  for (const auto& [name, kind] : kNames) {
    if (text == name) return {kind, {}};
  }
  if (text.starts_with("mean:") && text.size() > 5) return {MetricKind::kMean, std::string(text.substr(5))};
  fail(ErrorKind::kConfig, fmt::format("unknown metric id '{}'", text));
}

std::string MetricId::name() const {
  switch (kind) {
    case MetricKind::kAccuracy: return "accuracy";
    case MetricKind::kSensitivity: return "sensitivity";
    case MetricKind::kSpecificity: return "specificity";
    case MetricKind::kPrecision: return "precision";
    case MetricKind::kBalancedAccuracy: return "balanced_accuracy";
    case MetricKind::kAuroc: return "auroc";
    case MetricKind::kBrier: return "brier";
    case MetricKind::kBalancedBrier: return "balanced_brier";
    case MetricKind::kPauprg: return "pauprg";
    case MetricKind::kDrmsce: return "drmsce";
    case MetricKind::kMean: return "mean:" + column;
  }
  return "unknown";
}

bool is_thresholded(const MetricId& id) noexcept {
  switch (id.kind) {
    case MetricKind::kAccuracy:
    case MetricKind::kSensitivity:
    case MetricKind::kSpecificity:
    case MetricKind::kPrecision:
    case MetricKind::kBalancedAccuracy:
      return true;
    default:
      return false;
  }
}

bool requires_both_classes(const MetricId& id) noexcept {
  switch (id.kind) {
    case MetricKind::kBalancedAccuracy:
    case MetricKind::kAuroc:
    case MetricKind::kBalancedBrier:
    case MetricKind::kPauprg:
      return true;
    default:
      return false;
  }
}

bool class_dependent(const MetricId& id) noexcept {
  return requires_both_classes(id) || id.kind == MetricKind::kSensitivity || id.kind == MetricKind::kSpecificity;
}

bool unit_bounded(const MetricId& id) noexcept { return id.kind != MetricKind::kPauprg && id.kind != MetricKind::kMean; }

std::size_t SampleView::positives() const noexcept {
  std::size_t p = 0;
  for (auto y : labels) p += y;
  return p;
}

Sample Sample::gather(const EvalTable& table, const RowSet& rows, int value_column) {
  Sample s;
  s.scores.reserve(rows.size());
  s.labels.reserve(rows.size());
  const auto scores = table.scores();
  const auto labels = table.labels();
  for (auto r : rows) {
    s.scores.push_back(scores[r]);
    s.labels.push_back(labels[r]);
  }
  if (value_column >= 0) {
    const auto& col = table.value_columns().at(static_cast<std::size_t>(value_column)).values;
    s.values.reserve(rows.size());
    for (auto r : rows) s.values.push_back(col[r]);
  }
  return s;
}

Sample Sample::for_metric(const EvalTable& table, const RowSet& rows, const MetricId& metric) {
  int column = -1;
  if (metric.kind == MetricKind::kMean) {
    column = table.value_column_index(metric.column);
    if (column < 0) fail(ErrorKind::kConfig, fmt::format("metric '{}' names an unknown value column", metric.name()));
  }
  return gather(table, rows, column);
}

namespace {

MetricValue ratio_of(RatioKind kind, const SampleView& s, const MetricContext& ctx) {
  if (s.size() == 0) return MetricValue::undefined("empty sample");
  return ratio_metric(kind, confusion(s.scores, s.labels, ctx.threshold));
}

}  // namespace

MetricValue evaluate(const MetricId& metric, const SampleView& s, const MetricContext& ctx) {
  const std::size_t n = s.size();
  switch (metric.kind) {
    case MetricKind::kAccuracy: return ratio_of(RatioKind::kAccuracy, s, ctx);
    case MetricKind::kSensitivity: return ratio_of(RatioKind::kSensitivity, s, ctx);
    case MetricKind::kSpecificity: return ratio_of(RatioKind::kSpecificity, s, ctx);
    case MetricKind::kPrecision: return ratio_of(RatioKind::kPrecision, s, ctx);
    case MetricKind::kBalancedAccuracy: return ratio_of(RatioKind::kBalancedAccuracy, s, ctx);
    case MetricKind::kAuroc: return auroc(s.scores, s.labels);
    case MetricKind::kBrier:
      if (n == 0) return MetricValue::undefined("empty sample");
      return MetricValue::of(brier(s.scores, s.labels, false));
    case MetricKind::kBalancedBrier: {
      const std::size_t p = s.positives();
      if (p == 0 || p == n) return MetricValue::undefined("one class only");
      return MetricValue::of(brier(s.scores, s.labels, true));
    }
    case MetricKind::kPauprg: {
      const std::size_t p = s.positives();
      if (p == 0 || p == n) return MetricValue::undefined("one class only");
      return pauprg(s.scores, s.labels, ctx.recg_min).value;
    }
    case MetricKind::kDrmsce: {
      if (n < 2) return MetricValue::undefined("fewer than 2 samples");
      const std::size_t requested = ctx.n_bins > 0 ? ctx.n_bins : default_calibration_bins(n);
      return MetricValue::of(drmsce(s.scores, s.labels, std::min(requested, n / 2)));
    }
    case MetricKind::kMean:
      if (s.values.empty()) return MetricValue::undefined("empty sample");
      return MetricValue::of(average_metric(s.values));
  }
  return MetricValue::undefined("unknown metric");
}

}  // namespace strata
