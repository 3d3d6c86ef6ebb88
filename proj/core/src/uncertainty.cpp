#include "strata/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "strata/error.hpp"
#include "strata/parallel.hpp"

namespace strata {

namespace {

constexpr std::size_t kChunk = 32;

/// Midranks (1-based, ties averaged) of `values`.
std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double sample_variance(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

void CiConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 0.5)) fail(ErrorKind::kConfig, fmt::format("alpha {} outside (0, 0.5]", alpha));
  if (n_boot < 100) fail(ErrorKind::kConfig, fmt::format("n_boot {} below the minimum of 100", n_boot));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

Interval wilson_ci(std::size_t k, std::size_t n, double alpha) {
  if (n == 0 || k > n) fail(ErrorKind::kDomain, fmt::format("Wilson interval needs 0 <= k <= n, n >= 1 (k={}, n={})", k, n));
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval ci{center - half, center + half};
  // The closed form is exact at the boundaries; pin them against rounding.
  if (k == 0) ci.lo = 0.0;
  if (k == n) ci.hi = 1.0;
  ci.lo = std::max(0.0, ci.lo);
  ci.hi = std::min(1.0, ci.hi);
  return ci;
}

DelongEstimate delong_variance(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty()) fail(ErrorKind::kOneClassOnly, "DeLong variance needs both classes");

  const std::size_t m = pos.size();
  const std::size_t n = neg.size();
  std::vector<double> combined(pos);
  combined.insert(combined.end(), neg.begin(), neg.end());

  const auto tz = midranks(combined);
  const auto tx = midranks(pos);
  const auto ty = midranks(neg);

  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) rank_sum += tz[i];
  const double auc = (rank_sum - md * (md + 1.0) / 2.0) / (md * nd);

  std::vector<double> v10(m);
  std::vector<double> v01(n);
  for (std::size_t i = 0; i < m; ++i) v10[i] = (tz[i] - tx[i]) / nd;
  for (std::size_t j = 0; j < n; ++j) v01[j] = 1.0 - (tz[m + j] - ty[j]) / md;

  const double var = sample_variance(v10, auc) / md + sample_variance(v01, auc) / nd;
  return {auc, var};
}

DelongCi delong_auroc_ci(std::span<const double> scores, std::span<const std::uint8_t> labels, double alpha) {
  const auto est = delong_variance(scores, labels);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(est.variance);
  return {std::max(0.0, est.auc - half), std::min(1.0, est.auc + half), est.variance, est.auc};
}

double newcombe_variance(double theta, std::size_t n_pos, std::size_t n_neg) {
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return theta * (1.0 - theta) *
         (1.0 + (np - 1.0) * (1.0 - theta) / (2.0 - theta) + (nn - 1.0) * theta / (1.0 + theta)) / (np * nn);
}

Interval newcombe_auroc_ci(double auc, std::size_t n_pos, std::size_t n_neg, double alpha) {
  if (n_pos == 0 || n_neg == 0) fail(ErrorKind::kOneClassOnly, "Newcombe interval needs both classes");
  if (!(auc >= 0.0 && auc <= 1.0)) fail(ErrorKind::kDomain, "AUROC outside [0,1]");
  const double z2 = std::pow(normal_quantile(1.0 - alpha / 2.0), 2);
  auto f = [&](double theta) {
    const double d = auc - theta;
    return d * d - z2 * newcombe_variance(theta, n_pos, n_neg);
  };
  // f >= 0 at `outside`, f <= 0 at `inside`; shrink to the crossing.
  auto solve = [&](double outside, double inside) {
    while (std::abs(inside - outside) > 1e-12) {
      const double mid = 0.5 * (outside + inside);
      (f(mid) >= 0.0 ? outside : inside) = mid;
    }
    return 0.5 * (outside + inside);
  };
  Interval ci;
  ci.lo = auc <= 0.0 ? 0.0 : solve(0.0, auc);
  ci.hi = auc >= 1.0 ? 1.0 : solve(1.0, auc);
  return ci;
}

Interval newcombe_auroc_ci(std::span<const double> scores, std::span<const std::uint8_t> labels, double alpha) {
  const auto a = auroc(scores, labels);
  if (!a.defined()) fail(ErrorKind::kOneClassOnly, "Newcombe interval needs both classes");
  std::size_t p = 0;
  for (auto y : labels) p += y;
  return newcombe_auroc_ci(*a, p, labels.size() - p, alpha);
}

AurocCi auroc_ci_dispatch(std::span<const double> scores, std::span<const std::uint8_t> labels, double alpha) {
  const auto a = auroc(scores, labels);
  if (!a.defined()) fail(ErrorKind::kOneClassOnly, "AUROC interval needs both classes");
  if (scores.size() <= 50 || *a == 1.0 || *a == 0.0) {
    const auto ci = newcombe_auroc_ci(scores, labels, alpha);
    return {ci.lo, ci.hi, "newcombe"};
  }
  const auto ci = delong_auroc_ci(scores, labels, alpha);
  return {ci.lo, ci.hi, "delong"};
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::kEmptyInput, "quantile of no values");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Resampler::Resampler(const SampleView& sample, bool stratify) : sample_(sample), stratify_(stratify) {
  if (stratify_) {
    for (std::size_t i = 0; i < sample.size(); ++i) (sample.labels[i] ? positives_ : negatives_).push_back(i);
  }
}

void Resampler::draw(Xoshiro256pp& rng, Sample& out) const {
  const std::size_t n = sample_.size();
  const bool has_values = !sample_.values.empty();
  out.scores.resize(n);
  out.labels.resize(n);
  out.values.resize(has_values ? n : 0);
  auto put = [&](std::size_t k, std::size_t src) {
    out.scores[k] = sample_.scores[src];
    out.labels[k] = sample_.labels[src];
    if (has_values) out.values[k] = sample_.values[src];
  };
  if (!stratify_) {
    for (std::size_t k = 0; k < n; ++k) put(k, uniform_index(rng, n));
    return;
  }
  std::size_t k = 0;
  for (const auto* group : {&positives_, &negatives_}) {
    for (std::size_t i = 0; i < group->size(); ++i) put(k++, (*group)[uniform_index(rng, group->size())]);
  }
}

BootstrapResult bootstrap_ci(const Evaluator& metric, const Sample& sample, const CiConfig& cfg, bool class_dependent) {
  cfg.validate();
  const auto original = metric(sample.view());
  if (!original.defined()) {
    fail(ErrorKind::kMetricUndefined, "metric undefined on the original sample: " + original.undefined_reason);
  }

  BootstrapResult out;
  out.stratified = class_dependent && cfg.stratify;
  const Resampler resampler(sample.view(), out.stratified);

  std::vector<double> values(cfg.n_boot, std::numeric_limits<double>::quiet_NaN());
  const std::size_t chunks = (cfg.n_boot + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Sample buffer;
        const std::size_t end = std::min(cfg.n_boot, (c + 1) * kChunk);
        for (std::size_t b = c * kChunk; b < end; ++b) {
          auto rng = substream(cfg.seed, {b});
          resampler.draw(rng, buffer);
          const auto v = metric(buffer.view());
          if (v.defined()) values[b] = *v;
        }
      },
      cfg.threads);

  for (double v : values) {
    if (std::isnan(v)) {
      ++out.n_dropped;
    } else {
      out.replicates.push_back(v);
    }
  }
  out.n_defined = out.replicates.size();
  if (static_cast<double>(out.n_dropped) > 0.1 * static_cast<double>(cfg.n_boot)) {
    out.missing_reason = fmt::format("{} of {} bootstrap resamples undefined", out.n_dropped, cfg.n_boot);
    return out;
  }
  std::vector<double> sorted = out.replicates;
  std::sort(sorted.begin(), sorted.end());
  out.interval = Interval{quantile_sorted(sorted, cfg.alpha / 2.0), quantile_sorted(sorted, 1.0 - cfg.alpha / 2.0)};
  return out;
}

Band curve_band(CurveKind kind, const Sample& sample, std::span<const double> grid, const CiConfig& cfg) {
  const auto point = curve_on_grid(kind, sample.view(), grid);
  const Resampler resampler(sample.view(), true);
  const std::size_t g = grid.size();

  std::vector<std::vector<double>> per_resample(cfg.n_boot);
  const std::size_t chunks = (cfg.n_boot + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        Sample buffer;
        const std::size_t end = std::min(cfg.n_boot, (c + 1) * kChunk);
        for (std::size_t b = c * kChunk; b < end; ++b) {
          auto rng = substream(cfg.seed, {b});
          resampler.draw(rng, buffer);
          per_resample[b] = curve_on_grid(kind, buffer.view(), grid);
        }
      },
      cfg.threads);

  Band band;
  std::vector<double> column;
  for (std::size_t k = 0; k < g; ++k) {
    if (std::isnan(point[k])) continue;
    column.clear();
    for (const auto& r : per_resample) {
      if (!std::isnan(r[k])) column.push_back(r[k]);
    }
    if (column.size() < cfg.n_boot / 2 || column.empty()) continue;
    std::sort(column.begin(), column.end());
    band.x.push_back(grid[k]);
    band.lo.push_back(std::min(point[k], quantile_sorted(column, cfg.alpha / 2.0)));
    band.hi.push_back(std::max(point[k], quantile_sorted(column, 1.0 - cfg.alpha / 2.0)));
  }
  return band;
}

MetricResult evaluate_with_ci(const MetricId& metric, const Sample& sample, const MetricContext& ctx,
                              const CiConfig& cfg) {
  MetricResult r;
  r.metric_id = metric.name();
  r.n = sample.size();
  r.n_pos = sample.view().positives();
  r.n_neg = r.n - r.n_pos;
  if (is_thresholded(metric)) r.meta["threshold"] = ctx.threshold;

  const auto value = evaluate(metric, sample.view(), ctx);
  if (metric.kind == MetricKind::kPauprg && r.n_pos > 0 && r.n_neg > 0) {
    const auto detail = pauprg(sample.scores, sample.labels, ctx.recg_min);
    r.meta["recg_min"] = detail.requested_min;
    r.meta["integrated_from"] = detail.integrated_from;
    r.meta["truncated"] = detail.truncated ? 1.0 : 0.0;
  }
  if (metric.kind == MetricKind::kDrmsce && r.n >= 2) {
    r.meta["n_bins"] = static_cast<double>(std::min(ctx.n_bins > 0 ? ctx.n_bins : default_calibration_bins(r.n), r.n / 2));
  }
  if (!value.defined()) {
    r.undefined_reason = value.undefined_reason;
    r.ci_missing_reason = "metric undefined";
    return r;
  }
  r.value = *value;

  const bool simple_ratio = metric.kind == MetricKind::kAccuracy || metric.kind == MetricKind::kSensitivity ||
                            metric.kind == MetricKind::kSpecificity || metric.kind == MetricKind::kPrecision;
  const bool analytic_available = simple_ratio || metric.kind == MetricKind::kAuroc;
  const bool use_analytic = analytic_available && cfg.method_override != CiMethod::kBootstrap;

  if (use_analytic && simple_ratio) {
    static const std::pair<MetricKind, RatioKind> kRatio[] = {
        {MetricKind::kAccuracy, RatioKind::kAccuracy},
        {MetricKind::kSensitivity, RatioKind::kSensitivity},
        {MetricKind::kSpecificity, RatioKind::kSpecificity},
        {MetricKind::kPrecision, RatioKind::kPrecision},
    };
    RatioKind kind = RatioKind::kAccuracy;
    for (const auto& [m, k] : kRatio) {
      if (m == metric.kind) kind = k;
    }
    const auto parts = ratio_parts(kind, confusion(sample.scores, sample.labels, ctx.threshold));
    const auto ci = wilson_ci(parts.successes, parts.trials, cfg.alpha);
    r.ci = ConfidenceInterval{ci.lo, ci.hi, "wilson"};
    return r;
  }
  if (use_analytic) {
    const auto ci = auroc_ci_dispatch(sample.scores, sample.labels, cfg.alpha);
    r.ci = ConfidenceInterval{ci.lo, ci.hi, ci.method};
    return r;
  }

  const auto boot = bootstrap_ci([&](const SampleView& s) { return evaluate(metric, s, ctx); }, sample, cfg,
                                 class_dependent(metric));
  r.meta["bootstrap_dropped"] = static_cast<double>(boot.n_dropped);
  if (!boot.interval) {
    r.ci_missing_reason = boot.missing_reason;
    return r;
  }
  // Percentile intervals can exclude the point estimate in discrete cases;
  // the reported interval always contains it.
  r.ci = ConfidenceInterval{std::min(boot.interval->lo, *r.value), std::max(boot.interval->hi, *r.value),
                            boot.stratified ? "stratified_percentile_bootstrap" : "percentile_bootstrap"};
  return r;
}

}  // namespace strata
