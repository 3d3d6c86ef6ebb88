#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/curves.hpp"
#include "strata/metrics.hpp"
#include "strata/random.hpp"

namespace strata {

enum class CiMethod { kAnalytic, kBootstrap };

struct CiConfig {
  double alpha = 0.05;
  std::size_t n_boot = 2000;
  std::uint64_t seed = 0;
  bool stratify = true;
  std::optional<CiMethod> method_override;
  unsigned threads = 0;  // 0: default_thread_count()

  /// Throws Error(kConfig) unless n_boot >= 100 and alpha in (0, 0.5].
  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Standard normal quantile.
double normal_quantile(double p);

/// Wilson score interval for k successes in n trials.
/// Throws Error(kDomain) unless 0 <= k <= n and n >= 1.
Interval wilson_ci(std::size_t k, std::size_t n, double alpha);

/// Structural-component (DeLong) variance of the AUROC computed from
/// midranks in O(n log n). Throws Error(kOneClassOnly).
struct DelongEstimate {
  double auc = 0.0;
  double variance = 0.0;
};
DelongEstimate delong_variance(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct DelongCi {
  double lo = 0.0;
  double hi = 0.0;
  double variance = 0.0;
  double auc = 0.0;
};

/// Wald interval auc +- z sqrt(var), clipped to [0, 1].
DelongCi delong_auroc_ci(std::span<const double> scores, std::span<const std::uint8_t> labels, double alpha);

/// Score-type interval solving |auc - theta| = z sqrt(V(theta)) with
/// V(theta) = theta (1 - theta) [1 + (n+ - 1)(1 - theta)/(2 - theta)
///            + (n- - 1) theta/(1 + theta)] / (n+ n-), by bisection.
Interval newcombe_auroc_ci(double auc, std::size_t n_pos, std::size_t n_neg, double alpha);
Interval newcombe_auroc_ci(std::span<const double> scores, std::span<const std::uint8_t> labels, double alpha);

/// Variance function used by newcombe_auroc_ci.
double newcombe_variance(double theta, std::size_t n_pos, std::size_t n_neg);

struct AurocCi {
  double lo = 0.0;
  double hi = 0.0;
  std::string method;  // "newcombe" or "delong"
};

/// Newcombe for n <= 50 or auc in {0, 1}; fast DeLong otherwise.
/// Throws Error(kOneClassOnly).
AurocCi auroc_ci_dispatch(std::span<const double> scores, std::span<const std::uint8_t> labels, double alpha);

/// Linear-interpolation (type 7) quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

using Evaluator = std::function<MetricValue(const SampleView&)>;

struct BootstrapResult {
  std::optional<Interval> interval;
  std::size_t n_defined = 0;
  std::size_t n_dropped = 0;
  bool stratified = false;
  std::string missing_reason;
  /// Defined replicate values, ordered by resample index.
  std::vector<double> replicates;
};

/// Percentile bootstrap. Resample b draws from substream (cfg.seed, b), so
/// results do not depend on the thread count. When `class_dependent` and
/// cfg.stratify, positives and negatives are resampled separately with fixed
/// counts. Resamples on which the metric is undefined are dropped; more than
/// 10% dropped leaves the interval absent.
/// Throws Error(kMetricUndefined) if the metric is undefined on `sample`.
BootstrapResult bootstrap_ci(const Evaluator& metric, const Sample& sample, const CiConfig& cfg,
                             bool class_dependent);

/// Draws bootstrap resamples of a sample, optionally stratified by label
/// (class counts held fixed).
class Resampler {
 public:
  Resampler(const SampleView& sample, bool stratify);

  /// Overwrites `out` with one resample of the same size.
  void draw(Xoshiro256pp& rng, Sample& out) const;

 private:
  SampleView sample_;
  bool stratify_;
  std::vector<std::size_t> positives_;
  std::vector<std::size_t> negatives_;
};

/// Pointwise percentile band of a curve on `grid`, widened where needed so
/// that it contains the point estimate. Stratified by label.
Band curve_band(CurveKind kind, const Sample& sample, std::span<const double> grid, const CiConfig& cfg);

/// Value and confidence interval of a metric, routed to Wilson (simple ratio
/// metrics), the AUROC dispatch, or the percentile bootstrap.
MetricResult evaluate_with_ci(const MetricId& metric, const Sample& sample, const MetricContext& ctx,
                              const CiConfig& cfg);

}  // namespace strata
