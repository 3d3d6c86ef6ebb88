#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/metrics.hpp"
#include "strata/subgroup_spec.hpp"

namespace strata {

/// Floor added to the variance sum in the studentized statistic.
inline constexpr double kVarianceFloor = 1e-12;

/// Variance of a metric estimate: analytic where a closed form exists
/// (ratio metrics, balanced accuracy, AUROC via DeLong, Brier variants,
/// means), otherwise an inner bootstrap with `inner_boot` resamples drawn
/// from substreams of `stream_seed`. Returns nullopt if the metric or its
/// variance is undefined on the sample.
std::optional<double> try_metric_variance(const MetricId& metric, const SampleView& sample, const MetricContext& ctx,
                                          std::uint64_t stream_seed, std::size_t inner_boot = 50);

/// As try_metric_variance, throwing Error(kMetricUndefined) instead.
double metric_variance(const MetricId& metric, const SampleView& sample, const MetricContext& ctx,
                       std::uint64_t stream_seed = 0, std::size_t inner_boot = 50);

enum class TestStatus { kCompleted, kSkipped };

struct TestResult {
  SubgroupSpec group;
  std::string metric_id;
  TestStatus status = TestStatus::kSkipped;
  std::string skip_reason;

  std::size_t group_n = 0;
  std::size_t complement_n = 0;
  double group_value = 0.0;
  double complement_value = 0.0;
  /// metric(group) - metric(complement).
  double disparity = 0.0;
  double t_obs = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
  std::size_t n_perm_used = 0;
  std::size_t attempts = 0;

  bool completed() const noexcept { return status == TestStatus::kCompleted; }
};

struct PermutationConfig {
  std::size_t n_perm = 1000;
  std::uint64_t seed = 0;
  std::size_t min_group_size = 1;
  std::size_t inner_boot = 50;
  unsigned threads = 0;
};

/// Studentized statistic T = (m_a - m_b) / sqrt(var_a + var_b + floor).
/// The observed statistic and every permuted one go through this function.
struct Studentized {
  double value_a = 0.0;
  double value_b = 0.0;
  double t = 0.0;
};
std::optional<Studentized> studentized_statistic(const MetricId& metric, const SampleView& a, const SampleView& b,
                                                 const MetricContext& ctx, std::uint64_t variance_seed,
                                                 std::size_t inner_boot);

/// Two-sided studentized permutation test of metric(a) == metric(b).
/// Group labels are redrawn uniformly among partitions with the original
/// sizes; permutations on which the metric is undefined are redrawn, up to
/// 10 * n_perm draws in total. p = (1 + #{|T_perm| >= |T_obs|}) / (n_perm + 1).
/// Failure modes (undefined metric, small or empty groups, too many
/// undefined permutations) yield status kSkipped with a reason.
TestResult studentized_permutation_test(const MetricId& metric, const Sample& a, const Sample& b,
                                        const MetricContext& ctx, const PermutationConfig& cfg);

/// Holm step-down adjusted p-values, in input order.
/// Throws Error(kDomain) for values outside (0, 1].
std::vector<double> holm_bonferroni(std::span<const double> p_values);

/// Applies Holm across all completed tests (one family); skipped tests keep
/// p_adj untouched.
void apply_holm(std::vector<TestResult>& tests);

enum class Stars { kNotSignificant, kOne, kTwo };

/// ns for p > 0.01, * for 0.001 < p <= 0.01, ** for p <= 0.001.
Stars significance_stars(double p_adj) noexcept;
std::string_view to_string(Stars stars) noexcept;

}  // namespace strata
