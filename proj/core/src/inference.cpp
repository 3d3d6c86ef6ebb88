#include "strata/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "strata/error.hpp"
#include "strata/parallel.hpp"
#include "strata/random.hpp"
#include "strata/uncertainty.hpp"

namespace strata {

namespace {

constexpr std::uint64_t kObservedKey = 0x6f62736572766564ULL;  // "observed"

std::optional<double> ratio_variance(RatioParts p) {
  if (p.trials == 0) return std::nullopt;
  const double n = static_cast<double>(p.trials);
  const double q = static_cast<double>(p.successes) / n;
  return q * (1.0 - q) / n;
}

/// Variance of the mean of x, (1/n) * population variance.
double mean_variance(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / n / n;
}

std::optional<double> inner_bootstrap_variance(const MetricId& metric, const SampleView& sample,
                                               const MetricContext& ctx, std::uint64_t stream_seed,
                                               std::size_t inner_boot) {
  const Resampler resampler(sample, class_dependent(metric));
  Sample buffer;
  std::vector<double> values;
  values.reserve(inner_boot);
  for (std::size_t b = 0; b < inner_boot; ++b) {
    auto rng = substream(stream_seed, {b});
    resampler.draw(rng, buffer);
    const auto v = evaluate(metric, buffer.view(), ctx);
    if (v.defined()) values.push_back(*v);
  }
  if (values.size() < 2) return std::nullopt;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

}  // namespace

std::optional<double> try_metric_variance(const MetricId& metric, const SampleView& s, const MetricContext& ctx,
                                          std::uint64_t stream_seed, std::size_t inner_boot) {
  const std::size_t n = s.size();
  if (n == 0) return std::nullopt;
  switch (metric.kind) {
    case MetricKind::kAccuracy:
    case MetricKind::kSensitivity:
    case MetricKind::kSpecificity:
    case MetricKind::kPrecision: {
      const auto c = confusion(s.scores, s.labels, ctx.threshold);
      const RatioKind kind = metric.kind == MetricKind::kAccuracy      ? RatioKind::kAccuracy
                             : metric.kind == MetricKind::kSensitivity ? RatioKind::kSensitivity
                             : metric.kind == MetricKind::kSpecificity ? RatioKind::kSpecificity
                                                                       : RatioKind::kPrecision;
      return ratio_variance(ratio_parts(kind, c));
    }
    case MetricKind::kBalancedAccuracy: {
      const auto c = confusion(s.scores, s.labels, ctx.threshold);
      const auto vs = ratio_variance(ratio_parts(RatioKind::kSensitivity, c));
      const auto vp = ratio_variance(ratio_parts(RatioKind::kSpecificity, c));
      if (!vs || !vp) return std::nullopt;
      return (*vs + *vp) / 4.0;
    }
    case MetricKind::kAuroc: {
      const std::size_t p = s.positives();
      if (p == 0 || p == n) return std::nullopt;
      return delong_variance(s.scores, s.labels).variance;
    }
    case MetricKind::kBrier: {
      std::vector<double> err(n);
      for (std::size_t i = 0; i < n; ++i) err[i] = std::pow(s.scores[i] - s.labels[i], 2);
      return mean_variance(err);
    }
    case MetricKind::kBalancedBrier: {
      std::vector<double> err[2];
      for (std::size_t i = 0; i < n; ++i) err[s.labels[i]].push_back(std::pow(s.scores[i] - s.labels[i], 2));
      if (err[0].empty() || err[1].empty()) return std::nullopt;
      return (mean_variance(err[0]) + mean_variance(err[1])) / 4.0;
    }
    case MetricKind::kMean:
      if (s.values.empty()) return std::nullopt;
      return mean_variance(s.values);
    case MetricKind::kPauprg:
    case MetricKind::kDrmsce:
      if (!evaluate(metric, s, ctx).defined()) return std::nullopt;
      return inner_bootstrap_variance(metric, s, ctx, stream_seed, inner_boot);
  }
  return std::nullopt;
}

double metric_variance(const MetricId& metric, const SampleView& sample, const MetricContext& ctx,
                       std::uint64_t stream_seed, std::size_t inner_boot) {
  const auto v = try_metric_variance(metric, sample, ctx, stream_seed, inner_boot);
  if (!v) fail(ErrorKind::kMetricUndefined, fmt::format("variance of '{}' undefined on this sample", metric.name()));
  return *v;
}

std::optional<Studentized> studentized_statistic(const MetricId& metric, const SampleView& a, const SampleView& b,
                                                 const MetricContext& ctx, std::uint64_t variance_seed,
                                                 std::size_t inner_boot) {
  const auto ma = evaluate(metric, a, ctx);
  const auto mb = evaluate(metric, b, ctx);
  if (!ma.defined() || !mb.defined()) return std::nullopt;
  const auto va = try_metric_variance(metric, a, ctx, derive_seed(variance_seed, {0}), inner_boot);
  const auto vb = try_metric_variance(metric, b, ctx, derive_seed(variance_seed, {1}), inner_boot);
  if (!va || !vb) return std::nullopt;
  return Studentized{*ma, *mb, (*ma - *mb) / std::sqrt(*va + *vb + kVarianceFloor)};
}

TestResult studentized_permutation_test(const MetricId& metric, const Sample& a, const Sample& b,
                                        const MetricContext& ctx, const PermutationConfig& cfg) {
  TestResult out;
  out.metric_id = metric.name();
  out.group_n = a.size();
  out.complement_n = b.size();

  auto skip = [&](std::string reason) {
    out.status = TestStatus::kSkipped;
    out.skip_reason = std::move(reason);
    return out;
  };
  if (cfg.n_perm == 0) fail(ErrorKind::kConfig, "n_perm must be positive");
  if (b.size() == 0) return skip("empty complement");
  if (a.size() == 0) return skip("empty group");
  const std::size_t min_size = std::max<std::size_t>(1, cfg.min_group_size);
  if (a.size() < min_size || b.size() < min_size) {
    return skip(fmt::format("group smaller than minimum size {}", min_size));
  }
  if (a.values.empty() != b.values.empty()) fail(ErrorKind::kValue, "value columns of the two groups differ");

  const auto observed =
      studentized_statistic(metric, a.view(), b.view(), ctx, derive_seed(cfg.seed, {kObservedKey}), cfg.inner_boot);
  if (!observed) return skip("metric undefined on original groups");
  out.group_value = observed->value_a;
  out.complement_value = observed->value_b;
  out.disparity = observed->value_a - observed->value_b;
  out.t_obs = observed->t;

  // Pool the rows: [0, |a|) from a, then b.
  Sample pooled = a;
  pooled.scores.insert(pooled.scores.end(), b.scores.begin(), b.scores.end());
  pooled.labels.insert(pooled.labels.end(), b.labels.begin(), b.labels.end());
  pooled.values.insert(pooled.values.end(), b.values.begin(), b.values.end());
  const std::size_t total = pooled.size();
  const std::size_t na = a.size();
  const bool has_values = !pooled.values.empty();

  const std::size_t budget = 10 * cfg.n_perm;
  std::vector<double> abs_t(cfg.n_perm, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> attempts(cfg.n_perm, 0);

  auto run_permutation = [&](std::size_t i) {
    std::vector<std::size_t> index(total);
    Sample pa;
    Sample pb;
    for (std::size_t attempt = 0; attempt < budget; ++attempt) {
      attempts[i] = attempt + 1;
      auto rng = substream(cfg.seed, {i, attempt});
      std::iota(index.begin(), index.end(), std::size_t{0});
      for (std::size_t k = 0; k < na; ++k) std::swap(index[k], index[k + uniform_index(rng, total - k)]);

      auto fill = [&](Sample& dst, std::size_t from, std::size_t to) {
        dst.scores.resize(to - from);
        dst.labels.resize(to - from);
        dst.values.resize(has_values ? to - from : 0);
        for (std::size_t k = from; k < to; ++k) {
          dst.scores[k - from] = pooled.scores[index[k]];
          dst.labels[k - from] = pooled.labels[index[k]];
          if (has_values) dst.values[k - from] = pooled.values[index[k]];
        }
      };
      fill(pa, 0, na);
      fill(pb, na, total);

      const auto stat =
          studentized_statistic(metric, pa.view(), pb.view(), ctx, derive_seed(cfg.seed, {i, attempt, 7}), cfg.inner_boot);
      if (stat) {
        abs_t[i] = std::abs(stat->t);
        return;
      }
    }
  };

  // Batches in index order; stop once the attempt budget is exceeded. The
  // outcome depends only on per-permutation results, never on scheduling.
  const unsigned threads = cfg.threads == 0 ? default_thread_count() : cfg.threads;
  const std::size_t batch = std::max<std::size_t>(64, 8 * static_cast<std::size_t>(threads));
  std::size_t used = 0;
  for (std::size_t start = 0; start < cfg.n_perm; start += batch) {
    const std::size_t end = std::min(cfg.n_perm, start + batch);
    parallel_for(end - start, [&](std::size_t k) { run_permutation(start + k); }, threads);
    for (std::size_t i = start; i < end; ++i) used += attempts[i];
    if (used > budget) break;
  }
  out.attempts = used;
  if (used > budget || std::any_of(abs_t.begin(), abs_t.end(), [](double t) { return std::isnan(t); })) {
    return skip(fmt::format("metric undefined on too many permutations ({} draws for {} permutations)", used,
                            cfg.n_perm));
  }

  const double obs = std::abs(out.t_obs);
  const double tol = 1e-12 * std::max(1.0, obs);
  std::size_t exceed = 0;
  for (double t : abs_t) exceed += t >= obs - tol ? 1 : 0;
  out.n_perm_used = cfg.n_perm;
  out.p_raw = static_cast<double>(1 + exceed) / static_cast<double>(cfg.n_perm + 1);
  out.p_adj = out.p_raw;
  out.status = TestStatus::kCompleted;
  return out;
}

std::vector<double> holm_bonferroni(std::span<const double> p) {
  const std::size_t m = p.size();
  for (double v : p) {
    if (!(v > 0.0 && v <= 1.0)) fail(ErrorKind::kDomain, fmt::format("p-value {} outside (0, 1]", v));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });

  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    running = std::max(running, std::min(1.0, static_cast<double>(m - j) * p[order[j]]));
    adjusted[order[j]] = running;
  }
  return adjusted;
}

void apply_holm(std::vector<TestResult>& tests) {
  std::vector<double> p;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (tests[i].completed()) {
      p.push_back(tests[i].p_raw);
      where.push_back(i);
    }
  }
  const auto adjusted = holm_bonferroni(p);
  for (std::size_t k = 0; k < where.size(); ++k) tests[where[k]].p_adj = adjusted[k];
}

Stars significance_stars(double p_adj) noexcept {
  if (p_adj <= 0.001) return Stars::kTwo;
  if (p_adj <= 0.01) return Stars::kOne;
  return Stars::kNotSignificant;
}

std::string_view to_string(Stars stars) noexcept {
  switch (stars) {
    case Stars::kNotSignificant: return "ns";
    case Stars::kOne: return "*";
    case Stars::kTwo: return "**";
  }
  return "ns";
}

}  // namespace strata
