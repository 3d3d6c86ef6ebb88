#include "strata/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "strata/error.hpp"

namespace strata {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cumulative counts after lowering the threshold to each distinct score,
/// from the highest score down.
struct CountPoint {
  std::size_t tp = 0;
  std::size_t fp = 0;
  double threshold = 0.0;
};

struct Sweep {
  std::vector<CountPoint> points;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

Sweep sweep(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  Sweep out;
  const std::size_t n = scores.size();
  for (auto y : labels) out.positives += y;
  out.negatives = n - out.positives;
  if (out.positives == 0 || out.negatives == 0) fail(ErrorKind::kOneClassOnly, "curve needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      labels[order[i]] ? ++tp : ++fp;
      ++i;
    }
    out.points.push_back({tp, fp, s});
  }
  return out;
}

/// Envelope in count space: for each distinct TP the smallest FP (largest
/// precision). Includes the TP = 0 anchor when the top-scored rows are all
/// negative.
struct Envelope {
  std::vector<CountPoint> points;  // ascending tp
  std::size_t positives = 0;
  std::size_t total = 0;

  double base_rate() const { return static_cast<double>(positives) / static_cast<double>(total); }
  bool has_anchor() const { return !points.empty() && points.front().tp == 0; }
};

Envelope envelope_of(const Sweep& s) {
  Envelope env;
  env.positives = s.positives;
  env.total = s.positives + s.negatives;
  for (const auto& p : s.points) {
    if (env.points.empty() || env.points.back().tp != p.tp) env.points.push_back(p);
  }
  return env;
}

PrGain gain_of(const Envelope& env, double tp, double fp) {
  return pr_gain(tp / (tp + fp), tp / static_cast<double>(env.positives), env.base_rate());
}

/// Linear interpolation between two consecutive envelope points in count
/// space, which is a straight line in PRG space. Both endpoints are points
/// where precision is defined; nothing is extrapolated.
CurvePoint interpolate_at_tp(const Envelope& env, const CountPoint& a, const CountPoint& b, double tp) {
  const double w = (tp - static_cast<double>(a.tp)) / static_cast<double>(b.tp - a.tp);
  const double fp = static_cast<double>(a.fp) + w * (static_cast<double>(b.fp) - static_cast<double>(a.fp));
  const auto g = gain_of(env, tp, fp);
  return {g.recall_gain, g.precision_gain, b.threshold};
}

/// Envelope value at recall gain `r`, or nullopt if r lies below the
/// attainable range.
std::optional<CurvePoint> value_at_recall_gain(const Envelope& env, double r) {
  const double br = env.base_rate();
  const double P = static_cast<double>(env.positives);
  const double target_tp = br / (1.0 - r * (1.0 - br)) * P;
  const double tol = 1e-12 * std::max(1.0, P);

  for (std::size_t k = 0; k < env.points.size(); ++k) {
    const auto& p = env.points[k];
    const double tp = static_cast<double>(p.tp);
    if (p.tp > 0 && std::abs(tp - target_tp) <= tol) {
      const auto g = gain_of(env, tp, static_cast<double>(p.fp));
      return CurvePoint{g.recall_gain, g.precision_gain, p.threshold};
    }
    if (tp > target_tp) {
      if (k == 0) return std::nullopt;
      return interpolate_at_tp(env, env.points[k - 1], p, target_tp);
    }
  }
  return std::nullopt;
}

Polyline envelope_polyline(const Envelope& env) {
  Polyline out;
  for (const auto& p : env.points) {
    if (p.tp == 0) continue;
    const auto g = gain_of(env, static_cast<double>(p.tp), static_cast<double>(p.fp));
    out.push_back({g.recall_gain, g.precision_gain, p.threshold});
  }
  return out;
}

double min_attainable_gain(const Envelope& env) {
  if (env.has_anchor()) return -kInf;
  const auto& p = env.points.front();
  return gain_of(env, static_cast<double>(p.tp), static_cast<double>(p.fp)).recall_gain;
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::kRoc: return "roc";
    case CurveKind::kPr: return "pr";
    case CurveKind::kPrg: return "prg";
    case CurveKind::kCalibration: return "calibration";
  }
  return "unknown";
}

Polyline roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const auto s = sweep(scores, labels);
  const double P = static_cast<double>(s.positives);
  const double N = static_cast<double>(s.negatives);
  Polyline out;
  out.reserve(s.points.size() + 1);
  out.push_back({0.0, 0.0, kInf});
  for (const auto& p : s.points) {
    out.push_back({static_cast<double>(p.fp) / N, static_cast<double>(p.tp) / P, p.threshold});
  }
  return out;
}

Polyline pr_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const auto s = sweep(scores, labels);
  const double P = static_cast<double>(s.positives);
  Polyline out;
  out.reserve(s.points.size());
  for (const auto& p : s.points) {
    const double tp = static_cast<double>(p.tp);
    out.push_back({tp / P, tp / (tp + static_cast<double>(p.fp)), p.threshold});
  }
  return out;
}

double trapezoid_area(const Polyline& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].x - curve[i - 1].x) * (curve[i].y.value() + curve[i - 1].y.value()) / 2.0;
  }
  return area;
}

PrGain pr_gain(double precision, double recall, double base_rate) {
  if (!(base_rate > 0.0 && base_rate < 1.0)) {
    fail(ErrorKind::kDomain, fmt::format("base rate {} outside (0,1)", base_rate));
  }
  if (!(precision > 0.0) || !(recall > 0.0)) fail(ErrorKind::kDomain, "precision and recall must be positive");
  return {(precision - base_rate) / ((1.0 - base_rate) * precision),
          (recall - base_rate) / ((1.0 - base_rate) * recall)};
}

double PrgCurve::min_attainable_recall_gain() const {
  if (has_zero_anchor) return -kInf;
  return points.empty() ? kInf : points.front().x;
}

PrgCurve prg_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const auto s = sweep(scores, labels);
  const auto env = envelope_of(s);
  PrgCurve out;
  out.base_rate = env.base_rate();
  if (!(out.base_rate > 0.0 && out.base_rate < 1.0)) fail(ErrorKind::kDegenerateBaseRate, "base rate must lie in (0,1)");

  for (const auto& p : s.points) {
    if (p.tp == 0) continue;
    const auto g = gain_of(env, static_cast<double>(p.tp), static_cast<double>(p.fp));
    out.points.push_back({g.recall_gain, g.precision_gain, p.threshold});
  }
  out.has_zero_anchor = env.has_anchor();
  out.min_defined_recall =
      static_cast<double>(env.points.front().tp) / static_cast<double>(env.positives);

  // recG = 0 <=> TP * n == P^2, checked exactly on integer counts.
  const std::size_t P = env.positives;
  const std::size_t n = env.total;
  for (std::size_t k = 0; k < env.points.size(); ++k) {
    const auto& p = env.points[k];
    if (p.tp > 0 && p.tp * n == P * P) {
      const auto g = gain_of(env, static_cast<double>(p.tp), static_cast<double>(p.fp));
      out.zero_gain_point = CurvePoint{0.0, g.precision_gain, p.threshold};
      break;
    }
    if (p.tp * n > P * P) {
      if (k > 0) {
        auto pt = interpolate_at_tp(env, env.points[k - 1], p, static_cast<double>(P * P) / static_cast<double>(n));
        pt.x = 0.0;
        out.zero_gain_point = pt;
      }
      break;
    }
  }
  return out;
}

Polyline prg_upper_envelope(const PrgCurve& curve) {
  Polyline out;
  for (const auto& p : curve.points) {
    if (!out.empty() && out.back().x == p.x) {
      if (p.y.value() > out.back().y.value()) out.back() = p;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

PartialAuprg pauprg(std::span<const double> scores, std::span<const std::uint8_t> labels, double recg_min) {
  if (!(recg_min >= 0.0 && recg_min < 1.0)) fail(ErrorKind::kDomain, "recG_min must lie in [0,1)");
  const auto env = envelope_of(sweep(scores, labels));

  PartialAuprg out;
  out.requested_min = recg_min;
  const double g0 = min_attainable_gain(env);

  double lower = recg_min;
  if (g0 > recg_min) {
    if (recg_min <= 0.0) {
      out.value = MetricValue::undefined("recG_min unattainable");
      out.integrated_from = g0;
      return out;
    }
    if (g0 >= 1.0) {
      out.value = MetricValue::undefined("recG_min unattainable: no PRG segment below recG = 1");
      out.integrated_from = g0;
      return out;
    }
    lower = g0;
    out.truncated = true;
  }
  out.integrated_from = lower;

  const auto start = value_at_recall_gain(env, lower);
  if (!start) {
    out.value = MetricValue::undefined("recG_min unattainable");
    return out;
  }
  Polyline segment{*start};
  for (const auto& p : envelope_polyline(env)) {
    if (p.x > lower) segment.push_back(p);
  }
  double area = trapezoid_area(segment);
  if (out.truncated) area *= (1.0 - recg_min) / (1.0 - lower);
  out.value = MetricValue::of(area);
  return out;
}

Polyline calibration_curve(std::span<const double> scores, std::span<const std::uint8_t> labels,
                           std::size_t n_bins) {
  const auto bins = equal_count_bins(scores, labels, n_bins);
  Polyline out;
  for (std::size_t b = 0; b < n_bins; ++b) {
    double score_sum = 0.0;
    double label_sum = 0.0;
    double top = 0.0;
    for (std::size_t k = bins.bounds[b]; k < bins.bounds[b + 1]; ++k) {
      score_sum += scores[bins.order[k]];
      label_sum += labels[bins.order[k]];
      top = std::max(top, scores[bins.order[k]]);
    }
    const double nb = static_cast<double>(bins.bounds[b + 1] - bins.bounds[b]);
    out.push_back({score_sum / nb, label_sum / nb, top});
  }
  return out;
}

CurvePoint operating_point(const Polyline& curve, double threshold) {
  if (curve.empty()) fail(ErrorKind::kEmptyInput, "operating point on an empty curve");
  const CurvePoint* best = nullptr;
  const CurvePoint* highest = &curve.front();
  for (const auto& p : curve) {
    if (p.threshold >= threshold && (best == nullptr || p.threshold < best->threshold)) best = &p;
    if (p.threshold > highest->threshold) highest = &p;
  }
  return best ? *best : *highest;
}

std::vector<double> curve_on_grid(CurveKind kind, const SampleView& sample, std::span<const double> grid) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(grid.size(), kNaN);
  switch (kind) {
    case CurveKind::kRoc: {
      const auto c = roc_curve(sample.scores, sample.labels);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double x = grid[g];
        double best = -kInf;
        for (std::size_t i = 1; i < c.size(); ++i) {
          const auto& a = c[i - 1];
          const auto& b = c[i];
          if (x < a.x || x > b.x) continue;
          if (a.x == b.x) {
            best = std::max({best, *a.y, *b.y});
          } else {
            best = std::max(best, *a.y + (x - a.x) / (b.x - a.x) * (*b.y - *a.y));
          }
        }
        out[g] = best;
      }
      break;
    }
    case CurveKind::kPr: {
      const auto c = pr_curve(sample.scores, sample.labels);
      std::vector<double> suffix_max(c.size());
      double m = -kInf;
      for (std::size_t i = c.size(); i-- > 0;) {
        m = std::max(m, *c[i].y);
        suffix_max[i] = m;
      }
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto it = std::lower_bound(c.begin(), c.end(), grid[g], [](const CurvePoint& p, double x) { return p.x < x; });
        if (it != c.end()) out[g] = suffix_max[static_cast<std::size_t>(it - c.begin())];
      }
      break;
    }
    case CurveKind::kPrg: {
      const auto env = envelope_of(sweep(sample.scores, sample.labels));
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (grid[g] >= 1.0) {
          const auto poly = envelope_polyline(env);
          out[g] = *poly.back().y;
          continue;
        }
        if (const auto p = value_at_recall_gain(env, grid[g])) out[g] = *p->y;
      }
      break;
    }
    case CurveKind::kCalibration:
      break;
  }
  return out;
}

Polyline build_curve(CurveKind kind, const SampleView& sample, std::size_t n_bins) {
  switch (kind) {
    case CurveKind::kRoc: return roc_curve(sample.scores, sample.labels);
    case CurveKind::kPr: return pr_curve(sample.scores, sample.labels);
    case CurveKind::kPrg: return prg_curve(sample.scores, sample.labels).points;
    case CurveKind::kCalibration: {
      const std::size_t n = sample.size();
      if (n < 2) fail(ErrorKind::kTooFewSamples, "calibration curve needs at least 2 rows");
      const std::size_t bins = std::min(n_bins > 0 ? n_bins : default_calibration_bins(n), n / 2);
      return calibration_curve(sample.scores, sample.labels, bins);
    }
  }
  return {};
}

}  // namespace strata
