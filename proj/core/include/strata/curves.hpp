#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/metrics.hpp"
#include "strata/subgroup_spec.hpp"

namespace strata {

/// One vertex of a curve; `threshold` is the score cut producing it
/// (prediction positive iff score >= threshold). The ROC origin uses +inf.
struct CurvePoint {
  double x = 0.0;
  std::optional<double> y;
  double threshold = 0.0;
};

using Polyline = std::vector<CurvePoint>;

enum class CurveKind { kRoc, kPr, kPrg, kCalibration };

std::string to_string(CurveKind kind);

/// (FPR, TPR) at every distinct score, starting at (0, 0).
/// Throws Error(kOneClassOnly).
Polyline roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// (recall, precision) at every distinct score with at least one positive
/// prediction. Throws Error(kOneClassOnly).
Polyline pr_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Trapezoid area under a polyline with defined y values.
double trapezoid_area(const Polyline& curve);

struct PrGain {
  double precision_gain = 0.0;
  double recall_gain = 0.0;
};

/// Precision and recall gains relative to base rate br.
/// Throws Error(kDomain) for br outside (0,1) or a non-positive prec or rec.
PrGain pr_gain(double precision, double recall, double base_rate);

/// Precision-recall-gain curve of a sample.
struct PrgCurve {
  /// (recG, precG) at every threshold with at least one true positive,
  /// sorted by recG.
  Polyline points;
  double base_rate = 0.0;
  /// Smallest recall among thresholds where precision is defined.
  double min_defined_recall = 0.0;
  /// The top-scored rows are all negative, giving a defined point at
  /// recall 0, precision 0 from which recG = 0 can be interpolated.
  bool has_zero_anchor = false;
  /// Point at recG = 0 if it is attained exactly or bracketed by two defined
  /// points.
  std::optional<CurvePoint> zero_gain_point;

  /// Smallest recall gain reachable by thresholds or interpolation between
  /// defined points; -inf when the zero anchor exists.
  double min_attainable_recall_gain() const;
};

/// Throws Error(kOneClassOnly) or Error(kDegenerateBaseRate).
PrgCurve prg_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Max-precG-per-recG envelope of a PRG curve (the function integrated by
/// pauprg), sorted by recG.
Polyline prg_upper_envelope(const PrgCurve& curve);

struct PartialAuprg {
  MetricValue value;
  double requested_min = 0.0;
  /// Lower integration limit actually used.
  double integrated_from = 0.0;
  /// True when recG_min > 0 was below the smallest attainable recall gain and
  /// the integral over the attainable range was rescaled to the requested
  /// width.
  bool truncated = false;
};

/// Area under the PRG upper envelope over [recg_min, 1]. With recg_min = 0
/// this is the full AUPRG, undefined when recG = 0 cannot be reached.
/// Throws Error(kOneClassOnly).
PartialAuprg pauprg(std::span<const double> scores, std::span<const std::uint8_t> labels, double recg_min);

/// (mean score, mean label) per equal-count bin.
/// Throws Error(kTooFewSamples) like drmsce.
Polyline calibration_curve(std::span<const double> scores, std::span<const std::uint8_t> labels,
                           std::size_t n_bins);

/// Curve point selected by `threshold`: the point with the smallest
/// threshold >= `threshold` (the same set of positive predictions), or the
/// point with the largest threshold if none qualifies.
CurvePoint operating_point(const Polyline& curve, double threshold);

/// Bootstrap band sampled on a fixed x grid.
struct Band {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Curve value on an x grid, as used for bands: ROC takes the highest TPR at
/// each FPR, PR the interpolated precision (max precision at recall >= x),
/// PRG the linear envelope, undefined (NaN) outside the attainable range.
std::vector<double> curve_on_grid(CurveKind kind, const SampleView& sample, std::span<const double> grid);

struct GroupCurve {
  Polyline points;
  std::optional<Band> band;
  std::optional<CurvePoint> operating_point;
};

/// Per-group curves of one kind.
struct CurveSet {
  CurveKind kind = CurveKind::kRoc;
  std::string attribute;
  std::map<SubgroupSpec, GroupCurve> groups;
  /// Groups for which no curve could be built, with the reason.
  std::map<SubgroupSpec, std::string> omitted;
};

/// Curve of the requested kind on a sample (calibration uses ctx.n_bins or
/// the default bin count).
Polyline build_curve(CurveKind kind, const SampleView& sample, std::size_t n_bins);

}  // namespace strata
