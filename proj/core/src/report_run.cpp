#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "strata/error.hpp"
#include "strata/random.hpp"
#include "strata/report.hpp"

namespace strata {

namespace {

using nlohmann::json;

constexpr std::uint64_t kCellKey = 1;
constexpr std::uint64_t kTestKey = 2;
constexpr std::uint64_t kBandKey = 3;

std::vector<std::string> metric_names(const std::vector<MetricId>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.name());
  return out;
}

std::vector<double> grid(double from, double to, std::size_t steps) {
  std::vector<double> out;
  for (std::size_t i = 0; i <= steps; ++i) {
    out.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(steps));
  }
  return out;
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kConfig, fmt::format("config field '{}': {}", key, e.what()));
  }
}

// Error text without the "Kind: " prefix, for re-raising with context.
std::string bare_message(const Error& e) {
  const std::string_view what = e.what();
  return std::string(what.substr(std::min(what.size(), to_string(e.kind()).size() + 2)));
}

}  // namespace

std::string_view version() noexcept { return STRATA_VERSION; }

void RunConfig::validate() const {
  if (metrics.empty()) fail(ErrorKind::kConfig, "at least one metric is required");
  std::set<std::string> names;
  for (const auto& m : metrics) {
    if (!names.insert(m.name()).second) fail(ErrorKind::kConfig, fmt::format("metric '{}' listed twice", m.name()));
  }
  std::set<std::string> tested;
  for (const auto& m : tested_metrics) {
    if (!names.contains(m.name())) {
      fail(ErrorKind::kConfig, fmt::format("tested metric '{}' is not among the evaluated metrics", m.name()));
    }
    if (!tested.insert(m.name()).second) fail(ErrorKind::kConfig, fmt::format("tested metric '{}' listed twice", m.name()));
  }
  if (threshold.kind == ThresholdRule::Kind::kFixed && !(threshold.value >= 0.0 && threshold.value <= 1.0)) {
    fail(ErrorKind::kConfig, fmt::format("fixed threshold {} outside [0,1]", threshold.value));
  }
  ci.validate();
  enumeration.validate();
  if (n_perm < 1) fail(ErrorKind::kConfig, "n_perm must be >= 1");
  if (!(recg_min >= 0.0 && recg_min < 1.0)) fail(ErrorKind::kConfig, fmt::format("recg_min {} outside [0,1)", recg_min));
  if (curve_boot < 100) fail(ErrorKind::kConfig, "curve_boot must be >= 100");
  if (inner_boot < 2) fail(ErrorKind::kConfig, "inner_boot must be >= 2");
  if (top_k < 1) fail(ErrorKind::kConfig, "top_k must be >= 1");
}

std::string run_config_to_json(const RunConfig& cfg, bool include_runtime) {
  json j;
  j["input"] = cfg.data.input.string();
  j["score_col"] = cfg.data.score_col;
  j["label_col"] = cfg.data.label_col;
  j["attrs"] = cfg.data.attrs;
  j["value_cols"] = cfg.data.value_cols;
  j["metrics"] = metric_names(cfg.metrics);
  j["tested_metrics"] = metric_names(cfg.tested_metrics);
  j["threshold"] = cfg.threshold.to_string();
  j["alpha"] = cfg.ci.alpha;
  j["n_boot"] = cfg.ci.n_boot;
  j["stratify"] = cfg.ci.stratify;
  j["ci_method"] = !cfg.ci.method_override ? "auto"
                   : *cfg.ci.method_override == CiMethod::kAnalytic ? "analytic"
                                                                    : "bootstrap";
  j["min_group_size"] = cfg.enumeration.min_group_size;
  j["max_level"] = cfg.enumeration.max_level;
  j["n_perm"] = cfg.n_perm;
  j["recg_min"] = cfg.recg_min;
  j["bins"] = cfg.n_bins;
  j["seed"] = cfg.seed;
  j["top_k"] = cfg.top_k;
  j["inner_boot"] = cfg.inner_boot;
  j["curve_boot"] = cfg.curve_boot;
  if (include_runtime) {
    j["out_dir"] = cfg.output_dir.string();
    j["threads"] = cfg.threads;
  }
  return j.dump(2);
}

RunConfig run_config_from_json(std::string_view text, RunConfig cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) fail(ErrorKind::kConfig, "config must be a JSON object");

  static const std::set<std::string> kKnown = {
      "input",  "score_col", "label_col",      "attrs",     "value_cols", "metrics",    "tested_metrics",
      "threshold", "alpha",  "n_boot",         "stratify",  "ci_method",  "min_group_size", "max_level",
      "n_perm", "recg_min",  "bins",           "seed",      "top_k",      "inner_boot", "curve_boot",
      "out_dir", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) fail(ErrorKind::kConfig, fmt::format("unknown config field '{}'", key));
  }

  auto parse_metrics = [&](const char* key) {
    std::vector<MetricId> out;
    for (const auto& name : get_field<std::vector<std::string>>(j, key)) out.push_back(MetricId::parse(name));
    return out;
  };

  if (j.contains("input")) cfg.data.input = get_field<std::string>(j, "input");
  if (j.contains("score_col")) cfg.data.score_col = get_field<std::string>(j, "score_col");
  if (j.contains("label_col")) cfg.data.label_col = get_field<std::string>(j, "label_col");
  if (j.contains("attrs")) cfg.data.attrs = get_field<std::vector<std::string>>(j, "attrs");
  if (j.contains("value_cols")) cfg.data.value_cols = get_field<std::vector<std::string>>(j, "value_cols");
  if (j.contains("metrics")) cfg.metrics = parse_metrics("metrics");
  if (j.contains("tested_metrics")) {
    cfg.tested_metrics = parse_metrics("tested_metrics");
  } else if (j.contains("metrics")) {
    std::erase_if(cfg.tested_metrics, [&](const MetricId& m) {
      return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) == cfg.metrics.end();
    });
  }
  if (j.contains("threshold")) cfg.threshold = ThresholdRule::parse(get_field<std::string>(j, "threshold"));
  if (j.contains("alpha")) cfg.ci.alpha = get_field<double>(j, "alpha");
  if (j.contains("n_boot")) cfg.ci.n_boot = get_field<std::size_t>(j, "n_boot");
  if (j.contains("stratify")) cfg.ci.stratify = get_field<bool>(j, "stratify");
  if (j.contains("ci_method")) {
    const auto m = get_field<std::string>(j, "ci_method");
    if (m == "auto") cfg.ci.method_override.reset();
    else if (m == "analytic") cfg.ci.method_override = CiMethod::kAnalytic;
    else if (m == "bootstrap") cfg.ci.method_override = CiMethod::kBootstrap;
    else fail(ErrorKind::kConfig, fmt::format("unknown ci_method '{}'", m));
  }
  if (j.contains("min_group_size")) cfg.enumeration.min_group_size = get_field<std::size_t>(j, "min_group_size");
  if (j.contains("max_level")) cfg.enumeration.max_level = get_field<std::size_t>(j, "max_level");
  if (j.contains("n_perm")) cfg.n_perm = get_field<std::size_t>(j, "n_perm");
  if (j.contains("recg_min")) cfg.recg_min = get_field<double>(j, "recg_min");
  if (j.contains("bins")) cfg.n_bins = get_field<std::size_t>(j, "bins");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("top_k")) cfg.top_k = get_field<std::size_t>(j, "top_k");
  if (j.contains("inner_boot")) cfg.inner_boot = get_field<std::size_t>(j, "inner_boot");
  if (j.contains("curve_boot")) cfg.curve_boot = get_field<std::size_t>(j, "curve_boot");
  if (j.contains("out_dir")) cfg.output_dir = get_field<std::string>(j, "out_dir");
  if (j.contains("threads")) cfg.threads = get_field<unsigned>(j, "threads");
  return cfg;
}

ReportBundle run_evaluation(const RunConfig& cfg) {
  cfg.validate();
  const auto table =
      ingest_csv(cfg.data.input, cfg.data.score_col, cfg.data.label_col, cfg.data.attrs, cfg.data.value_cols);
  return evaluate_table(table, cfg, cfg.data.input.string());
}

ReportBundle evaluate_table(const EvalTable& table, const RunConfig& cfg, std::string input_label) {
  cfg.validate();
  if (table.row_count() == 0) fail(ErrorKind::kEmptyInput, "input table has no rows");
  for (const auto& m : cfg.metrics) {
    if (m.kind == MetricKind::kMean && table.value_column_index(m.column) < 0) {
      fail(ErrorKind::kConfig, fmt::format("metric '{}' needs value column '{}'", m.name(), m.column));
    }
  }

  ReportBundle bundle;
  bundle.config = cfg;
  const auto all = table.all_rows();
  const double threshold = resolve_threshold(cfg.threshold, table, all);
  const MetricContext ctx{threshold, cfg.n_bins, cfg.recg_min};

  bundle.provenance.version = std::string(version());
  bundle.provenance.seed = cfg.seed;
  bundle.provenance.input = std::move(input_label);
  bundle.provenance.rows = table.row_count();
  bundle.provenance.threshold_rule = cfg.threshold.to_string();
  bundle.provenance.threshold = threshold;
  bundle.provenance.base_rate = base_rate(table, all);

  auto ci_for = [&](const std::string& group, const MetricId& metric) {
    CiConfig ci = cfg.ci;
    ci.threads = cfg.threads;
    ci.seed = derive_seed(cfg.seed, {stable_hash(group), stable_hash(metric.name()), kCellKey});
    return ci;
  };
  auto evaluate_cell = [&](const std::string& group, const RowSet& rows, const MetricId& metric) {
    try {
      return evaluate_with_ci(metric, Sample::for_metric(table, rows, metric), ctx, ci_for(group, metric));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("subgroup '{}', metric '{}': {}", group, metric.name(), bare_message(e)));
    }
  };

  for (const auto& m : cfg.metrics) bundle.overall.push_back(evaluate_cell("all", all, m));

  EnumerationConfig enumeration = cfg.enumeration;
  if (enumeration.attributes.empty()) enumeration.attributes = cfg.data.attrs;
  const auto specs = enumerate_subgroups(table, enumeration);

  std::vector<RowSet> members;
  std::vector<RowSet> complements;
  for (const auto& spec : specs) {
    members.push_back(member_rows(table, spec));
    complements.push_back(complement_rows(table, spec));
    GroupInfo info;
    info.spec = spec;
    info.n = members.back().size();
    info.n_pos = 0;
    for (auto r : members.back()) info.n_pos += table.labels()[r];
    info.n_neg = info.n - info.n_pos;
    info.complement_n = complements.back().size();
    bundle.groups.push_back(std::move(info));
  }

  for (std::size_t g = 0; g < specs.size(); ++g) {
    std::vector<MetricResult> row;
    for (const auto& m : cfg.metrics) row.push_back(evaluate_cell(specs[g].id(), members[g], m));
    bundle.grid.push_back(std::move(row));
  }

  for (std::size_t g = 0; g < specs.size(); ++g) {
    const auto id = specs[g].id();
    for (const auto& m : cfg.tested_metrics) {
      PermutationConfig pc;
      pc.n_perm = cfg.n_perm;
      pc.seed = derive_seed(cfg.seed, {stable_hash(id), stable_hash(m.name()), kTestKey});
      pc.min_group_size = cfg.enumeration.min_group_size;
      pc.inner_boot = cfg.inner_boot;
      pc.threads = cfg.threads;
      TestResult t;
      try {
        t = studentized_permutation_test(m, Sample::for_metric(table, members[g], m),
                                         Sample::for_metric(table, complements[g], m), ctx, pc);
      } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("subgroup '{}', test of '{}': {}", id, m.name(), bare_message(e)));
      }
      t.group = specs[g];
      bundle.tests.push_back(std::move(t));
    }
  }
  apply_holm(bundle.tests);

  for (const auto& m : cfg.tested_metrics) {
    std::vector<TestResult> subset;
    for (const auto& t : bundle.tests) {
      if (t.metric_id == m.name()) subset.push_back(t);
    }
    bundle.ranking[m.name()] = rank_interestingness(subset);
  }

  // Curves for the single-attribute groups of every attribute in scope.
  std::vector<std::string> attrs = enumeration.attributes;
  if (attrs.empty()) {
    for (const auto& a : table.attributes()) attrs.push_back(a.name);
  }
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());

  const std::pair<CurveKind, std::vector<double>> kinds[] = {
      {CurveKind::kRoc, grid(0.0, 1.0, 50)},
      {CurveKind::kPr, grid(0.02, 1.0, 49)},
      {CurveKind::kPrg, grid(0.0, 1.0, 50)},
      {CurveKind::kCalibration, {}},
  };
  for (const auto& attr : attrs) {
    AttributeCurves ac;
    ac.attribute = attr;
    for (const auto& [kind, x] : kinds) {
      CurveSet set;
      set.kind = kind;
      set.attribute = attr;
      for (std::size_t g = 0; g < specs.size(); ++g) {
        if (specs[g].level() != 1 || specs[g].constraints().front().first != attr) continue;
        const auto sample = Sample::gather(table, members[g]);
        GroupCurve gc;
        try {
          gc.points = build_curve(kind, sample.view(), cfg.n_bins);
        } catch (const Error& e) {
          set.omitted[specs[g]] = bare_message(e);
          continue;
        }
        if (gc.points.empty()) {
          set.omitted[specs[g]] = "no defined points";
          continue;
        }
        if (kind != CurveKind::kCalibration) {
          gc.operating_point = operating_point(gc.points, threshold);
          CiConfig band_cfg = cfg.ci;
          band_cfg.n_boot = cfg.curve_boot;
          band_cfg.threads = cfg.threads;
          band_cfg.seed = derive_seed(cfg.seed, {stable_hash(specs[g].id()), stable_hash(to_string(kind)), kBandKey});
          auto band = curve_band(kind, sample, x, band_cfg);
          if (!band.x.empty()) gc.band = std::move(band);
        }
        set.groups.emplace(specs[g], std::move(gc));
      }
      ac.sets.push_back(std::move(set));
    }
    bundle.curves.push_back(std::move(ac));
  }
  return bundle;
}

}  // namespace strata
