#include "strata/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "csv.hpp"
#include "strata/error.hpp"

namespace strata {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string format_score(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

Attribute Attribute::from_values(std::string name, const std::vector<std::string>& values) {
  Attribute attr;
  attr.name = std::move(name);
  std::set<std::string> distinct;
  for (const auto& v : values) distinct.insert(v.empty() ? std::string(kMissingCategory) : v);
  attr.levels.assign(distinct.begin(), distinct.end());

  std::unordered_map<std::string_view, std::uint32_t> index;
  for (std::uint32_t i = 0; i < attr.levels.size(); ++i) index.emplace(attr.levels[i], i);
  attr.codes.reserve(values.size());
  for (const auto& v : values) {
    attr.codes.push_back(index.at(v.empty() ? kMissingCategory : std::string_view(v)));
  }
  return attr;
}

EvalTable::EvalTable(std::vector<double> scores, std::vector<std::uint8_t> labels,
                     std::vector<Attribute> attributes, std::vector<ValueColumn> value_columns,
                     std::string score_name, std::string label_name)
    : scores_(std::move(scores)),
      labels_(std::move(labels)),
      attributes_(std::move(attributes)),
      value_columns_(std::move(value_columns)),
      score_name_(std::move(score_name)),
      label_name_(std::move(label_name)) {
  const std::size_t n = scores_.size();
  if (labels_.size() != n) {
    fail(ErrorKind::kValue, fmt::format("label column has {} rows, score column {}", labels_.size(), n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(scores_[i] >= 0.0 && scores_[i] <= 1.0)) {
      fail(ErrorKind::kValue, fmt::format("row {}: score outside [0,1]", i + 1));
    }
    if (labels_[i] > 1) fail(ErrorKind::kValue, fmt::format("row {}: label outside {{0,1}}", i + 1));
  }
  std::set<std::string_view> names{score_name_, label_name_};
  for (const auto& a : attributes_) {
    if (a.codes.size() != n) {
      fail(ErrorKind::kValue, fmt::format("attribute '{}' has {} rows, expected {}", a.name, a.codes.size(), n));
    }
    for (auto c : a.codes) {
      if (c >= a.levels.size()) fail(ErrorKind::kValue, fmt::format("attribute '{}' has an invalid code", a.name));
    }
    if (!names.insert(a.name).second) fail(ErrorKind::kValue, fmt::format("duplicate column name '{}'", a.name));
  }
  for (const auto& v : value_columns_) {
    if (v.values.size() != n) {
      fail(ErrorKind::kValue, fmt::format("value column '{}' has {} rows, expected {}", v.name, v.values.size(), n));
    }
    if (!names.insert(v.name).second) fail(ErrorKind::kValue, fmt::format("duplicate column name '{}'", v.name));
  }
}

EvalTable EvalTable::from_columns(std::vector<double> scores, std::vector<std::uint8_t> labels,
                                  const std::map<std::string, std::vector<std::string>>& attributes) {
  std::vector<Attribute> attrs;
  for (const auto& [name, values] : attributes) attrs.push_back(Attribute::from_values(name, values));
  return EvalTable(std::move(scores), std::move(labels), std::move(attrs));
}

const Attribute& EvalTable::attribute(std::string_view name) const {
  for (const auto& a : attributes_) {
    if (a.name == name) return a;
  }
  fail(ErrorKind::kUnknownAttribute, fmt::format("unknown attribute '{}'", name));
}

bool EvalTable::has_attribute(std::string_view name) const noexcept {
  return std::any_of(attributes_.begin(), attributes_.end(), [&](const auto& a) { return a.name == name; });
}

int EvalTable::value_column_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < value_columns_.size(); ++i) {
    if (value_columns_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

RowSet EvalTable::all_rows() const {
  RowSet rows(row_count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

bool EvalTable::operator==(const EvalTable& other) const {
  if (scores_ != other.scores_ || labels_ != other.labels_) return false;
  if (attributes_.size() != other.attributes_.size() || value_columns_.size() != other.value_columns_.size()) {
    return false;
  }
  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    const auto& x = attributes_[a];
    const auto& y = other.attributes_[a];
    if (x.name != y.name || x.levels != y.levels || x.codes != y.codes) return false;
  }
  for (std::size_t v = 0; v < value_columns_.size(); ++v) {
    if (value_columns_[v].name != other.value_columns_[v].name ||
        value_columns_[v].values != other.value_columns_[v].values) {
      return false;
    }
  }
  return score_name_ == other.score_name_ && label_name_ == other.label_name_;
}

EvalTable ingest_csv(const std::filesystem::path& path, const std::string& score_col,
                     const std::string& label_col, const std::vector<std::string>& attr_cols,
                     const std::vector<std::string>& value_cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kFileNotFound, fmt::format("cannot open '{}'", path.string()));
  return ingest_csv(in, score_col, label_col, attr_cols, value_cols);
}

EvalTable ingest_csv(std::istream& in, const std::string& score_col, const std::string& label_col,
                     const std::vector<std::string>& attr_cols, const std::vector<std::string>& value_cols) {
  const auto records = csv::read_all(in);
  if (records.empty()) fail(ErrorKind::kValue, "missing header row");
  const auto& header = records.front();

  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorKind::kColumnMissing, fmt::format("column '{}' not found in header", name));
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t score_idx = column(score_col);
  const std::size_t label_idx = column(label_col);
  std::vector<std::size_t> attr_idx;
  for (const auto& name : attr_cols) attr_idx.push_back(column(name));
  std::vector<std::size_t> value_idx;
  for (const auto& name : value_cols) value_idx.push_back(column(name));

  const std::size_t n = records.size() - 1;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  std::vector<std::vector<std::string>> attr_values(attr_cols.size());
  std::vector<ValueColumn> values(value_cols.size());
  scores.reserve(n);
  labels.reserve(n);
  for (std::size_t v = 0; v < value_cols.size(); ++v) values[v].name = value_cols[v];

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    auto cell = [&](std::size_t idx) -> std::string_view {
      return idx < rec.size() ? std::string_view(rec[idx]) : std::string_view();
    };

    double score = 0.0;
    const auto score_text = trim(cell(score_idx));
    if (score_text.empty()) fail(ErrorKind::kValue, fmt::format("row {}: missing score", r));
    if (!parse_double(score_text, score)) fail(ErrorKind::kValue, fmt::format("row {}: non-numeric score", r));
    if (!(score >= 0.0 && score <= 1.0)) fail(ErrorKind::kValue, fmt::format("row {}: score outside [0,1]", r));

    double label = 0.0;
    const auto label_text = trim(cell(label_idx));
    if (label_text.empty()) fail(ErrorKind::kValue, fmt::format("row {}: missing label", r));
    if (!parse_double(label_text, label) || (label != 0.0 && label != 1.0)) {
      fail(ErrorKind::kValue, fmt::format("row {}: label outside {{0,1}}", r));
    }

    scores.push_back(score);
    labels.push_back(static_cast<std::uint8_t>(label));
    for (std::size_t a = 0; a < attr_idx.size(); ++a) attr_values[a].emplace_back(trim(cell(attr_idx[a])));
    for (std::size_t v = 0; v < value_idx.size(); ++v) {
      double x = 0.0;
      if (!parse_double(cell(value_idx[v]), x) || !std::isfinite(x)) {
        fail(ErrorKind::kValue, fmt::format("row {}: non-numeric value in column '{}'", r, value_cols[v]));
      }
      values[v].values.push_back(x);
    }
  }

  std::vector<Attribute> attrs;
  for (std::size_t a = 0; a < attr_cols.size(); ++a) attrs.push_back(Attribute::from_values(attr_cols[a], attr_values[a]));
  return EvalTable(std::move(scores), std::move(labels), std::move(attrs), std::move(values), score_col, label_col);
}

void write_csv(const EvalTable& table, std::ostream& out) {
  csv::Record header{table.score_name(), table.label_name()};
  for (const auto& a : table.attributes()) header.push_back(a.name);
  for (const auto& v : table.value_columns()) header.push_back(v.name);
  csv::write_record(out, header);

  csv::Record row;
  for (std::size_t i = 0; i < table.row_count(); ++i) {
    row.clear();
    row.push_back(format_score(table.scores()[i]));
    row.push_back(table.labels()[i] ? "1" : "0");
    for (const auto& a : table.attributes()) row.push_back(a.value(i));
    for (const auto& v : table.value_columns()) row.push_back(format_score(v.values[i]));
    csv::write_record(out, row);
  }
}

double base_rate(const EvalTable& table, const RowSet& rows) {
  if (rows.empty()) fail(ErrorKind::kEmptySelection, "base rate of an empty selection");
  std::size_t positives = 0;
  for (auto r : rows) positives += table.labels()[r];
  return static_cast<double>(positives) / static_cast<double>(rows.size());
}

ThresholdRule ThresholdRule::fixed(double t) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::kConfig, fmt::format("fixed threshold {} outside [0,1]", t));
  return {Kind::kFixed, t};
}

ThresholdRule ThresholdRule::parse(std::string_view text) {
  if (text == "base-rate") return base_rate();
  if (text == "max-gmean") return max_gmean();
  if (text.starts_with("fixed:")) {
    double t = 0.0;
    if (!parse_double(text.substr(6), t)) {
      fail(ErrorKind::kConfig, fmt::format("malformed threshold '{}'", text));
    }
    return fixed(t);
  }
  fail(ErrorKind::kConfig, fmt::format("unknown threshold rule '{}' (expected fixed:<t>, base-rate or max-gmean)", text));
}

std::string ThresholdRule::to_string() const {
  switch (kind) {
    case Kind::kFixed: return fmt::format("fixed:{}", value);
    case Kind::kBaseRate: return "base-rate";
    case Kind::kMaxGmean: return "max-gmean";
  }
  return {};
}

double resolve_threshold(const ThresholdRule& rule, const EvalTable& table, const RowSet& rows) {
  if (rows.empty()) fail(ErrorKind::kEmptySelection, "cannot resolve a threshold on an empty selection");
  switch (rule.kind) {
    case ThresholdRule::Kind::kFixed:
      return rule.value;
    case ThresholdRule::Kind::kBaseRate:
      return base_rate(table, rows);
    case ThresholdRule::Kind::kMaxGmean: {
      std::vector<double> s;
      std::vector<std::uint8_t> y;
      s.reserve(rows.size());
      y.reserve(rows.size());
      for (auto r : rows) {
        s.push_back(table.scores()[r]);
        y.push_back(table.labels()[r]);
      }
      return max_gmean_threshold(s, y);
    }
  }
  return rule.value;
}

double max_gmean_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const std::size_t n = scores.size();
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) fail(ErrorKind::kOneClassOnly, "max-gmean threshold needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Sweep thresholds upward. Below all scores everything is predicted
  // positive; each distinct score moved past flips its rows to negative.
  auto gmean = [&](std::size_t tp, std::size_t tn) {
    const double sens = static_cast<double>(tp) / static_cast<double>(positives);
    const double spec = static_cast<double>(tn) / static_cast<double>(negatives);
    return std::sqrt(sens * spec);
  };

  std::size_t tp = positives;
  std::size_t tn = 0;
  double best_t = 0.0;
  double best = gmean(tp, tn);

  auto consider = [&](double t, double value) {
    if (value > best) {
      best = value;
      best_t = t;
    }
  };

  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    std::size_t j = i;
    while (j < n && scores[order[j]] == s) {
      if (labels[order[j]]) --tp; else ++tn;
      ++j;
    }
    // Rows [0, j) are now predicted negative.
    const double t = j < n ? 0.5 * (s + scores[order[j]]) : 1.0;
    if (j == n && s == 1.0) {
      // Threshold 1 still predicts the rows scored exactly 1 as positive;
      // the all-negative point is not a candidate.
      break;
    }
    consider(t, gmean(tp, tn));
    i = j;
  }
  if (n > 0 && scores[order[n - 1]] == 1.0) {
    // Candidate t = 1: rows with score 1 remain positive.
    std::size_t tp1 = 0;
    std::size_t tn1 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (scores[k] >= 1.0) tp1 += labels[k];
      else tn1 += 1 - labels[k];
    }
    consider(1.0, gmean(tp1, tn1));
  }
  return best_t;
}

}  // namespace strata
