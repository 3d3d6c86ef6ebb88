#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

/// Category assigned to empty attribute cells.
inline constexpr std::string_view kMissingCategory = "(missing)";

/// Dictionary-encoded categorical column. `levels` is sorted and unique;
/// `codes[row]` indexes into it.
struct Attribute {
  std::string name;
  std::vector<std::string> levels;
  std::vector<std::uint32_t> codes;

  /// Builds the dictionary from raw cell strings; empty cells become
  /// kMissingCategory.
  static Attribute from_values(std::string name, const std::vector<std::string>& values);

  const std::string& value(std::size_t row) const { return levels[codes[row]]; }
};

/// Per-row numeric column used by averaged metrics (e.g. a dice score).
struct ValueColumn {
  std::string name;
  std::vector<double> values;
};

/// Sorted row indices into an EvalTable.
using RowSet = std::vector<std::size_t>;

/// Immutable, validated table of predictions. Scores lie in [0,1], labels are
/// 0/1 and every column has row_count() entries.
class EvalTable {
 public:
  EvalTable(std::vector<double> scores, std::vector<std::uint8_t> labels,
            std::vector<Attribute> attributes = {}, std::vector<ValueColumn> value_columns = {},
            std::string score_name = "score", std::string label_name = "label");

  /// Convenience constructor from raw attribute strings, mostly for tests.
  static EvalTable from_columns(std::vector<double> scores, std::vector<std::uint8_t> labels,
                                const std::map<std::string, std::vector<std::string>>& attributes = {});

  std::size_t row_count() const noexcept { return scores_.size(); }
  std::span<const double> scores() const noexcept { return scores_; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
  const Attribute& attribute(std::string_view name) const;
  bool has_attribute(std::string_view name) const noexcept;

  const std::vector<ValueColumn>& value_columns() const noexcept { return value_columns_; }
  /// Index of a value column, or -1.
  int value_column_index(std::string_view name) const noexcept;

  const std::string& score_name() const noexcept { return score_name_; }
  const std::string& label_name() const noexcept { return label_name_; }

  RowSet all_rows() const;

  bool operator==(const EvalTable& other) const;

 private:
  std::vector<double> scores_;
  std::vector<std::uint8_t> labels_;
  std::vector<Attribute> attributes_;
  std::vector<ValueColumn> value_columns_;
  std::string score_name_;
  std::string label_name_;
};

/// Reads a UTF-8 RFC 4180 CSV with a header row. Rows with a missing or
/// malformed score or label are rejected with Error(kValue) naming the row
/// (1-based, counting data rows).
EvalTable ingest_csv(const std::filesystem::path& path, const std::string& score_col,
                     const std::string& label_col, const std::vector<std::string>& attr_cols,
                     const std::vector<std::string>& value_cols = {});

EvalTable ingest_csv(std::istream& in, const std::string& score_col, const std::string& label_col,
                     const std::vector<std::string>& attr_cols,
                     const std::vector<std::string>& value_cols = {});

/// Canonical export: score, label, attributes, value columns, in table order.
/// Scores are printed with 17 significant digits so re-ingestion is exact.
void write_csv(const EvalTable& table, std::ostream& out);

/// Fraction of the selected rows with label 1.
double base_rate(const EvalTable& table, const RowSet& rows);

struct ThresholdRule {
  enum class Kind { kFixed, kBaseRate, kMaxGmean };

  Kind kind = Kind::kBaseRate;
  double value = 0.5;  // only meaningful for kFixed

  static ThresholdRule fixed(double t);
  static ThresholdRule base_rate() { return {Kind::kBaseRate, 0.0}; }
  static ThresholdRule max_gmean() { return {Kind::kMaxGmean, 0.0}; }

  /// Parses "fixed:<t>", "base-rate" or "max-gmean". Throws Error(kConfig).
  static ThresholdRule parse(std::string_view text);
  std::string to_string() const;
};

/// Resolves a rule to a concrete threshold using the selected rows.
double resolve_threshold(const ThresholdRule& rule, const EvalTable& table, const RowSet& rows);

/// Threshold maximising sqrt(sensitivity * specificity) over the midpoints
/// between adjacent distinct scores plus {0, 1}; ties go to the smaller
/// threshold. Throws Error(kOneClassOnly).
double max_gmean_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace strata
