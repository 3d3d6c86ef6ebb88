#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "strata/dataset.hpp"
#include "strata/inference.hpp"
#include "strata/subgroup_spec.hpp"

namespace strata {

struct EnumerationConfig {
  std::size_t min_group_size = 1;
  std::size_t max_level = 1;
  /// Attributes to combine; empty means every attribute of the table.
  std::vector<std::string> attributes;

  /// Throws Error(kConfig) unless min_group_size >= 1 and max_level >= 1.
  void validate() const;
};

/// All conjunctions of observed attribute values with 1 <= level <= max_level
/// and at least min_group_size members, in canonical order.
/// Throws Error(kUnknownAttribute).
std::vector<SubgroupSpec> enumerate_subgroups(const EvalTable& table, const EnumerationConfig& cfg);

/// Rows matching every constraint of `spec`.
RowSet member_rows(const EvalTable& table, const SubgroupSpec& spec);

/// Rows that differ from `spec` in every constrained attribute (a
/// conjunction of negations, not the set complement). May be empty.
RowSet complement_rows(const EvalTable& table, const SubgroupSpec& spec);

struct RankedGroup {
  SubgroupSpec group;
  std::string metric_id;
  double rank_p = 0.0;
  double rank_disparity = 0.0;
  double score = 0.0;
  double p_raw = 1.0;
  double disparity = 0.0;
};

/// Orders completed tests by rank(p_raw ascending) + rank(|disparity|
/// descending), using average ranks for ties; remaining ties go to the
/// smaller p_raw, then canonical group order. Skipped tests are ignored.
std::vector<RankedGroup> rank_interestingness(std::span<const TestResult> results);

/// Average (fractional) ranks, 1-based, of `values` in ascending order.
std::vector<double> fractional_ranks(std::span<const double> values);

}  // namespace strata
