#include "strata/subgroups.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "strata/error.hpp"

namespace strata {

SubgroupSpec::SubgroupSpec(std::vector<Constraint> constraints) : constraints_(std::move(constraints)) {
  if (constraints_.empty()) fail(ErrorKind::kConfig, "a subgroup needs at least one constraint");
  std::sort(constraints_.begin(), constraints_.end());
  for (std::size_t i = 1; i < constraints_.size(); ++i) {
    if (constraints_[i].first == constraints_[i - 1].first) {
      fail(ErrorKind::kConfig, fmt::format("attribute '{}' constrained twice", constraints_[i].first));
    }
  }
}

std::string SubgroupSpec::id() const {
  if (constraints_.empty()) return "all";
  std::string out;
  for (const auto& [attr, value] : constraints_) {
    if (!out.empty()) out += " & ";
    out += attr;
    out += '=';
    out += value;
  }
  return out;
}

std::strong_ordering SubgroupSpec::operator<=>(const SubgroupSpec& other) const {
  if (auto c = level() <=> other.level(); c != 0) return c;
  return constraints_ <=> other.constraints_;
}

void EnumerationConfig::validate() const {
  if (min_group_size < 1) fail(ErrorKind::kConfig, "min_group_size must be >= 1");
  if (max_level < 1) fail(ErrorKind::kConfig, "max_level must be >= 1");
}

std::vector<SubgroupSpec> enumerate_subgroups(const EvalTable& table, const EnumerationConfig& cfg) {
  cfg.validate();
  std::vector<const Attribute*> attrs;
  if (cfg.attributes.empty()) {
    for (const auto& a : table.attributes()) attrs.push_back(&a);
  } else {
    std::set<std::string> seen;
    for (const auto& name : cfg.attributes) {
      if (!seen.insert(name).second) continue;
      attrs.push_back(&table.attribute(name));
    }
  }
  std::sort(attrs.begin(), attrs.end(), [](auto* a, auto* b) { return a->name < b->name; });

  std::vector<SubgroupSpec> out;
  const std::size_t k = attrs.size();
  const std::size_t max_level = std::min(cfg.max_level, k);
  const std::size_t n = table.row_count();

  // Walk attribute subsets of each size in lexicographic order and count
  // the observed value combinations.
  std::vector<std::size_t> subset;
  std::vector<std::uint32_t> key;
  for (std::size_t level = 1; level <= max_level; ++level) {
    subset.resize(level);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
    while (true) {
      std::map<std::vector<std::uint32_t>, std::size_t> counts;
      key.resize(level);
      for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t j = 0; j < level; ++j) key[j] = attrs[subset[j]]->codes[row];
        ++counts[key];
      }
      for (const auto& [codes, count] : counts) {
        if (count < cfg.min_group_size) continue;
        std::vector<SubgroupSpec::Constraint> constraints;
        for (std::size_t j = 0; j < level; ++j) {
          const auto* a = attrs[subset[j]];
          constraints.emplace_back(a->name, a->levels[codes[j]]);
        }
        out.emplace_back(std::move(constraints));
      }

      // Next combination.
      std::size_t i = level;
      while (i > 0 && subset[i - 1] == k - level + (i - 1)) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < level; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

/// (codes, wanted code or -1 if the value never occurs) per constraint.
std::vector<std::pair<const std::vector<std::uint32_t>*, std::int64_t>> resolve(const EvalTable& table,
                                                                               const SubgroupSpec& spec) {
  std::vector<std::pair<const std::vector<std::uint32_t>*, std::int64_t>> out;
  for (const auto& [name, value] : spec.constraints()) {
    const auto& attr = table.attribute(name);
    const auto it = std::lower_bound(attr.levels.begin(), attr.levels.end(), value);
    const std::int64_t code = it != attr.levels.end() && *it == value ? it - attr.levels.begin() : -1;
    out.emplace_back(&attr.codes, code);
  }
  return out;
}

}  // namespace

RowSet member_rows(const EvalTable& table, const SubgroupSpec& spec) {
  const auto cons = resolve(table, spec);
  RowSet rows;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const bool match = std::all_of(cons.begin(), cons.end(),
                                   [&](const auto& c) { return static_cast<std::int64_t>((*c.first)[r]) == c.second; });
    if (match) rows.push_back(r);
  }
  return rows;
}

RowSet complement_rows(const EvalTable& table, const SubgroupSpec& spec) {
  const auto cons = resolve(table, spec);
  RowSet rows;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const bool differs = std::all_of(cons.begin(), cons.end(),
                                     [&](const auto& c) { return static_cast<std::int64_t>((*c.first)[r]) != c.second; });
    if (differs) rows.push_back(r);
  }
  return rows;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
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

std::vector<RankedGroup> rank_interestingness(std::span<const TestResult> results) {
  std::vector<const TestResult*> done;
  for (const auto& r : results) {
    if (r.completed()) done.push_back(&r);
  }
  std::vector<double> p;
  std::vector<double> neg_abs_d;
  for (const auto* r : done) {
    p.push_back(r->p_raw);
    neg_abs_d.push_back(-std::abs(r->disparity));
  }
  const auto rank_p = fractional_ranks(p);
  const auto rank_d = fractional_ranks(neg_abs_d);

  std::vector<RankedGroup> out;
  for (std::size_t i = 0; i < done.size(); ++i) {
    out.push_back({done[i]->group, done[i]->metric_id, rank_p[i], rank_d[i], rank_p[i] + rank_d[i], done[i]->p_raw,
                   done[i]->disparity});
  }
  std::sort(out.begin(), out.end(), [](const RankedGroup& a, const RankedGroup& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.p_raw != b.p_raw) return a.p_raw < b.p_raw;
    if (a.group != b.group) return a.group < b.group;
    return a.metric_id < b.metric_id;
  });
  return out;
}

}  // namespace strata
