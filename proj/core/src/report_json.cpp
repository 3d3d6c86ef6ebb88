#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "strata/error.hpp"
#include "strata/report.hpp"

namespace strata {

namespace {

using nlohmann::json;

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

json number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json text_or_null(const std::string& s) { return s.empty() ? json(nullptr) : json(s); }

json cell_json(const MetricResult& r) {
  json j;
  j["value"] = number(r.value);
  j["n"] = r.n;
  j["n_pos"] = r.n_pos;
  j["n_neg"] = r.n_neg;
  j["undefined_reason"] = text_or_null(r.undefined_reason);
  j["ci_missing_reason"] = text_or_null(r.ci_missing_reason);
  if (r.ci) {
    j["ci"] = {{"lo", number(r.ci->lo)}, {"hi", number(r.ci->hi)}, {"method", r.ci->method}};
  } else {
    j["ci"] = nullptr;
  }
  json meta = json::object();
  for (const auto& [k, v] : r.meta) meta[k] = number(v);
  j["meta"] = std::move(meta);
  return j;
}

json point_json(const CurvePoint& p) { return json::array({number(p.x), number(p.y), number(p.threshold)}); }

json group_json(const SubgroupSpec& spec) {
  json c = json::object();
  for (const auto& [attr, value] : spec.constraints()) c[attr] = value;
  return c;
}

}  // namespace

double round_significant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  return std::strtod(fmt::format("{:.12g}", value).c_str(), nullptr);
}

std::string render_json_string(const ReportBundle& b) {
  json root;
  root["schema_version"] = kResultsSchemaVersion;
  root["config"] = json::parse(run_config_to_json(b.config, false));

  std::set<std::string> methods;
  auto note_method = [&](const MetricResult& r) {
    if (r.ci) methods.insert(r.ci->method);
  };

  json overall = json::object();
  for (const auto& r : b.overall) {
    overall[r.metric_id] = cell_json(r);
    note_method(r);
  }
  root["overall"] = std::move(overall);

  json groups = json::array();
  for (std::size_t g = 0; g < b.groups.size(); ++g) {
    const auto& info = b.groups[g];
    json j;
    j["id"] = info.spec.id();
    j["level"] = info.spec.level();
    j["constraints"] = group_json(info.spec);
    j["n"] = info.n;
    j["n_pos"] = info.n_pos;
    j["n_neg"] = info.n_neg;
    j["complement_n"] = info.complement_n;
    json cells = json::object();
    for (const auto& r : b.grid[g]) {
      cells[r.metric_id] = cell_json(r);
      note_method(r);
    }
    j["metrics"] = std::move(cells);
    groups.push_back(std::move(j));
  }
  root["subgroups"] = std::move(groups);

  json tests = json::array();
  for (const auto& t : b.tests) {
    json j;
    j["group"] = t.group.id();
    j["metric"] = t.metric_id;
    j["status"] = t.completed() ? "completed" : "skipped";
    j["skip_reason"] = text_or_null(t.skip_reason);
    j["group_n"] = t.group_n;
    j["complement_n"] = t.complement_n;
    if (t.completed()) {
      j["group_value"] = number(t.group_value);
      j["complement_value"] = number(t.complement_value);
      j["disparity"] = number(t.disparity);
      j["t_obs"] = number(t.t_obs);
      j["p_raw"] = number(t.p_raw);
      j["p_adj"] = number(t.p_adj);
      j["stars"] = std::string(to_string(significance_stars(t.p_adj)));
    } else {
      for (const char* k : {"group_value", "complement_value", "disparity", "t_obs", "p_raw", "p_adj", "stars"}) {
        j[k] = nullptr;
      }
    }
    j["n_perm_used"] = t.n_perm_used;
    j["attempts"] = t.attempts;
    tests.push_back(std::move(j));
  }
  root["tests"] = std::move(tests);

  json ranking = json::object();
  for (const auto& [metric, ranked] : b.ranking) {
    json list = json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const auto& r = ranked[i];
      list.push_back({{"rank", i + 1},
                      {"group", r.group.id()},
                      {"score", number(r.score)},
                      {"rank_p", number(r.rank_p)},
                      {"rank_disparity", number(r.rank_disparity)},
                      {"p_raw", number(r.p_raw)},
                      {"disparity", number(r.disparity)}});
    }
    ranking[metric] = std::move(list);
  }
  root["ranking"] = std::move(ranking);

  json curves = json::object();
  for (const auto& ac : b.curves) {
    json per_kind = json::object();
    for (const auto& set : ac.sets) {
      json gs = json::object();
      for (const auto& [spec, gc] : set.groups) {
        json g;
        json pts = json::array();
        for (const auto& p : gc.points) pts.push_back(point_json(p));
        g["points"] = std::move(pts);
        if (gc.band) {
          json x = json::array(), lo = json::array(), hi = json::array();
          for (std::size_t i = 0; i < gc.band->x.size(); ++i) {
            x.push_back(number(gc.band->x[i]));
            lo.push_back(number(gc.band->lo[i]));
            hi.push_back(number(gc.band->hi[i]));
          }
          g["band"] = {{"x", std::move(x)}, {"lo", std::move(lo)}, {"hi", std::move(hi)}};
        } else {
          g["band"] = nullptr;
        }
        g["operating_point"] = gc.operating_point ? point_json(*gc.operating_point) : json(nullptr);
        gs[spec.id()] = std::move(g);
      }
      json omitted = json::object();
      for (const auto& [spec, reason] : set.omitted) omitted[spec.id()] = reason;
      per_kind[to_string(set.kind)] = {{"groups", std::move(gs)}, {"omitted", std::move(omitted)}};
    }
    curves[ac.attribute] = std::move(per_kind);
  }
  root["curves"] = std::move(curves);

  const auto& p = b.provenance;
  root["provenance"] = {{"tool", p.tool},
                        {"version", p.version},
                        {"seed", p.seed},
                        {"input", p.input},
                        {"rows", p.rows},
                        {"threshold_rule", p.threshold_rule},
                        {"threshold", number(p.threshold)},
                        {"base_rate", number(p.base_rate)},
                        {"ci_methods", std::vector<std::string>(methods.begin(), methods.end())}};

  return root.dump(2) + "\n";
}

void render_json(const ReportBundle& bundle, const std::filesystem::path& out) {
  const auto text = render_json_string(bundle);
  std::ofstream f(out, std::ios::binary);
  if (!f) fail(ErrorKind::kIo, fmt::format("cannot write {}", out.string()));
  f << text;
  if (!f.flush()) fail(ErrorKind::kIo, fmt::format("error writing {}", out.string()));
}

}  // namespace strata
