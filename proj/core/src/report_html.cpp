#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "strata/error.hpp"
#include "strata/report.hpp"

namespace strata {

namespace {

constexpr const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
                                    "#e6ab02", "#a6761d", "#1f78b4", "#b2df8a", "#666666"};

constexpr const char* kStyle = R"(
body { font-family: sans-serif; margin: 2em; color: #222; }
h1 { font-size: 1.5em; }
h2 { font-size: 1.2em; margin-top: 2em; }
table { border-collapse: collapse; font-size: 0.85em; }
td, th { border: 1px solid #ccc; padding: 2px 6px; text-align: right; }
td.name, th.name { text-align: left; }
.bar { fill: #8da0cb; stroke: #3b4f8a; }
.bar.ci-missing { fill: #dde3f2; stroke-dasharray: 4 3; }
.bar.undefined { fill: none; stroke: #999; stroke-dasharray: 4 3; }
.whisker { stroke: #222; stroke-width: 1.5; }
.reference { stroke: #c00; stroke-dasharray: 2 2; }
.stars { font-size: 12px; fill: #c00; }
.axis { stroke: #444; }
.label { font-size: 11px; }
.band { opacity: 0.18; }
.curve { fill: none; stroke-width: 1.5; }
.operating-point { stroke: #000; stroke-width: 1; }
.curve-panels { display: flex; flex-wrap: wrap; gap: 1em; }
footer { margin-top: 3em; font-size: 0.8em; color: #555; }
)";

std::string esc(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  return fmt::format("{:.4g}", v);
}

std::string coord(double v) { return fmt::format("{:.2f}", v); }

struct Scale {
  double d0, d1, r0, r1;
  double operator()(double v) const { return r0 + (v - d0) / (d1 - d0) * (r1 - r0); }
};

const TestResult* find_test(const ReportBundle& b, const SubgroupSpec& g, const std::string& metric) {
  for (const auto& t : b.tests) {
    if (t.metric_id == metric && t.group == g) return &t;
  }
  return nullptr;
}

void metric_panel(std::string& out, const ReportBundle& b, std::size_t m) {
  const auto& metric = b.config.metrics[m];
  const auto id = metric.name();
  const std::size_t rows = b.groups.size();
  const double row_h = 22, label_w = 220, plot_w = 420, right_w = 60, top = 24;
  const double height = top + row_h * static_cast<double>(rows) + 30;

  double lo = 0.0, hi = 1.0;
  if (!unit_bounded(metric)) {
    lo = 0.0;
    hi = 0.0;
    auto widen = [&](double v) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    };
    for (const auto& row : b.grid) {
      if (row[m].value) widen(*row[m].value);
      if (row[m].ci) {
        widen(row[m].ci->lo);
        widen(row[m].ci->hi);
      }
    }
    if (b.overall[m].value) widen(*b.overall[m].value);
    if (hi <= lo) hi = lo + 1.0;
  }
  const Scale sx{lo, hi, label_w, label_w + plot_w};

  out += fmt::format("<section class=\"metric-panel\" data-metric=\"{}\">\n<h2>{}</h2>\n", esc(id), esc(id));
  out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" role=\"img\">\n",
                     coord(label_w + plot_w + right_w), coord(height));
  const double axis_y = top + row_h * static_cast<double>(rows) + 4;
  out += fmt::format("<line class=\"axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", coord(sx(lo)), coord(axis_y),
                     coord(sx(hi)), coord(axis_y));
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out += fmt::format("<text class=\"label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", coord(sx(v)),
                       coord(axis_y + 14), num(v));
  }

  for (std::size_t g = 0; g < rows; ++g) {
    const auto& spec = b.groups[g].spec;
    const auto& cell = b.grid[g][m];
    const double y = top + row_h * static_cast<double>(g);
    const double bar_y = y + 3, bar_h = row_h - 6;
    out += fmt::format("<g class=\"subgroup\" data-group=\"{}\" data-metric=\"{}\">\n", esc(spec.id()), esc(id));
    out += fmt::format("<text class=\"label\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{} (n={})</text>\n",
                       coord(label_w - 6), coord(y + row_h / 2 + 4), esc(spec.id()), b.groups[g].n);
    if (!cell.value) {
      out += fmt::format(
          "<rect class=\"bar undefined\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"><title>{}: undefined ({})</title></rect>\n",
          coord(sx(lo)), coord(bar_y), coord(plot_w), coord(bar_h), esc(spec.id()), esc(cell.undefined_reason));
    } else {
      const double v = *cell.value;
      const double x0 = sx(std::min(0.0, v)), x1 = sx(std::max(0.0, v));
      const std::string tip =
          cell.ci ? fmt::format("{}: {} [{}, {}] ({})", spec.id(), num(v), num(cell.ci->lo), num(cell.ci->hi), cell.ci->method)
                  : fmt::format("{}: {} (no CI: {})", spec.id(), num(v), cell.ci_missing_reason);
      out += fmt::format(
          "<rect class=\"bar{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"><title>{}</title></rect>\n",
          cell.ci ? "" : " ci-missing", coord(x0), coord(bar_y), coord(std::max(x1 - x0, 0.5)), coord(bar_h), esc(tip));
      if (cell.ci) {
        const double cy = y + row_h / 2;
        out += fmt::format("<line class=\"whisker\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", coord(sx(cell.ci->lo)),
                           coord(cy), coord(sx(cell.ci->hi)), coord(cy));
        for (double e : {cell.ci->lo, cell.ci->hi}) {
          out += fmt::format("<line class=\"whisker\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", coord(sx(e)),
                             coord(cy - 4), coord(sx(e)), coord(cy + 4));
        }
      }
    }
    if (const auto* t = find_test(b, spec, id); t != nullptr && t->completed()) {
      const auto stars = significance_stars(t->p_adj);
      out += fmt::format(
          "<text class=\"stars\" x=\"{}\" y=\"{}\" data-group=\"{}\" data-metric=\"{}\" data-p-adj=\"{}\">{}<title>p_adj = {}</title></text>\n",
          coord(label_w + plot_w + 6), coord(y + row_h / 2 + 4), esc(spec.id()), esc(id),
          fmt::format("{:.12g}", t->p_adj), to_string(stars), num(t->p_adj));
    }
    out += "</g>\n";
  }

  if (b.overall[m].value) {
    const double x = sx(*b.overall[m].value);
    out += fmt::format(
        "<line class=\"reference\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"><title>all: {}</title></line>\n",
        coord(x), coord(top - 4), coord(x), coord(axis_y), num(*b.overall[m].value));
  }
  out += "</svg>\n</section>\n";
}

struct Domain {
  double x0, x1, y0, y1;
  const char* x_label;
  const char* y_label;
};

Domain curve_domain(const CurveSet& set) {
  switch (set.kind) {
    case CurveKind::kRoc: return {0, 1, 0, 1, "FPR", "TPR"};
    case CurveKind::kPr: return {0, 1, 0, 1, "recall", "precision"};
    case CurveKind::kCalibration: return {0, 1, 0, 1, "mean score", "fraction positive"};
    case CurveKind::kPrg: {
      double y0 = 0.0;
      for (const auto& [spec, gc] : set.groups) {
        for (const auto& p : gc.points) {
          if (p.y && p.x >= 0.0 && std::isfinite(*p.y)) y0 = std::min(y0, *p.y);
        }
      }
      return {0, 1, std::max(-1.0, y0), 1, "recall gain", "precision gain"};
    }
  }
  return {0, 1, 0, 1, "", ""};
}

void curve_panel(std::string& out, const CurveSet& set, const std::map<SubgroupSpec, std::size_t>& colors,
                 std::size_t& clip_counter) {
  const double size = 240, pad = 36;
  const Domain d = curve_domain(set);
  const Scale sx{d.x0, d.x1, pad, size - 8};
  const Scale sy{d.y0, d.y1, size - pad, 8};
  const auto clip = fmt::format("clip{}", clip_counter++);
  const auto kind = to_string(set.kind);

  out += fmt::format("<figure class=\"curve-panel\" data-kind=\"{}\" data-attribute=\"{}\">\n", esc(kind),
                     esc(set.attribute));
  out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" role=\"img\">\n",
                     coord(size), coord(size));
  out += fmt::format("<defs><clipPath id=\"{}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath></defs>\n",
                     clip, coord(sx(d.x0)), coord(sy(d.y1)), coord(sx(d.x1) - sx(d.x0)), coord(sy(d.y0) - sy(d.y1)));
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" class=\"axis\"/>\n",
                     coord(sx(d.x0)), coord(sy(d.y1)), coord(sx(d.x1) - sx(d.x0)), coord(sy(d.y0) - sy(d.y1)));
  out += fmt::format("<text class=\"label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     coord((sx(d.x0) + sx(d.x1)) / 2), coord(size - 8), d.x_label);
  out += fmt::format(
      "<text class=\"label\" x=\"10\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 10 {})\">{}</text>\n",
      coord((sy(d.y0) + sy(d.y1)) / 2), coord((sy(d.y0) + sy(d.y1)) / 2), d.y_label);
  out += fmt::format("<text class=\"label\" x=\"{}\" y=\"{}\">{}</text>\n", coord(sx(d.x0)), coord(size - pad + 12),
                     num(d.y0));
  if (set.kind == CurveKind::kRoc || set.kind == CurveKind::kCalibration) {
    out += fmt::format("<line class=\"reference\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", coord(sx(0)),
                       coord(sy(0)), coord(sx(1)), coord(sy(1)));
  }
  out += fmt::format("<g clip-path=\"url(#{})\">\n", clip);
  for (const auto& [spec, gc] : set.groups) {
    const char* color = kPalette[colors.at(spec) % std::size(kPalette)];
    if (gc.band) {
      std::string poly;
      const auto& band = *gc.band;
      for (std::size_t i = 0; i < band.x.size(); ++i) {
        if (std::isfinite(band.hi[i])) poly += fmt::format("{},{} ", coord(sx(band.x[i])), coord(sy(band.hi[i])));
      }
      for (std::size_t i = band.x.size(); i-- > 0;) {
        if (std::isfinite(band.lo[i])) poly += fmt::format("{},{} ", coord(sx(band.x[i])), coord(sy(band.lo[i])));
      }
      if (!poly.empty()) {
        out += fmt::format("<polygon class=\"band\" fill=\"{}\" points=\"{}\"/>\n", color, poly);
      }
    }
    std::string pts;
    for (const auto& p : gc.points) {
      if (p.y && std::isfinite(p.x) && std::isfinite(*p.y)) pts += fmt::format("{},{} ", coord(sx(p.x)), coord(sy(*p.y)));
    }
    out += fmt::format("<polyline class=\"curve\" stroke=\"{}\" points=\"{}\"><title>{}</title></polyline>\n", color,
                       pts, esc(spec.id()));
    if (gc.operating_point && gc.operating_point->y) {
      const auto& op = *gc.operating_point;
      out += fmt::format(
          "<circle class=\"operating-point\" data-group=\"{}\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\"><title>{} at threshold {}: ({}, {})</title></circle>\n",
          esc(spec.id()), coord(sx(op.x)), coord(sy(*op.y)), color, esc(spec.id()), num(op.threshold), num(op.x),
          num(*op.y));
    }
  }
  out += "</g>\n</svg>\n";
  out += fmt::format("<figcaption>{}: {}", esc(set.attribute), esc(kind));
  for (const auto& [spec, reason] : set.omitted) {
    out += fmt::format("<br>{} omitted: {}", esc(spec.id()), esc(reason));
  }
  out += "</figcaption>\n</figure>\n";
}

void legend(std::string& out, const std::map<SubgroupSpec, std::size_t>& colors) {
  out += "<p class=\"legend\">";
  for (const auto& [spec, idx] : colors) {
    out += fmt::format("<span style=\"color:{}\">&#9632;</span> {} &nbsp; ", kPalette[idx % std::size(kPalette)],
                       esc(spec.id()));
  }
  out += "</p>\n";
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace

std::string render_html_string(const ReportBundle& b) {
  std::string out;
  const auto& p = b.provenance;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += fmt::format("<title>Subgroup evaluation: {}</title>\n", esc(p.input));
  out += fmt::format("<style>{}</style>\n</head>\n<body>\n", kStyle);
  out += fmt::format("<h1>Subgroup evaluation: {}</h1>\n", esc(p.input));
  out += fmt::format(
      "<p>{} rows, base rate {}, threshold {} ({}), {} subgroups, {} of {} tests completed. "
      "Stars give Holm-adjusted significance: ns p &gt; 0.01, * p &le; 0.01, ** p &le; 0.001. "
      "Dashed bars have no confidence interval; dashed outlines mark undefined values.</p>\n",
      p.rows, num(p.base_rate), num(p.threshold), esc(p.threshold_rule), b.groups.size(),
      std::count_if(b.tests.begin(), b.tests.end(), [](const TestResult& t) { return t.completed(); }),
      b.tests.size());

  for (std::size_t m = 0; m < b.config.metrics.size(); ++m) metric_panel(out, b, m);

  std::size_t clip_counter = 0;
  for (const auto& ac : b.curves) {
    std::map<SubgroupSpec, std::size_t> colors;
    for (const auto& info : b.groups) {
      if (info.spec.level() == 1 && info.spec.constraints().front().first == ac.attribute) {
        colors.emplace(info.spec, colors.size());
      }
    }
    out += fmt::format("<section class=\"curves\" data-attribute=\"{}\">\n<h2>Curves by {}</h2>\n", esc(ac.attribute),
                       esc(ac.attribute));
    legend(out, colors);
    out += "<div class=\"curve-panels\">\n";
    for (const auto& set : ac.sets) curve_panel(out, set, colors, clip_counter);
    out += "</div>\n</section>\n";
  }

  for (const auto& [metric, ranked] : b.ranking) {
    out += fmt::format("<section class=\"ranking\" data-metric=\"{}\">\n<h2>Most interesting subgroups: {}</h2>\n",
                       esc(metric), esc(metric));
    out += "<table>\n<tr><th>rank</th><th class=\"name\">subgroup</th><th>score</th><th>disparity</th><th>p_raw</th><th>p_adj</th></tr>\n";
    const std::size_t k = std::min(ranked.size(), b.config.top_k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& r = ranked[i];
      const auto* t = find_test(b, r.group, metric);
      out += fmt::format("<tr><td>{}</td><td class=\"name\">{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                         i + 1, esc(r.group.id()), num(r.score), num(r.disparity), num(r.p_raw),
                         t ? num(t->p_adj) : std::string("-"));
    }
    out += "</table>\n</section>\n";
  }

  out += "<section class=\"tests\">\n<h2>Tests against complementary groups</h2>\n<table>\n";
  out += "<tr><th class=\"name\">subgroup</th><th class=\"name\">metric</th><th>n</th><th>complement n</th>"
         "<th>disparity</th><th>T</th><th>p_raw</th><th>p_adj</th><th class=\"name\">status</th></tr>\n";
  for (const auto& t : b.tests) {
    if (t.completed()) {
      out += fmt::format(
          "<tr><td class=\"name\">{}</td><td class=\"name\">{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td>"
          "<td>{}</td><td>{}</td><td class=\"name\">{}</td></tr>\n",
          esc(t.group.id()), esc(t.metric_id), t.group_n, t.complement_n, num(t.disparity), num(t.t_obs),
          num(t.p_raw), num(t.p_adj), to_string(significance_stars(t.p_adj)));
    } else {
      out += fmt::format(
          "<tr><td class=\"name\">{}</td><td class=\"name\">{}</td><td>{}</td><td>{}</td><td></td><td></td>"
          "<td></td><td></td><td class=\"name\">skipped: {}</td></tr>\n",
          esc(t.group.id()), esc(t.metric_id), t.group_n, t.complement_n, esc(t.skip_reason));
    }
  }
  out += "</table>\n</section>\n";

  std::set<std::string> methods;
  for (const auto& r : b.overall) {
    if (r.ci) methods.insert(r.ci->method);
  }
  for (const auto& row : b.grid) {
    for (const auto& r : row) {
      if (r.ci) methods.insert(r.ci->method);
    }
  }
  std::string method_list;
  for (const auto& m : methods) method_list += (method_list.empty() ? "" : ", ") + m;

  out += fmt::format(
      "<footer>{} {}; input {}; seed {}; alpha {}; n_boot {}; n_perm {}; recall-gain minimum {}; "
      "CI methods: {}; generated {}</footer>\n",
      esc(p.tool), esc(p.version), esc(p.input), p.seed, num(b.config.ci.alpha), b.config.ci.n_boot, b.config.n_perm,
      num(b.config.recg_min), esc(method_list.empty() ? "none" : method_list), timestamp());
  out += "</body>\n</html>\n";
  return out;
}

void render_html(const ReportBundle& bundle, const std::filesystem::path& out) {
  const auto text = render_html_string(bundle);
  std::ofstream f(out, std::ios::binary);
  if (!f) fail(ErrorKind::kIo, fmt::format("cannot write {}", out.string()));
  f << text;
  if (!f.flush()) fail(ErrorKind::kIo, fmt::format("error writing {}", out.string()));
}

}  // namespace strata
