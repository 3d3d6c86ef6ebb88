// Acceptance checks. `strata_acceptance N` runs criterion N, no argument
// runs all of them. Each criterion prints one PASS or FAIL line; the exit
// status is non-zero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "strata/curves.hpp"
#include "strata/dataset.hpp"
#include "strata/error.hpp"
#include "strata/inference.hpp"
#include "strata/metrics.hpp"
#include "strata/random.hpp"
#include "strata/subgroups.hpp"
#include "strata/uncertainty.hpp"
#include "strata_cli/cli.hpp"

namespace fs = std::filesystem;
using namespace strata;

namespace {

// Tolerances and thresholds.
constexpr double kAurocTol = 1e-12;
constexpr double kPauprgTol = 1e-9;
constexpr double kDrmsceMaxGap = 0.02;
constexpr double kPluginMinGap = 0.02;
constexpr double kCoverageLo = 0.92;
constexpr double kCoverageHi = 0.98;
constexpr double kTypeOneLo = 0.03;
constexpr double kTypeOneHi = 0.07;
constexpr double kMinPower = 0.5;
constexpr double kMinPlantedFirst = 0.95;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

Sample to_sample(const gen::Data& d) { return Sample{d.scores, d.labels, {}}; }

// Labels ~ Bernoulli(br), positives shifted by `shift` on the logit scale.
gen::Data binormal_mixed(std::mt19937_64& rng, std::size_t n, double br, double shift) {
  std::uniform_real_distribution<double> u;
  std::normal_distribution<double> z;
  gen::Data d;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = u(rng) < br;
    d.labels.push_back(pos);
    d.scores.push_back(gen::logistic((pos ? shift : 0.0) + z(rng)));
  }
  return d;
}

bool has_both_classes(const std::vector<std::uint8_t>& y) {
  std::size_t p = 0;
  for (auto v : y) p += v;
  return p > 0 && p < y.size();
}

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u;
  double worst_auc = 0.0;
  int auc_cases = 0;
  while (auc_cases < 1000) {
    const std::size_t n = 2 + rng() % 199;
    auto d = gen::random_scores(rng, n, 0.1 + 0.8 * u(rng));
    if (!has_both_classes(d.labels)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (d.labels[i]) d.scores[i] = std::min(1.0, d.scores[i] + 0.3 * u(rng));
    }
    if (std::set<double>(d.scores.begin(), d.scores.end()).size() != n) continue;
    const double pairs = oracle::auroc_pairs(d.scores, d.labels);
    const double trap = trapezoid_area(roc_curve(d.scores, d.labels));
    const double ranked = *auroc(d.scores, d.labels);
    worst_auc = std::max({worst_auc, std::abs(pairs - trap), std::abs(pairs - ranked)});
    ++auc_cases;
  }

  double worst_prg = 0.0;
  int prg_cases = 0;
  std::size_t draws = 0;
  while (prg_cases < 200) {
    ++draws;
    const std::size_t n = 5 + rng() % 196;
    auto d = gen::random_scores(rng, n, 0.2 + 0.6 * u(rng));
    if (!has_both_classes(d.labels)) continue;
    // Round some scores to create ties.
    if (rng() % 2) {
      for (auto& s : d.scores) s = std::round(s * 20.0) / 20.0;
    }
    const auto expected = oracle::prg_area(d.scores, d.labels, 0.0);
    if (!expected) continue;
    const auto got = pauprg(d.scores, d.labels, 0.0);
    if (!got.value.defined()) {
      worst_prg = INFINITY;
    } else {
      worst_prg = std::max(worst_prg, std::abs(*got.value - *expected));
    }
    for (double g : {0.2, 0.5}) {
      const auto e = oracle::prg_area(d.scores, d.labels, g);
      const auto p = pauprg(d.scores, d.labels, g);
      if (e && p.value.defined()) worst_prg = std::max(worst_prg, std::abs(*p.value - *e));
      else if (e.has_value() != p.value.defined()) worst_prg = INFINITY;
    }
    ++prg_cases;
  }
  return {worst_auc <= kAurocTol && worst_prg <= kPauprgTol,
          fmt::format("auroc max err {:.3g} over {} cases; pauprg max err {:.3g} over {} cases ({} draws)", worst_auc,
                      auc_cases, worst_prg, prg_cases, draws)};
}

Outcome prg_ill_definedness() {
  std::mt19937_64 rng(202);
  int cases = 0, full_undefined = 0, partial_defined = 0;
  while (cases < 1000) {
    const std::size_t n = 20 + rng() % 11;  // <= 30
    const std::size_t n_pos = 2 + rng() % 2;
    if (static_cast<double>(n_pos) / n > 0.1) continue;
    std::uniform_real_distribution<double> u;
    std::vector<double> scores(n);
    for (auto& s : scores) s = u(rng);
    std::vector<std::uint8_t> labels(n, 0);
    // The top-scored row is positive; the others go to random rows.
    const auto top = std::max_element(scores.begin(), scores.end()) - scores.begin();
    labels[top] = 1;
    for (std::size_t placed = 1; placed < n_pos;) {
      const auto r = rng() % n;
      if (!labels[r]) {
        labels[r] = 1;
        ++placed;
      }
    }
    const double br = static_cast<double>(n_pos) / n;
    const double smallest_rec = 1.0 / n_pos;
    if (!(smallest_rec > br)) continue;
    ++cases;
    if (!pauprg(scores, labels, 0.0).value.defined()) ++full_undefined;
    if (pauprg(scores, labels, 0.2).value.defined()) ++partial_defined;
  }
  return {full_undefined == cases && partial_defined == cases,
          fmt::format("{} cases: full AUPRG undefined in {}, pauprg(0.2) defined in {}", cases, full_undefined,
                      partial_defined)};
}

Outcome drmsce_debiasing() {
  std::mt19937_64 rng(303);
  constexpr int kReps = 1000;
  auto means = [&](std::size_t n) {
    double d = 0.0, p = 0.0;
    for (int r = 0; r < kReps; ++r) {
      const auto data = gen::calibrated(rng, n);
      const std::size_t bins = default_calibration_bins(n);
      d += drmsce(data.scores, data.labels, bins);
      p += rmsce_plugin(data.scores, data.labels, bins);
    }
    return std::pair{d / kReps, p / kReps};
  };
  const auto [d100, p100] = means(100);
  const auto [d1000, p1000] = means(1000);
  const double dgap = std::abs(d100 - d1000), pgap = std::abs(p100 - p1000);
  return {dgap < kDrmsceMaxGap && pgap > kPluginMinGap,
          fmt::format("drmsce means {:.4f} (n=100) vs {:.4f} (n=1000), gap {:.4f}; plugin {:.4f} vs {:.4f}, gap {:.4f}",
                      d100, d1000, dgap, p100, p1000, pgap)};
}

Outcome ci_coverage() {
  constexpr int kReps = 2000;
  constexpr double kAlpha = 0.05;
  std::mt19937_64 rng(404);
  std::map<std::string, double> coverage;

  {
    std::binomial_distribution<std::size_t> b(40, 0.3);
    int hit = 0;
    for (int r = 0; r < kReps; ++r) {
      const auto ci = wilson_ci(b(rng), 40, kAlpha);
      hit += ci.lo <= 0.3 && 0.3 <= ci.hi;
    }
    coverage["wilson"] = static_cast<double>(hit) / kReps;
  }
  {
    const double shift = gen::binormal_shift(0.8);
    int hit = 0;
    for (int r = 0; r < kReps; ++r) {
      const auto d = gen::binormal(rng, 200, 200, shift);
      const auto ci = delong_auroc_ci(d.scores, d.labels, kAlpha);
      hit += ci.lo <= 0.8 && 0.8 <= ci.hi;
    }
    coverage["delong"] = static_cast<double>(hit) / kReps;
  }
  {
    const double shift = gen::binormal_shift(0.8);
    int hit = 0;
    for (int r = 0; r < kReps; ++r) {
      const auto d = gen::binormal(rng, 15, 15, shift);
      const auto ci = newcombe_auroc_ci(d.scores, d.labels, kAlpha);
      hit += ci.lo <= 0.8 && 0.8 <= ci.hi;
    }
    coverage["newcombe"] = static_cast<double>(hit) / kReps;
  }
  {
    const double shift = gen::binormal_shift(0.8);
    CiConfig cfg;
    cfg.alpha = kAlpha;
    cfg.n_boot = 1000;
    cfg.stratify = true;
    const Evaluator metric = [](const SampleView& s) { return auroc(s.scores, s.labels); };
    int hit = 0;
    for (int r = 0; r < kReps; ++r) {
      const auto d = gen::binormal(rng, 6, 24, shift);
      cfg.seed = static_cast<std::uint64_t>(r);
      const auto res = bootstrap_ci(metric, to_sample(d), cfg, true);
      hit += res.interval && res.interval->lo <= 0.8 && 0.8 <= res.interval->hi;
    }
    coverage["stratified bootstrap"] = static_cast<double>(hit) / kReps;
  }

  bool ok = true;
  std::string detail;
  for (const auto& [name, c] : coverage) {
    ok &= c >= kCoverageLo && c <= kCoverageHi;
    detail += fmt::format("{}{} {:.4f}", detail.empty() ? "" : ", ", name, c);
  }
  return {ok, detail};
}

Outcome dispatch_rule() {
  std::vector<std::string> failures;
  auto check = [&](const std::string& what, bool cond) {
    if (!cond) failures.push_back(what);
  };
  std::mt19937_64 rng(505);
  // n = 50, overlapping classes.
  auto d50 = gen::binormal(rng, 25, 25, 1.0);
  check("n=50 -> newcombe", auroc_ci_dispatch(d50.scores, d50.labels, 0.05).method == "newcombe");
  // n = 51 with AUROC 0.9: 20 negatives, 31 positives, 62 of 620 pairs
  // discordant. Rows listed from lowest to highest score.
  {
    std::string order = "PPP" + std::string(18, 'N') + "PNN" + std::string(27, 'P');
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (std::size_t i = 0; i < order.size(); ++i) {
      s.push_back((i + 0.5) / order.size());
      y.push_back(order[i] == 'P');
    }
    const double a = *auroc(s, y);
    const auto r = auroc_ci_dispatch(s, y, 0.05);
    check(fmt::format("n=51 auc={:.3f} -> delong", a), std::abs(a - 0.9) < 1e-12 && r.method == "delong");
  }
  // n = 500, perfect separation.
  {
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (int i = 0; i < 500; ++i) {
      s.push_back(i / 500.0);
      y.push_back(i >= 250);
    }
    const auto r = auroc_ci_dispatch(s, y, 0.05);
    check("n=500 auc=1 -> newcombe", r.method == "newcombe");
    check("auc=1 -> hi == 1", r.hi == 1.0);
    check("auc=1 -> width > 0", r.hi - r.lo > 0.0);
    const auto dl = delong_auroc_ci(s, y, 0.05);
    check("delong collapses at auc=1", dl.hi - dl.lo == 0.0);
    // Reversed ranking, AUROC = 0.
    for (auto& v : y) v = !v;
    const auto z = auroc_ci_dispatch(s, y, 0.05);
    check("auc=0 -> newcombe with width > 0", z.method == "newcombe" && z.lo == 0.0 && z.hi > 0.0);
  }
  // Sweep of sizes around the boundary.
  for (std::size_t n = 40; n <= 60; ++n) {
    auto d = gen::binormal(rng, n / 2, n - n / 2, 0.8);
    const double a = *auroc(d.scores, d.labels);
    const bool expect_newcombe = n <= 50 || a == 0.0 || a == 1.0;
    const auto r = auroc_ci_dispatch(d.scores, d.labels, 0.05);
    check(fmt::format("n={} rule", n), (r.method == "newcombe") == expect_newcombe);
  }
  std::string detail = failures.empty() ? "all dispatch cases routed as expected" : "failed:";
  for (const auto& f : failures) detail += " [" + f + "]";
  return {failures.empty(), detail};
}

Outcome permutation_test_calibration() {
  constexpr int kReps = 1000;
  constexpr int kPowerReps = 200;
  constexpr double kAlpha = 0.05;
  const MetricContext ctx{0.5, 0, 0.2};
  PermutationConfig cfg;
  cfg.n_perm = 500;
  std::mt19937_64 rng(606);
  const double shift = gen::binormal_shift(0.75);

  std::map<std::string, double> type_one;
  for (const char* id : {"accuracy", "auroc"}) {
    const auto metric = MetricId::parse(id);
    int rejected = 0, skipped = 0;
    for (int r = 0; r < kReps; ++r) {
      const auto a = binormal_mixed(rng, 100, 0.4, shift);
      const auto b = binormal_mixed(rng, 150, 0.4, shift);
      cfg.seed = static_cast<std::uint64_t>(r);
      const auto t = studentized_permutation_test(metric, to_sample(a), to_sample(b), ctx, cfg);
      if (!t.completed()) {
        ++skipped;
        continue;
      }
      rejected += t.p_raw <= kAlpha;
    }
    type_one[id] = static_cast<double>(rejected) / (kReps - skipped);
  }

  int detected = 0;
  const auto auroc_id = MetricId::parse("auroc");
  for (int r = 0; r < kPowerReps; ++r) {
    const auto a = gen::binormal(rng, 100, 100, gen::binormal_shift(0.85));
    const auto b = gen::binormal(rng, 100, 100, gen::binormal_shift(0.70));
    cfg.seed = static_cast<std::uint64_t>(r);
    const auto t = studentized_permutation_test(auroc_id, to_sample(a), to_sample(b), ctx, cfg);
    detected += t.completed() && t.p_raw <= kAlpha;
  }
  const double power = static_cast<double>(detected) / kPowerReps;

  bool ok = power > kMinPower;
  for (const auto& [id, rate] : type_one) ok &= rate >= kTypeOneLo && rate <= kTypeOneHi;
  return {ok, fmt::format("type-I accuracy {:.3f}, auroc {:.3f}; power at AUROC gap 0.15 {:.3f}", type_one["accuracy"],
                          type_one["auroc"], power)};
}

Outcome holm_bonferroni_check() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int r = 0; r < 1000; ++r) {
    const std::size_t m = 1 + rng() % 20;
    std::vector<double> p(m);
    for (auto& v : p) {
      v = rng() % 5 == 0 ? 0.01 * (1 + rng() % 5) : std::max(u(rng), 1e-9);
    }
    if (holm_bonferroni(p) != oracle::holm(p)) ++mismatches;
  }
  const auto ex = holm_bonferroni(std::vector<double>{0.01, 0.04, 0.03});
  const bool example_ok =
      std::abs(ex[0] - 0.03) < 1e-15 && std::abs(ex[1] - 0.06) < 1e-15 && std::abs(ex[2] - 0.06) < 1e-15;
  return {mismatches == 0 && example_ok,
          fmt::format("{} mismatches in 1000 vectors; example -> {{{:.6g}, {:.6g}, {:.6g}}}", mismatches, ex[0], ex[1],
                      ex[2])};
}

Outcome enumeration_and_complement() {
  std::mt19937_64 rng(808);
  int tables = 0, bad_enum = 0, bad_comp = 0, specs_checked = 0;
  for (; tables < 300; ++tables) {
    const std::size_t k = 1 + rng() % 4;
    const std::size_t n = 1 + rng() % 80;
    std::map<std::string, std::vector<std::string>> cols;
    std::vector<oracle::Row> rows(n);
    for (std::size_t a = 0; a < k; ++a) {
      const std::string name = fmt::format("attr{}", a);
      const std::size_t v = 1 + rng() % 4;
      for (std::size_t r = 0; r < n; ++r) {
        const std::string value = fmt::format("v{}", rng() % v);
        cols[name].push_back(value);
        rows[r][name] = value;
      }
    }
    const auto table =
        EvalTable::from_columns(std::vector<double>(n, 0.5), std::vector<std::uint8_t>(n, 0), cols);
    EnumerationConfig cfg;
    cfg.max_level = 1 + rng() % 4;
    cfg.min_group_size = 1 + rng() % 4;
    const auto specs = enumerate_subgroups(table, cfg);
    std::set<std::string> got;
    for (const auto& s : specs) got.insert(s.id());
    if (got != oracle::subgroups(rows, cfg.max_level, cfg.min_group_size) || got.size() != specs.size()) ++bad_enum;
    for (const auto& s : specs) {
      const std::map<std::string, std::string> cons(s.constraints().begin(), s.constraints().end());
      if (complement_rows(table, s) != oracle::complement(rows, cons)) ++bad_comp;
      ++specs_checked;
    }
  }
  return {bad_enum == 0 && bad_comp == 0,
          fmt::format("{} tables: {} enumeration mismatches; {} complement mismatches over {} specs", tables, bad_enum,
                      bad_comp, specs_checked)};
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"strata"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) fmt::print(stderr, "{}", err.str());
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome end_to_end_determinism() {
  const fs::path dir = fs::temp_directory_path() / "strata_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> z;
    std::ofstream csv(dir / "data.csv");
    csv << "score,label,sex,age\n";
    for (int i = 0; i < 800; ++i) {
      const bool f = u(rng) < 0.5, young = u(rng) < 0.5;
      const bool pos = u(rng) < 0.3;
      const double shift = f && young ? 0.2 : 2.0;
      csv << fmt::format("{:.17g},{},{},{}\n", gen::logistic((pos ? shift : 0.0) - 1.0 + z(rng)), pos ? 1 : 0,
                         f ? "F" : "M", young ? "young" : "old");
    }
  }
  auto args = [&](const char* out) {
    return std::vector<std::string>{"--input",   (dir / "data.csv").string(),
                                    "--attrs",   "sex,age",
                                    "--metrics", "accuracy,auroc,pauprg,drmsce",
                                    "--n-perm",  "1000",
                                    "--n-boot",  "300",
                                    "--seed",    "17",
                                    "--out-dir", (dir / out).string()};
  };
  if (run_cli(args("a")) != 0 || run_cli(args("b")) != 0) return {false, "cli_main failed"};
  const std::string a = slurp(dir / "a" / "results.json");
  const std::string b = slurp(dir / "b" / "results.json");
  const bool identical = !a.empty() && a == b;

  // Stars in the HTML against the JSON p_adj of the same test.
  const auto j = nlohmann::json::parse(a);
  std::map<std::pair<std::string, std::string>, double> p_adj;
  std::size_t completed = 0;
  for (const auto& t : j["tests"]) {
    if (t["status"] != "completed") continue;
    p_adj[{t["group"].get<std::string>(), t["metric"].get<std::string>()}] = t["p_adj"].get<double>();
    ++completed;
  }
  const std::string html = slurp(dir / "a" / "report.html");
  const std::regex re("<text class=\"stars\"[^>]*data-group=\"([^\"]*)\" data-metric=\"([^\"]*)\"[^>]*>([^<]*)<");
  std::size_t rendered = 0, wrong = 0, significant = 0;
  for (auto it = std::sregex_iterator(html.begin(), html.end(), re); it != std::sregex_iterator(); ++it) {
    ++rendered;
    const auto found = p_adj.find({(*it)[1].str(), (*it)[2].str()});
    if (found == p_adj.end() || (*it)[3].str() != to_string(significance_stars(found->second))) ++wrong;
    significant += (*it)[3].str() != "ns";
  }

  const bool boundaries_ok =
      significance_stars(0.02) == Stars::kNotSignificant && significance_stars(std::nextafter(0.01, 1.0)) ==
                                                                 Stars::kNotSignificant &&
      significance_stars(0.01) == Stars::kOne && significance_stars(std::nextafter(0.001, 1.0)) == Stars::kOne &&
      significance_stars(0.001) == Stars::kTwo && significance_stars(0.0005) == Stars::kTwo;
  fs::remove_all(dir);
  return {identical && rendered == completed && wrong == 0 && boundaries_ok,
          fmt::format("results.json {} ({} bytes); {} stars rendered for {} completed tests, {} wrong, {} significant; "
                      "boundaries {}",
                      identical ? "identical" : "DIFFERS", a.size(), rendered, completed, wrong, significant,
                      boundaries_ok ? "ok" : "WRONG")};
}

Outcome planted_disparity_ranking() {
  constexpr int kReps = 200;
  constexpr std::size_t kN = 5000;
  const MetricContext ctx{0.5, 0, 0.2};
  const auto metric = MetricId::parse("auroc");
  const SubgroupSpec planted(std::vector<SubgroupSpec::Constraint>{{"sex", "F"}, {"age", "old"}});
  PermutationConfig pcfg;
  pcfg.n_perm = 100;
  EnumerationConfig ecfg;
  ecfg.max_level = 2;
  ecfg.min_group_size = 30;

  int first = 0;
  std::map<std::string, int> winners;
  for (int rep = 0; rep < kReps; ++rep) {
    std::mt19937_64 rng(1000 + rep);
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> z;
    const char* sexes[] = {"F", "M"};
    const char* ages[] = {"young", "middle", "old"};
    const char* sites[] = {"A", "B", "C"};
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    std::map<std::string, std::vector<std::string>> attrs;
    for (std::size_t i = 0; i < kN; ++i) {
      const std::string sex = sexes[rng() % 2], age = ages[rng() % 3], site = sites[rng() % 3];
      const bool pos = u(rng) < 0.3;
      double s = gen::logistic((pos ? 2.0 : 0.0) - 1.0 + z(rng));
      // Corrupt the planted cell: half its scores are replaced by noise.
      if (sex == "F" && age == "old" && u(rng) < 0.5) s = u(rng);
      scores.push_back(s);
      labels.push_back(pos);
      attrs["sex"].push_back(sex);
      attrs["age"].push_back(age);
      attrs["site"].push_back(site);
    }
    const auto table = EvalTable::from_columns(scores, labels, attrs);
    std::vector<TestResult> tests;
    for (const auto& spec : enumerate_subgroups(table, ecfg)) {
      pcfg.seed = derive_seed(static_cast<std::uint64_t>(rep), {stable_hash(spec.id())});
      auto t = studentized_permutation_test(metric, Sample::gather(table, member_rows(table, spec)),
                                            Sample::gather(table, complement_rows(table, spec)), ctx, pcfg);
      t.group = spec;
      t.metric_id = "auroc";
      tests.push_back(std::move(t));
    }
    const auto ranking = rank_interestingness(tests);
    if (!ranking.empty()) {
      ++winners[ranking.front().group.id()];
      first += ranking.front().group == planted;
    }
  }
  const double rate = static_cast<double>(first) / kReps;
  std::string others;
  for (const auto& [id, count] : winners) {
    if (id != planted.id()) others += fmt::format(" [{}: {}]", id, count);
  }
  return {rate >= kMinPlantedFirst,
          fmt::format("planted cell ranked first in {}/{} replicates ({:.3f}){}", first, kReps, rate,
                      others.empty() ? "" : "; other winners:" + others)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "metric_oracles", metric_oracles},
      {2, "prg_ill_definedness", prg_ill_definedness},
      {3, "drmsce_debiasing", drmsce_debiasing},
      {4, "ci_coverage", ci_coverage},
      {5, "auroc_ci_dispatch", dispatch_rule},
      {6, "permutation_test_calibration", permutation_test_calibration},
      {7, "holm_bonferroni", holm_bonferroni_check},
      {8, "enumeration_and_complement", enumeration_and_complement},
      {9, "end_to_end_determinism", end_to_end_determinism},
      {10, "planted_disparity_ranking", planted_disparity_ranking},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} {:>2} {}: {} ({:.1f}s)\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail, secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
