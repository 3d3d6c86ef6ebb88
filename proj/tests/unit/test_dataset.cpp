#include <algorithm>
#include <filesystem>
#include <functional>
#include <numeric>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "strata/dataset.hpp"
#include "strata/error.hpp"

using namespace strata;

namespace {

EvalTable parse(const std::string& text, std::vector<std::string> attrs = {"sex"}) {
  std::istringstream in(text);
  return ingest_csv(in, "score", "label", attrs);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Ingest, FourRowExample) {
  const auto t = parse("score,label,sex\n0.9,1,F\n0.4,1,F\n0.6,0,M\n0.1,0,M\n");
  EXPECT_EQ(t.row_count(), 4u);
  EXPECT_DOUBLE_EQ(base_rate(t, t.all_rows()), 0.5);
  EXPECT_EQ(t.attribute("sex").value(2), "M");
  EXPECT_EQ(t.scores()[1], 0.4);
}

TEST(Ingest, ScoreOutOfRangeNamesRow) {
  const auto msg = message_of([] { parse("score,label,sex\n0.5,1,F\n1.2,0,M\n"); });
  EXPECT_NE(msg.find("row 2"), std::string::npos);
  EXPECT_NE(msg.find("score outside [0,1]"), std::string::npos);
  EXPECT_EQ(kind_of([] { parse("score,label,sex\n1.2,0,M\n"); }), ErrorKind::kValue);
}

TEST(Ingest, EmptyAttributeCellBecomesMissingCategory) {
  const auto t = parse("score,label,sex\n0.1,0,F\n0.2,1,M\n0.3,1,\n0.4,0,\"\"\n");
  EXPECT_EQ(t.attribute("sex").value(2), kMissingCategory);
  EXPECT_EQ(t.attribute("sex").value(3), kMissingCategory);
  EXPECT_EQ(t.attribute("sex").levels.size(), 3u);
}

TEST(Ingest, RejectsMalformedRows) {
  EXPECT_NE(message_of([] { parse("score,label,sex\n,1,F\n"); }).find("missing score"), std::string::npos);
  EXPECT_NE(message_of([] { parse("score,label,sex\n0.3,,F\n"); }).find("missing label"), std::string::npos);
  EXPECT_NE(message_of([] { parse("score,label,sex\nabc,1,F\n"); }).find("non-numeric score"), std::string::npos);
  EXPECT_NE(message_of([] { parse("score,label,sex\n0.5,2,F\n"); }).find("label outside {0,1}"), std::string::npos);
  EXPECT_EQ(kind_of([] { parse("score,label,sex\nnan,1,F\n"); }), ErrorKind::kValue);
}

TEST(Ingest, MissingColumnAndFile) {
  EXPECT_EQ(kind_of([] { parse("score,label\n0.5,1\n"); }), ErrorKind::kColumnMissing);
  EXPECT_EQ(kind_of([] { ingest_csv("/nonexistent/x.csv", "score", "label", {}); }), ErrorKind::kFileNotFound);
}

TEST(Ingest, QuotedFieldsCrlfAndBom) {
  const auto t = parse("\xEF\xBB\xBFscore,label,site\r\n0.25,1,\"a, \"\"quoted\"\"\nsite\"\r\n\r\n0.75,0,b\r\n", {"site"});
  EXPECT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.attribute("site").value(0), "a, \"quoted\"\nsite");
}

TEST(Ingest, RoundTripThroughCanonicalCsv) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  std::vector<std::string> sex, site;
  for (int i = 0; i < 200; ++i) {
    s.push_back(u(rng));
    y.push_back(u(rng) < 0.3);
    sex.push_back(u(rng) < 0.5 ? "F" : "M");
    site.push_back(u(rng) < 0.1 ? "" : (u(rng) < 0.5 ? "north, east" : "so\"uth"));
  }
  const auto table = EvalTable::from_columns(s, y, {{"sex", sex}, {"site", site}});
  std::ostringstream out;
  write_csv(table, out);
  std::istringstream in(out.str());
  const auto back = ingest_csv(in, "score", "label", {"sex", "site"});
  EXPECT_TRUE(back == table);

  // Through the filesystem as well.
  const auto path = std::filesystem::temp_directory_path() / "strata_roundtrip.csv";
  std::ofstream(path) << out.str();
  EXPECT_TRUE(ingest_csv(path, "score", "label", {"sex", "site"}) == table);
  std::filesystem::remove(path);
}

TEST(Ingest, ValueColumns) {
  std::istringstream in("score,label,dice\n0.5,1,0.25\n0.5,0,0.75\n");
  const auto t = ingest_csv(in, "score", "label", {}, {"dice"});
  ASSERT_EQ(t.value_column_index("dice"), 0);
  EXPECT_EQ(t.value_columns()[0].values[1], 0.75);
  EXPECT_EQ(t.value_column_index("other"), -1);
}

TEST(Table, ValidatesInvariants) {
  EXPECT_THROW(EvalTable({0.5, 1.5}, {0, 1}), Error);
  EXPECT_THROW(EvalTable({0.5, 0.5}, {0, 2}), Error);
  EXPECT_THROW(EvalTable({0.5}, {0, 1}), Error);
  EXPECT_EQ(kind_of([] {
              EvalTable::from_columns({0.5}, {1}, {}).attribute("sex");
            }),
            ErrorKind::kUnknownAttribute);
}

TEST(BaseRate, Examples) {
  const auto a = EvalTable::from_columns({0.1, 0.2, 0.3, 0.4}, {1, 1, 0, 0});
  const auto b = EvalTable::from_columns({0.1, 0.2, 0.3}, {0, 0, 0});
  const auto c = EvalTable::from_columns({0.1, 0.2, 0.3, 0.4}, {1, 0, 0, 0});
  EXPECT_EQ(base_rate(a, a.all_rows()), 0.5);
  EXPECT_EQ(base_rate(b, b.all_rows()), 0.0);
  EXPECT_EQ(base_rate(c, c.all_rows()), 0.25);
  EXPECT_EQ(kind_of([&] { base_rate(a, {}); }), ErrorKind::kEmptySelection);
}

TEST(BaseRate, InvariantUnderRowPermutation) {
  std::mt19937_64 rng(11);
  std::vector<double> s(97);
  std::vector<std::uint8_t> y(97);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<double>(i) / 97.0;
    y[i] = rng() % 3 == 0;
  }
  const auto t1 = EvalTable::from_columns(s, y);
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> s2;
  std::vector<std::uint8_t> y2;
  for (auto p : perm) {
    s2.push_back(s[p]);
    y2.push_back(y[p]);
  }
  const auto t2 = EvalTable::from_columns(s2, y2);
  EXPECT_EQ(base_rate(t1, t1.all_rows()), base_rate(t2, t2.all_rows()));
}

TEST(Threshold, ParseAndResolve) {
  const auto t = EvalTable::from_columns({0.9, 0.8, 0.3, 0.2}, {1, 0, 0, 0});
  EXPECT_EQ(resolve_threshold(ThresholdRule::fixed(0.3), t, t.all_rows()), 0.3);
  EXPECT_EQ(resolve_threshold(ThresholdRule::base_rate(), t, t.all_rows()), 0.25);
  EXPECT_EQ(ThresholdRule::parse("fixed:0.3").value, 0.3);
  EXPECT_EQ(ThresholdRule::parse("base-rate").kind, ThresholdRule::Kind::kBaseRate);
  EXPECT_EQ(ThresholdRule::parse("max-gmean").kind, ThresholdRule::Kind::kMaxGmean);
  EXPECT_EQ(ThresholdRule::parse("fixed:0.25").to_string(), "fixed:0.25");
  const auto msg = message_of([] { ThresholdRule::parse("fixed:1.5"); });
  EXPECT_NE(msg.find("outside [0,1]"), std::string::npos);
  EXPECT_EQ(kind_of([] { ThresholdRule::parse("median"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([] { ThresholdRule::parse("fixed:abc"); }), ErrorKind::kConfig);
}

TEST(Threshold, MaxGmeanExample) {
  const std::vector<double> s = {0.9, 0.8, 0.3, 0.2};
  const std::vector<std::uint8_t> y = {1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(max_gmean_threshold(s, y), 0.55);
  EXPECT_EQ(oracle::gmean_at(s, y, 0.55), 1.0);
  const auto t = EvalTable::from_columns({0.5, 0.6}, {1, 1});
  EXPECT_EQ(kind_of([&] { resolve_threshold(ThresholdRule::max_gmean(), t, t.all_rows()); }), ErrorKind::kOneClassOnly);
}

TEST(Threshold, MaxGmeanMatchesExhaustiveSweep) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 12) / 11.0;  // ties on purpose
      y[i] = rng() % 2;
    }
    y[0] = 1;
    y[1] = 0;
    const double t = max_gmean_threshold(s, y);
    EXPECT_NEAR(oracle::gmean_at(s, y, t), oracle::best_gmean(s, y), 1e-15);
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 1.0);
  }
}
