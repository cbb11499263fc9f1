#include <gtest/gtest.h>

#include <random>

#include "disimpact/error.hpp"
#include "disimpact/export.hpp"
#include "disimpact/time.hpp"
#include "disimpact/windowing.hpp"
#include "support.hpp"

using namespace disimpact;

namespace {

IndexConfig anchored(const char* date) {
  IndexConfig c;
  c.window_anchor = parse_date(date);
  return c;
}

AnnotatedPost post_at(const std::string& ts, ImpactCategory c, const std::string& id = "x") {
  AnnotatedPost p;
  p.post.id = id;
  p.post.created_at = parse_timestamp(ts);
  p.category = c;
  return p;
}

}  // namespace

TEST(AssignWindow, Boundaries) {
  const auto c = anchored("2024-09-02");
  EXPECT_EQ(assign_window(parse_timestamp("2024-09-02T00:00:00Z"), c), 0);
  EXPECT_EQ(assign_window(parse_timestamp("2024-09-08T23:59:59Z"), c), 0);
  EXPECT_EQ(assign_window(parse_timestamp("2024-09-09T00:00:00Z"), c), 1);
  EXPECT_EQ(assign_window(parse_timestamp("2024-10-07T12:00:00Z"), c), 5);
}

TEST(AssignWindow, Errors) {
  try {
    (void)assign_window(parse_timestamp("2024-09-01T23:59:59Z"), anchored("2024-09-02"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BeforeAnchor);
  }
  try {
    (void)assign_window(parse_timestamp("2024-09-03T00:00:00Z"), IndexConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(ResolveAnchor, DerivesMondayOfEarliestPost) {
  const std::vector<AnnotatedPost> posts = {post_at("2024-09-12T08:00:00Z", ImpactCategory::INFR),
                                            post_at("2024-09-05T08:00:00Z", ImpactCategory::INFR)};
  EXPECT_EQ(format_date(resolve_anchor(IndexConfig{}, posts)), "2024-09-02");
  EXPECT_EQ(format_date(resolve_anchor(anchored("2024-08-01"), posts)), "2024-08-01");
  EXPECT_THROW((void)resolve_anchor(IndexConfig{}, {}), Error);
}

TEST(BuildCountSeries, EmptyInputGivesZeroWindows) {
  const auto c = anchored("2024-09-02");
  const auto build = build_count_series({}, c, {parse_date("2024-09-02"), parse_date("2024-09-30")});
  ASSERT_EQ(build.series.size(), 4);
  EXPECT_EQ(build.series.totals().sum(), 0);
}

TEST(BuildCountSeries, DirectCount) {
  const auto c = anchored("2024-09-02");
  std::vector<AnnotatedPost> posts;
  for (int i = 0; i < 3; ++i) posts.push_back(post_at("2024-09-03T10:00:00Z", ImpactCategory::INFR));
  posts.push_back(post_at("2024-09-17T10:00:00Z", ImpactCategory::EVAC));
  const auto build = build_count_series(posts, c, {parse_date("2024-09-02"), parse_date("2024-09-23")});
  const auto& s = build.series;
  ASSERT_EQ(s.size(), 3);
  EXPECT_EQ(s.totals(), (Eigen::Matrix<std::int64_t, 3, 1>() << 3, 0, 1).finished());
  EXPECT_EQ(s.at(0).n(column(ImpactCategory::INFR)), 3);
  EXPECT_EQ(s.at(2).n(column(ImpactCategory::EVAC)), 1);
  EXPECT_EQ(format_date(s.window(2).start), "2024-09-16");
  EXPECT_EQ(build.counted, 4u);
}

TEST(BuildCountSeries, OutsideRangeAndIrrelevantAreReported) {
  const auto c = anchored("2024-09-02");
  auto irrelevant = post_at("2024-09-03T10:00:00Z", ImpactCategory::OTHER);
  irrelevant.relevant = false;
  const std::vector<AnnotatedPost> posts = {post_at("2024-09-03T10:00:00Z", ImpactCategory::INFR),
                                            post_at("2024-09-20T10:00:00Z", ImpactCategory::INFR), irrelevant};
  const auto build = build_count_series(posts, c, {parse_date("2024-09-02"), parse_date("2024-09-09")});
  EXPECT_EQ(build.counted, 1u);
  EXPECT_EQ(build.outside_range, 1u);
  EXPECT_EQ(build.irrelevant_skipped, 1u);
}

TEST(BuildCountSeries, MisalignedRange) {
  const auto c = anchored("2024-09-02");
  try {
    (void)build_count_series({}, c, {parse_date("2024-09-03"), parse_date("2024-09-10")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MisalignedRange);
  }
  EXPECT_THROW((void)build_count_series({}, c, {parse_date("2024-09-02"), parse_date("2024-09-12")}), Error);
}

TEST(BuildCountSeries, TableThreeRedditColumnInOneWindow) {
  const auto series = read_counts_csv(disimpact::testing::fixture("reddit_week/counts.csv"));
  ASSERT_EQ(series.size(), 1);
  const auto w = series.at(0);
  EXPECT_EQ(w.n(column(ImpactCategory::INFR)), 1720);
  EXPECT_EQ(w.n(column(ImpactCategory::SECO)), 1603);
  EXPECT_EQ(w.total, 9666);

  // Same counts rebuilt from individual posts.
  std::vector<AnnotatedPost> posts;
  for (auto c : kAllCategories) {
    for (std::int64_t i = 0; i < w.n(column(c)); ++i) posts.push_back(post_at("2024-09-25T12:00:00Z", c));
  }
  const auto build = build_count_series(posts, anchored("2024-09-23"), {parse_date("2024-09-23"), parse_date("2024-09-30")});
  EXPECT_EQ(build.series.counts, series.counts);
}

class WindowingProperties : public ::testing::Test {
 protected:
  std::vector<AnnotatedPost> random_posts(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> day(0, 69), sec(0, 86399), cat(1, 11);
    std::vector<AnnotatedPost> posts;
    for (int i = 0; i < n; ++i) {
      AnnotatedPost p;
      p.post.created_at = Timestamp{std::chrono::sys_days{parse_date("2024-09-02")}} + std::chrono::days{day(rng)} +
                          std::chrono::seconds{sec(rng)};
      p.category = category_from_code(cat(rng));
      posts.push_back(p);
    }
    return posts;
  }
};

TEST_F(WindowingProperties, ConservationAndZeroFill) {
  std::mt19937_64 rng(11);
  const auto c = anchored("2024-09-02");
  for (int trial = 0; trial < 50; ++trial) {
    const auto posts = random_posts(rng, 1 + trial * 7);
    const auto build = build_count_series(posts, c, {parse_date("2024-09-02"), parse_date("2024-11-11")});
    EXPECT_EQ(build.series.size(), 10);
    EXPECT_EQ(build.series.totals().sum(), static_cast<std::int64_t>(posts.size()));
    for (Eigen::Index t = 0; t < build.series.size(); ++t) {
      EXPECT_EQ(build.series.at(t).total, build.series.counts.row(t).sum());
    }
  }
}

TEST_F(WindowingProperties, ShiftCovariance) {
  std::mt19937_64 rng(12);
  const auto c = anchored("2024-09-02");
  for (int k = 1; k <= 4; ++k) {
    auto posts = random_posts(rng, 150);
    const auto base = build_count_series(posts, c, {parse_date("2024-09-02"), parse_date("2024-12-16")});
    for (auto& p : posts) p.post.created_at += std::chrono::days{7 * k};
    const auto shifted = build_count_series(posts, c, {parse_date("2024-09-02"), parse_date("2024-12-16")});
    const auto rows = base.series.size() - k;
    EXPECT_EQ(shifted.series.counts.bottomRows(rows), base.series.counts.topRows(rows));
    EXPECT_EQ(shifted.series.counts.topRows(k).sum(), 0);
  }
}

TEST(CoveringRange, AlignedToAnchor) {
  const std::vector<AnnotatedPost> posts = {post_at("2024-09-04T00:00:00Z", ImpactCategory::CINJ),
                                            post_at("2024-09-19T00:00:00Z", ImpactCategory::CINJ)};
  const auto r = covering_range(posts, parse_date("2024-09-02"), 7);
  EXPECT_EQ(format_date(r.start), "2024-09-02");
  EXPECT_EQ(format_date(r.end), "2024-09-23");
}
