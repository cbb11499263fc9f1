#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "disimpact/error.hpp"
#include "disimpact/ingestion.hpp"
#include "disimpact/time.hpp"
#include "support.hpp"

using namespace disimpact;
using disimpact::testing::TempDir;
using disimpact::testing::write_file;

namespace {

std::string post_line(const std::string& id, const std::string& text = "hello") {
  return R"({"id":")" + id + R"(","platform":"reddit","text":")" + text +
         R"(","created_at":"2024-09-26T12:00:00Z"})" + "\n";
}

template <typename F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(ScrubHandles, ReplacesHandles) {
  EXPECT_EQ(scrub_handles("thanks @john_doe for help"), "thanks @user for help");
  EXPECT_EQ(scrub_handles("email me at a@b.com"), "email me at a@user");
  EXPECT_EQ(scrub_handles("no handles here"), "no handles here");
}

TEST(ScrubHandles, EdgeCases) {
  EXPECT_EQ(scrub_handles("@"), "@");
  EXPECT_EQ(scrub_handles("@ space"), "@ space");
  EXPECT_EQ(scrub_handles("@a@b"), "@user@user");
  EXPECT_EQ(scrub_handles("(@x.y_z!)"), "(@user!)");
  EXPECT_EQ(scrub_handles("café @josé"), "café @useré");
}

TEST(ScrubHandles, IdempotentAndLengthPreservingOutsideHandles) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab_.@ !9Z";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 40);
  const std::regex handle("@[A-Za-z0-9_.]+");
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
    const auto once = scrub_handles(s);
    EXPECT_EQ(scrub_handles(once), once) << s;
    // Removing every handle token from both sides leaves identical text.
    EXPECT_EQ(std::regex_replace(s, handle, "@"), std::regex_replace(once, handle, "@")) << s;
  }
}

TEST(LoadPosts, ThreeDistinctLines) {
  TempDir dir("ingest");
  write_file(dir / "posts.jsonl", post_line("a") + post_line("b") + post_line("c"));
  const auto load = load_posts(dir / "posts.jsonl", DisasterTag::Hurricane);
  ASSERT_EQ(load.dataset.posts.size(), 3u);
  EXPECT_EQ(load.dataset.posts[1].id, "b");
  EXPECT_EQ(load.dataset.disaster_tag, DisasterTag::Hurricane);
  EXPECT_EQ(load.report.lines_read, 3u);
  EXPECT_EQ(load.report.kept, 3u);
}

TEST(LoadPosts, DuplicateIdsKeepFirst) {
  TempDir dir("ingest");
  write_file(dir / "posts.jsonl", post_line("abc", "first") + post_line("abc", "second"));
  const auto load = load_posts(dir / "posts.jsonl");
  ASSERT_EQ(load.dataset.posts.size(), 1u);
  EXPECT_EQ(load.dataset.posts[0].text, "first");
  EXPECT_EQ(load.report.dropped_duplicate, 1u);
}

TEST(LoadPosts, MalformedLineIsolated) {
  TempDir dir("ingest");
  write_file(dir / "posts.jsonl", post_line("a") + "{not json\n");
  const auto load = load_posts(dir / "posts.jsonl");
  EXPECT_EQ(load.dataset.posts.size(), 1u);
  EXPECT_EQ(load.report.dropped_malformed, 1u);
  ASSERT_EQ(load.report.malformed.size(), 1u);
  EXPECT_EQ(load.report.malformed[0].line_number, 2u);
}

TEST(LoadPosts, AbortsWhenMostLinesMalformed) {
  TempDir dir("ingest");
  write_file(dir / "posts.jsonl", post_line("a") + "x\n" + "{\"id\":1}\n");
  expect_error(ErrorCode::MalformedInput, [&] { (void)load_posts(dir / "posts.jsonl"); });
}

TEST(LoadPosts, MissingFile) {
  expect_error(ErrorCode::FileNotFound, [] { (void)load_posts("/nonexistent/posts.jsonl"); });
}

TEST(LoadPosts, ScrubsTextAndParsesOptionalFields) {
  TempDir dir("ingest");
  write_file(dir / "posts.jsonl",
             R"({"id":"p","platform":"TikTok","text":"hi @bob","created_at":"2024-09-26T12:00:00-04:00",)"
             R"("media_refs":["v/1.mp4"],"location_metadata":"Tampa, FL"})"
             "\n");
  const auto load = load_posts(dir / "posts.jsonl");
  ASSERT_EQ(load.dataset.posts.size(), 1u);
  const auto& p = load.dataset.posts[0];
  EXPECT_EQ(p.text, "hi @user");
  EXPECT_EQ(p.platform, Platform::TikTok);
  EXPECT_EQ(format_timestamp(p.created_at), "2024-09-26T16:00:00Z");
  EXPECT_EQ(p.media_refs, std::vector<std::string>{"v/1.mp4"});
  EXPECT_EQ(p.location_metadata, "Tampa, FL");
}

TEST(LoadPosts, DeterministicAcrossLoads) {
  TempDir dir("ingest");
  write_file(dir / "posts.jsonl", post_line("a", "x @y") + post_line("a") + "bad\n" + post_line("b"));
  const auto first = load_posts(dir / "posts.jsonl");
  const auto second = load_posts(dir / "posts.jsonl");
  EXPECT_EQ(first.dataset.posts, second.dataset.posts);
  EXPECT_EQ(first.report.kept, second.report.kept);
  std::ostringstream a, b;
  write_posts(a, first.dataset.posts);
  write_posts(b, second.dataset.posts);
  EXPECT_EQ(a.str(), b.str());
}

TEST(PostJson, RoundTrip) {
  Post p{"id1", Platform::YouTube, "text \"quoted\"", {"m1", "m2"}, parse_timestamp("2024-10-01T00:00:00Z"),
         std::string("Tampa, FL")};
  EXPECT_EQ(parse_post_json(post_to_json(p)), p);
  p.location_metadata.reset();
  EXPECT_EQ(parse_post_json(post_to_json(p)), p);
}

TEST(GroundTruth, DirectParse) {
  TempDir dir("gt");
  write_file(dir / "gt.csv", "week_start,value\n2024-09-02,5.0\n2024-09-09,7.5\n");
  const auto gt = load_ground_truth(dir / "gt.csv");
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_DOUBLE_EQ(gt.entries[1].value, 7.5);
  EXPECT_TRUE(gt.filled_weeks.empty());
}

TEST(GroundTruth, GapIsZeroFilledAndReported) {
  TempDir dir("gt");
  write_file(dir / "gt.csv", "week_start,value\n2024-09-16,1.0\n2024-09-02,5.0\n");
  const auto gt = load_ground_truth(dir / "gt.csv");
  ASSERT_EQ(gt.size(), 3u);
  EXPECT_EQ(format_date(gt.entries[1].week_start), "2024-09-09");
  EXPECT_DOUBLE_EQ(gt.entries[1].value, 0.0);
  ASSERT_EQ(gt.filled_weeks.size(), 1u);
  EXPECT_EQ(format_date(gt.filled_weeks[0]), "2024-09-09");
}

TEST(GroundTruth, Errors) {
  TempDir dir("gt");
  write_file(dir / "neg.csv", "week_start,value\n2024-09-02,-1.0\n");
  expect_error(ErrorCode::NegativeValue, [&] { (void)load_ground_truth(dir / "neg.csv"); });
  write_file(dir / "dup.csv", "week_start,value\n2024-09-02,1\n2024-09-02,2\n");
  expect_error(ErrorCode::MalformedCsv, [&] { (void)load_ground_truth(dir / "dup.csv"); });
  write_file(dir / "grid.csv", "week_start,value\n2024-09-02,1\n2024-09-05,2\n");
  expect_error(ErrorCode::MalformedCsv, [&] { (void)load_ground_truth(dir / "grid.csv"); });
  write_file(dir / "hdr.csv", "week,value\n2024-09-02,1\n");
  expect_error(ErrorCode::MalformedCsv, [&] { (void)load_ground_truth(dir / "hdr.csv"); });
}

class LabelsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write_file(dir_ / "posts.jsonl", post_line("p1") + post_line("p2"));
    dataset_ = load_posts(dir_ / "posts.jsonl").dataset;
  }
  LabelJoin load(const std::string& body) {
    write_file(dir_ / "labels.csv", "post_id,category_code\n" + body);
    return load_labels(dir_ / "labels.csv", dataset_);
  }
  TempDir dir_{"labels"};
  Dataset dataset_;
};

TEST_F(LabelsTest, JoinsLabel) {
  const auto join = load("p1,3\n");
  ASSERT_EQ(join.annotated.size(), 1u);
  EXPECT_EQ(join.annotated[0].post.id, "p1");
  EXPECT_EQ(join.annotated[0].category, ImpactCategory::INFR);
  EXPECT_EQ(join.unlabeled, std::vector<std::string>{"p2"});
}

TEST_F(LabelsTest, OtherCode) {
  const auto join = load("p1,11\np2,1\n");
  EXPECT_EQ(join.annotated[0].category, ImpactCategory::OTHER);
  EXPECT_TRUE(join.unlabeled.empty());
}

TEST_F(LabelsTest, Errors) {
  expect_error(ErrorCode::UnknownPostId, [&] { (void)load("p9,3\n"); });
  expect_error(ErrorCode::OutOfRange, [&] { (void)load("p1,12\n"); });
  expect_error(ErrorCode::MalformedCsv, [&] { (void)load("p1,3\np1,4\n"); });
}
