#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "multipcl/manifest.h"

using namespace multipcl;
using namespace multipcl::corpus;

namespace {

ManifestEntry valid_pcl_entry() {
  ManifestEntry e;
  e.id = "vid1";
  e.video_path = "media/vid1.y4m";
  e.label = 1;
  e.fps = 30.0;
  e.duration_s = 60.0;
  e.transcript = "some words";
  e.community = "elderly";
  e.spans = {{10, 40, 30.0}, {100, 200, 30.0}};
  return e;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("manifest round-trips one PCL entry with two disjoint spans") {
  std::string line = entry_to_json_line(valid_pcl_entry());
  auto entries = parse_manifest(line + "\n");
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].id == "vid1");
  REQUIRE(entries[0].spans.size() == 2);
  CHECK(entries[0].spans[0].start_frame == 10);
  CHECK(entries[0].spans[1].end_frame == 200);
}

TEST_CASE("a label-0 entry carrying a span fails validation naming the entry") {
  ManifestEntry e = valid_pcl_entry();
  e.label = 0;
  std::string line = entry_to_json_line(e);
  CHECK_THROWS_WITH_AS(parse_manifest(line + "\n"), doctest::Contains("vid1"),
                       ValidationError);
}

TEST_CASE("duplicate ids are rejected") {
  std::string line = entry_to_json_line(valid_pcl_entry());
  CHECK_THROWS_AS(parse_manifest(line + "\n" + line + "\n"), ValidationError);
}

TEST_CASE("malformed json names the line number") {
  std::string good = entry_to_json_line(valid_pcl_entry());
  CHECK_THROWS_WITH_AS(parse_manifest(good + "\n{broken\n"), doctest::Contains("line 2"),
                       ParseError);
}

TEST_CASE("span invariants: order, overlap, bounds") {
  ManifestEntry e = valid_pcl_entry();
  SUBCASE("unsorted") {
    std::swap(e.spans[0], e.spans[1]);
    CHECK_THROWS_AS(e.validate(), ValidationError);
  }
  SUBCASE("overlapping") {
    e.spans[1].start_frame = 30;
    CHECK_THROWS_AS(e.validate(), ValidationError);
  }
  SUBCASE("beyond the frame count") {
    e.spans[1].end_frame = 1800;  // 60s * 30fps = frames 0..1799
    CHECK_THROWS_AS(e.validate(), ValidationError);
  }
  SUBCASE("negative start") {
    e.spans[0].start_frame = -1;
    CHECK_THROWS_AS(e.validate(), ValidationError);
  }
}

TEST_CASE("non-positive duration or fps is rejected") {
  ManifestEntry e = valid_pcl_entry();
  e.duration_s = 0.0;
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e = valid_pcl_entry();
  e.fps = -1.0;
  CHECK_THROWS_AS(e.validate(), ValidationError);
}

TEST_CASE("unknown community tags are rejected, known ones pass") {
  ManifestEntry e = valid_pcl_entry();
  e.community = "martians";
  CHECK_THROWS_AS(e.validate(), ValidationError);
  for (const auto& c : kCommunities) {
    e.community = c;
    CHECK_NOTHROW(e.validate());
  }
}

TEST_CASE("unknown fields survive a write/load round-trip") {
  std::string line =
      R"({"id":"x1","video_path":"a.y4m","label":0,"spans":[],"fps":30.0,"duration_s":5.0,)"
      R"("transcript":"","community":"women","annotator_note":"double-checked","views":123})";
  auto entries = parse_manifest(line + "\n");
  REQUIRE(entries.size() == 1);
  std::string out = entry_to_json_line(entries[0]);
  CHECK(out.find("annotator_note") != std::string::npos);
  CHECK(out.find("double-checked") != std::string::npos);
  CHECK(out.find("123") != std::string::npos);
}

TEST_CASE("load_manifest(write_manifest(entries)) reproduces entries field-for-field") {
  std::vector<ManifestEntry> entries;
  entries.push_back(valid_pcl_entry());
  ManifestEntry e2;
  e2.id = "vid2";
  e2.video_path = "media/vid2.y4m";
  e2.label = 0;
  e2.fps = 25.0;
  e2.duration_s = 12.5;
  e2.transcript = "第二个视频";
  e2.community = "children";
  entries.push_back(e2);

  std::string path = temp_file("multipcl_manifest_roundtrip.jsonl");
  write_manifest(entries, path);
  auto loaded = load_manifest(path);
  REQUIRE(loaded.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(loaded[i].id == entries[i].id);
    CHECK(loaded[i].video_path == entries[i].video_path);
    CHECK(loaded[i].label == entries[i].label);
    CHECK(loaded[i].fps == entries[i].fps);
    CHECK(loaded[i].duration_s == entries[i].duration_s);
    CHECK(loaded[i].transcript == entries[i].transcript);
    CHECK(loaded[i].community == entries[i].community);
    REQUIRE(loaded[i].spans.size() == entries[i].spans.size());
    for (std::size_t k = 0; k < entries[i].spans.size(); ++k) {
      CHECK(loaded[i].spans[k].start_frame == entries[i].spans[k].start_frame);
      CHECK(loaded[i].spans[k].end_frame == entries[i].spans[k].end_frame);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("missing manifest file raises a parse error") {
  CHECK_THROWS_AS(load_manifest("/nonexistent/never.jsonl"), ParseError);
}
