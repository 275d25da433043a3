#include "multipcl/manifest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace multipcl::corpus {

using ordered_json = nlohmann::ordered_json;

long ManifestEntry::total_frames() const {
  return static_cast<long>(std::floor(duration_s * fps + 1e-9));
}

void ManifestEntry::validate() const {
  auto fail = [this](const std::string& what) {
    throw ValidationError("entry '" + id + "': " + what);
  };
  if (id.empty()) throw ValidationError("entry with empty id");
  if (label != 0 && label != 1) fail("label must be 0 or 1");
  if (!(duration_s > 0.0)) fail("duration_s must be > 0");
  if (!(fps > 0.0)) fail("fps must be > 0");
  if (label == 0 && !spans.empty()) fail("non-PCL entry carries facial spans");
  if (!community.empty() &&
      std::find(kCommunities.begin(), kCommunities.end(), community) == kCommunities.end()) {
    fail("unknown community tag '" + community + "'");
  }
  long total = total_frames();
  long prev_end = -1;
  for (const FrameSpan& s : spans) {
    if (!(s.fps > 0.0)) fail("span fps must be > 0");
    if (s.start_frame < 0 || s.start_frame > s.end_frame) fail("span start/end out of order");
    if (s.end_frame >= total) fail("span exceeds video frame count");
    if (s.start_frame <= prev_end) fail("spans overlap or are unsorted");
    prev_end = s.end_frame;
  }
}

ManifestEntry entry_from_json_line(const std::string& line, std::size_t line_no) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ParseError("manifest line " + std::to_string(line_no) + ": record is not an object");
  }
  ManifestEntry e;
  try {
    e.id = j.at("id").get<std::string>();
    e.video_path = j.value("video_path", std::string());
    e.label = j.at("label").get<int>();
    e.fps = j.at("fps").get<double>();
    e.duration_s = j.at("duration_s").get<double>();
    e.transcript = j.value("transcript", std::string());
    e.community = j.value("community", std::string());
    if (j.contains("spans")) {
      for (const auto& sp : j.at("spans")) {
        if (!sp.is_array() || sp.size() != 2) {
          throw ParseError("manifest line " + std::to_string(line_no) +
                           ": span must be a [start,end] pair");
        }
        FrameSpan fs;
        fs.start_frame = sp[0].get<long>();
        fs.end_frame = sp[1].get<long>();
        fs.fps = e.fps;
        e.spans.push_back(fs);
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("manifest line " + std::to_string(line_no) + ": " + ex.what());
  }
  static const std::set<std::string> known = {"id",         "video_path", "label",
                                              "spans",      "fps",        "duration_s",
                                              "transcript", "community"};
  ordered_json extras = ordered_json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) extras[it.key()] = it.value();
  }
  if (!extras.empty()) e.extra_json = extras.dump();
  return e;
}

std::string entry_to_json_line(const ManifestEntry& e) {
  ordered_json j;
  j["id"] = e.id;
  j["video_path"] = e.video_path;
  j["label"] = e.label;
  auto spans = ordered_json::array();
  for (const FrameSpan& s : e.spans) spans.push_back({s.start_frame, s.end_frame});
  j["spans"] = spans;
  j["fps"] = e.fps;
  j["duration_s"] = e.duration_s;
  j["transcript"] = e.transcript;
  j["community"] = e.community;
  if (!e.extra_json.empty()) {
    ordered_json extras = ordered_json::parse(e.extra_json);
    for (auto it = extras.begin(); it != extras.end(); ++it) j[it.key()] = it.value();
  }
  return j.dump();
}

std::vector<ManifestEntry> parse_manifest(const std::string& contents) {
  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ManifestEntry e = entry_from_json_line(line, line_no);
    e.validate();
    if (!seen.insert(e.id).second) {
      throw ValidationError("duplicate manifest id '" + e.id + "'");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open manifest file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot open '" + path + "' for writing");
  for (const ManifestEntry& e : entries) out << entry_to_json_line(e) << "\n";
}

}  // namespace multipcl::corpus
