#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "multipcl/common.h"

namespace multipcl::corpus {

/// Annotated interval of frames within a video, inclusive on both ends.
/// Spans are stored in frame indices plus the source fps, so they stay exact
/// regardless of how the media is later resampled.
struct FrameSpan {
  long start_frame = 0;
  long end_frame = 0;
  double fps = 0.0;

  long frame_count() const { return end_frame - start_frame + 1; }
  double duration_s() const { return static_cast<double>(frame_count()) / fps; }
};

inline const std::vector<std::string> kCommunities = {
    "disabled", "women", "elderly", "children", "single-parent", "low-income"};

/// One corpus video: media location, binary label, annotated facial-expression
/// spans (label-1 videos only), transcript, and source timing.
struct ManifestEntry {
  std::string id;
  std::string video_path;
  int label = 0;  // 0 = non-PCL, 1 = PCL
  std::vector<FrameSpan> spans;
  std::string transcript;
  double duration_s = 0.0;
  double fps = 0.0;
  std::string community;
  // Unknown manifest fields, preserved verbatim on round-trip.
  std::string extra_json;

  long total_frames() const;
  /// Throws ValidationError naming this entry on any invariant violation.
  void validate() const;
};

/// Reads a line-delimited manifest (one JSON record per line). Entries keep
/// file order; ids must be unique; every entry is validated.
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// Parses manifest records from an already-loaded string (same format).
std::vector<ManifestEntry> parse_manifest(const std::string& contents);

/// Writes entries back to the line-delimited format, known fields first,
/// preserved unknown fields after them.
void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);

std::string entry_to_json_line(const ManifestEntry& entry);
ManifestEntry entry_from_json_line(const std::string& line, std::size_t line_no);

}  // namespace multipcl::corpus
