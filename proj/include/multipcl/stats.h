#pragma once

#include <string>
#include <vector>

#include "multipcl/manifest.h"

namespace multipcl::corpus {

struct ClassAggregate {
  std::size_t count = 0;
  double duration_hrs = 0.0;
  double frames = 0.0;
  double mean_video_len_min = 0.0;
  double mean_transcript_chars = 0.0;
};

/// Corpus-level summary: per-class aggregates plus span statistics taken over
/// label-1 entries only. Mean span length is reported both per span and per
/// video since either convention is defensible.
struct CorpusStats {
  ClassAggregate non_pcl;  // label 0
  ClassAggregate pcl;      // label 1
  ClassAggregate total;
  std::size_t span_count = 0;
  double span_duration_hrs = 0.0;
  double span_frames = 0.0;
  double mean_span_len_min_per_span = 0.0;
  double mean_span_len_min_per_video = 0.0;
};

CorpusStats compute_stats(const std::vector<ManifestEntry>& entries);

std::string render_stats(const CorpusStats& s);
std::string stats_to_json(const CorpusStats& s);

}  // namespace multipcl::corpus
