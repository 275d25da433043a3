#include "multipcl/stats.h"

#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

namespace multipcl::corpus {

CorpusStats compute_stats(const std::vector<ManifestEntry>& entries) {
  if (entries.empty()) throw DomainError("compute_stats: empty entry list");
  CorpusStats s;
  double dur0 = 0.0, dur1 = 0.0, chars0 = 0.0, chars1 = 0.0;
  std::size_t pcl_videos = 0;
  for (const ManifestEntry& e : entries) {
    ClassAggregate& cls = (e.label == 1) ? s.pcl : s.non_pcl;
    cls.count += 1;
    cls.duration_hrs += e.duration_s / 3600.0;
    cls.frames += e.duration_s * e.fps;
    (e.label == 1 ? dur1 : dur0) += e.duration_s;
    (e.label == 1 ? chars1 : chars0) += static_cast<double>(utf8_length(e.transcript));
    if (e.label == 1) {
      ++pcl_videos;
      for (const FrameSpan& sp : e.spans) {
        s.span_count += 1;
        s.span_frames += static_cast<double>(sp.frame_count());
        s.span_duration_hrs += sp.duration_s() / 3600.0;
      }
    }
  }
  auto finish = [](ClassAggregate& c, double dur_s, double chars) {
    if (c.count > 0) {
      c.mean_video_len_min = dur_s / 60.0 / static_cast<double>(c.count);
      c.mean_transcript_chars = chars / static_cast<double>(c.count);
    }
  };
  finish(s.non_pcl, dur0, chars0);
  finish(s.pcl, dur1, chars1);
  s.total.count = s.non_pcl.count + s.pcl.count;
  s.total.duration_hrs = s.non_pcl.duration_hrs + s.pcl.duration_hrs;
  s.total.frames = s.non_pcl.frames + s.pcl.frames;
  finish(s.total, dur0 + dur1, chars0 + chars1);
  if (s.span_count > 0) {
    s.mean_span_len_min_per_span =
        s.span_duration_hrs * 60.0 / static_cast<double>(s.span_count);
  }
  if (pcl_videos > 0) {
    s.mean_span_len_min_per_video =
        s.span_duration_hrs * 60.0 / static_cast<double>(pcl_videos);
  }
  return s;
}

std::string render_stats(const CorpusStats& s) {
  std::ostringstream os;
  os << std::fixed;
  auto row = [&os](const std::string& name, double a, double b, double c, int prec) {
    os << std::setprecision(prec) << std::left << std::setw(26) << name << std::right
       << std::setw(12) << a << std::setw(12) << b << std::setw(12) << c << "\n";
  };
  os << std::left << std::setw(26) << "" << std::right << std::setw(12) << "non-PCL"
     << std::setw(12) << "PCL" << std::setw(12) << "total" << "\n";
  row("videos", static_cast<double>(s.non_pcl.count), static_cast<double>(s.pcl.count),
      static_cast<double>(s.total.count), 0);
  row("total len (hrs)", s.non_pcl.duration_hrs, s.pcl.duration_hrs, s.total.duration_hrs, 2);
  row("total frames (M)", s.non_pcl.frames / 1e6, s.pcl.frames / 1e6, s.total.frames / 1e6, 2);
  row("mean video len (min)", s.non_pcl.mean_video_len_min, s.pcl.mean_video_len_min,
      s.total.mean_video_len_min, 2);
  row("mean transcript (chars)", s.non_pcl.mean_transcript_chars, s.pcl.mean_transcript_chars,
      s.total.mean_transcript_chars, 1);
  os << std::setprecision(2);
  os << "spans: " << s.span_count << "  len " << s.span_duration_hrs << " hrs  ("
     << s.span_frames / 1e6 << "M frames)\n";
  os << "mean span len (min): " << s.mean_span_len_min_per_span << " per span, "
     << s.mean_span_len_min_per_video << " per PCL video\n";
  return os.str();
}

std::string stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  auto cls = [](const ClassAggregate& c) {
    nlohmann::ordered_json o;
    o["count"] = c.count;
    o["duration_hrs"] = c.duration_hrs;
    o["frames"] = c.frames;
    o["mean_video_len_min"] = c.mean_video_len_min;
    o["mean_transcript_chars"] = c.mean_transcript_chars;
    return o;
  };
  j["non_pcl"] = cls(s.non_pcl);
  j["pcl"] = cls(s.pcl);
  j["total"] = cls(s.total);
  j["span_count"] = s.span_count;
  j["span_duration_hrs"] = s.span_duration_hrs;
  j["span_frames"] = s.span_frames;
  j["mean_span_len_min_per_span"] = s.mean_span_len_min_per_span;
  j["mean_span_len_min_per_video"] = s.mean_span_len_min_per_video;
  return j.dump();
}

}  // namespace multipcl::corpus
