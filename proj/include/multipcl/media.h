#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "multipcl/common.h"

namespace multipcl::ingest {

/// 8-bit image, row-major, interleaved channels (HWC).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), data(std::size_t(w) * h * c) {}

  std::uint8_t& at(int y, int x, int c) {
    return data[(std::size_t(y) * width + x) * channels + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return data[(std::size_t(y) * width + x) * channels + c];
  }
  Image crop(int x0, int y0, int w, int h) const;
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

/// Ordered frames plus the sampling rate they were taken at.
struct FrameSequence {
  std::vector<Image> frames;
  double source_fps = 0.0;
};

struct Waveform {
  std::vector<double> samples;  // mono, in [-1, 1]
  double sample_rate = 0.0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// ---- raw format codecs (uncompressed fixtures and adapter output) ----

/// YUV4MPEG2 reader; supports C444 and C420 subsampling, converts to RGB.
FrameSequence read_y4m(const std::string& path);
/// Writes RGB frames as C444 YUV4MPEG2.
void write_y4m(const std::string& path, const FrameSequence& seq);

/// PCM WAV reader (16-bit, mono or stereo; stereo is averaged to mono).
Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& wav);

/// Linear-interpolation resampler.
Waveform resample(const Waveform& wav, double target_rate);

/// Narrow adapter around media decoding. The built-in reader handles the raw
/// formats above; when an external `ffmpeg` binary is available, other
/// containers are transcoded through it into the raw formats first.
class MediaReader {
 public:
  virtual ~MediaReader() = default;
  /// Decodes every frame at native fps.
  virtual FrameSequence read_video(const std::string& path) = 0;
  /// Decodes the audio track. For raw y4m video (no audio track) a sidecar
  /// .wav with the same stem is used.
  virtual Waveform read_audio(const std::string& path) = 0;
};

std::unique_ptr<MediaReader> make_media_reader();
bool ffmpeg_available();

}  // namespace multipcl::ingest
