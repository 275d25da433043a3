#include "multipcl/media.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace multipcl::ingest {

namespace fs = std::filesystem;

Image Image::crop(int x0, int y0, int w, int h) const {
  x0 = std::clamp(x0, 0, width);
  y0 = std::clamp(y0, 0, height);
  w = std::clamp(w, 0, width - x0);
  h = std::clamp(h, 0, height - y0);
  Image out(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) out.at(y, x, c) = at(y0 + y, x0 + x, c);
  return out;
}

namespace {

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Full-range BT.601 conversions. Grays (R=G=B) map to U=V=128 and round-trip
// exactly, which the fixture generators rely on.
void rgb_to_yuv(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t& y,
                std::uint8_t& u, std::uint8_t& v) {
  y = clamp_u8(0.299 * r + 0.587 * g + 0.114 * b);
  u = clamp_u8(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b);
  v = clamp_u8(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b);
}

void yuv_to_rgb(std::uint8_t y, std::uint8_t u, std::uint8_t v, std::uint8_t& r,
                std::uint8_t& g, std::uint8_t& b) {
  r = clamp_u8(y + 1.402 * (v - 128.0));
  g = clamp_u8(y - 0.344136 * (u - 128.0) - 0.714136 * (v - 128.0));
  b = clamp_u8(y + 1.772 * (u - 128.0));
}

struct Y4mHeader {
  int width = 0, height = 0;
  int fps_num = 0, fps_den = 1;
  std::string colorspace = "C420";
};

Y4mHeader parse_y4m_header(const std::string& line, const std::string& path) {
  if (line.rfind("YUV4MPEG2", 0) != 0) {
    throw IngestError("'" + path + "': not a YUV4MPEG2 stream");
  }
  Y4mHeader h;
  std::istringstream in(line);
  std::string tok;
  in >> tok;  // magic
  while (in >> tok) {
    if (tok.empty()) continue;
    switch (tok[0]) {
      case 'W': h.width = std::atoi(tok.c_str() + 1); break;
      case 'H': h.height = std::atoi(tok.c_str() + 1); break;
      case 'F': {
        if (std::sscanf(tok.c_str() + 1, "%d:%d", &h.fps_num, &h.fps_den) != 2) {
          throw IngestError("'" + path + "': bad frame-rate token " + tok);
        }
        break;
      }
      case 'C': h.colorspace = tok; break;
      default: break;  // interlacing / aspect tokens ignored
    }
  }
  if (h.width <= 0 || h.height <= 0 || h.fps_num <= 0 || h.fps_den <= 0) {
    throw IngestError("'" + path + "': incomplete y4m header");
  }
  return h;
}

}  // namespace

FrameSequence read_y4m(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open video '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw IngestError("'" + path + "': empty file");
  Y4mHeader h = parse_y4m_header(header, path);
  bool c444 = h.colorspace.rfind("C444", 0) == 0;
  bool c420 = h.colorspace.rfind("C420", 0) == 0;
  if (!c444 && !c420) {
    throw IngestError("'" + path + "': unsupported colorspace " + h.colorspace);
  }
  std::size_t ysz = std::size_t(h.width) * h.height;
  std::size_t csz = c444 ? ysz : ysz / 4;
  int cw = c444 ? h.width : h.width / 2;

  FrameSequence seq;
  seq.source_fps = static_cast<double>(h.fps_num) / h.fps_den;
  std::string frame_line;
  std::vector<std::uint8_t> buf(ysz + 2 * csz);
  while (std::getline(in, frame_line)) {
    if (frame_line.rfind("FRAME", 0) != 0) {
      throw IngestError("'" + path + "': malformed frame marker");
    }
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
      throw IngestError("'" + path + "': truncated frame payload");
    }
    Image img(h.width, h.height, 3);
    const std::uint8_t* yp = buf.data();
    const std::uint8_t* up = buf.data() + ysz;
    const std::uint8_t* vp = buf.data() + ysz + csz;
    for (int y = 0; y < h.height; ++y) {
      for (int x = 0; x < h.width; ++x) {
        std::size_t ci = c444 ? (std::size_t(y) * h.width + x)
                              : (std::size_t(y / 2) * cw + x / 2);
        std::uint8_t r, g, b;
        yuv_to_rgb(yp[std::size_t(y) * h.width + x], up[ci], vp[ci], r, g, b);
        img.at(y, x, 0) = r;
        img.at(y, x, 1) = g;
        img.at(y, x, 2) = b;
      }
    }
    seq.frames.push_back(std::move(img));
  }
  if (seq.frames.empty()) throw IngestError("'" + path + "': no decodable frames");
  return seq;
}

void write_y4m(const std::string& path, const FrameSequence& seq) {
  if (seq.frames.empty()) throw IngestError("write_y4m: no frames");
  const Image& f0 = seq.frames[0];
  // represent fps as a rational with a fixed denominator
  int den = 1000;
  int num = static_cast<int>(std::lround(seq.source_fps * den));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot open '" + path + "' for writing");
  out << "YUV4MPEG2 W" << f0.width << " H" << f0.height << " F" << num << ":" << den
      << " Ip A1:1 C444\n";
  std::size_t ysz = std::size_t(f0.width) * f0.height;
  std::vector<std::uint8_t> yb(ysz), ub(ysz), vb(ysz);
  for (const Image& img : seq.frames) {
    if (!img.same_shape(f0)) throw IngestError("write_y4m: frames differ in shape");
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        std::uint8_t r = img.at(y, x, 0);
        std::uint8_t g = img.channels > 1 ? img.at(y, x, 1) : r;
        std::uint8_t b = img.channels > 2 ? img.at(y, x, 2) : r;
        std::size_t i = std::size_t(y) * img.width + x;
        rgb_to_yuv(r, g, b, yb[i], ub[i], vb[i]);
      }
    }
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(yb.data()), static_cast<std::streamsize>(ysz));
    out.write(reinterpret_cast<const char*>(ub.data()), static_cast<std::streamsize>(ysz));
    out.write(reinterpret_cast<const char*>(vb.data()), static_cast<std::streamsize>(ysz));
  }
}

namespace {

std::uint32_t read_u32le(std::istream& in) {
  std::uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

std::uint16_t read_u16le(std::istream& in) {
  std::uint8_t b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(std::uint16_t(b[0]) | std::uint16_t(b[1]) << 8);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  std::uint8_t b[4] = {std::uint8_t(v), std::uint8_t(v >> 8), std::uint8_t(v >> 16),
                       std::uint8_t(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16le(std::ostream& out, std::uint16_t v) {
  std::uint8_t b[2] = {std::uint8_t(v), std::uint8_t(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open audio '" + path + "'");
  char tag[5] = {0};
  in.read(tag, 4);
  if (std::strncmp(tag, "RIFF", 4) != 0) throw IngestError("'" + path + "': not a RIFF file");
  read_u32le(in);  // riff size
  in.read(tag, 4);
  if (std::strncmp(tag, "WAVE", 4) != 0) throw IngestError("'" + path + "': not a WAVE file");

  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<std::int16_t> pcm;
  while (in.read(tag, 4)) {
    std::uint32_t size = read_u32le(in);
    if (std::strncmp(tag, "fmt ", 4) == 0) {
      std::uint16_t fmt = read_u16le(in);
      channels = read_u16le(in);
      rate = read_u32le(in);
      read_u32le(in);  // byte rate
      read_u16le(in);  // block align
      bits = read_u16le(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      if (fmt != 1 || bits != 16) {
        throw IngestError("'" + path + "': only 16-bit PCM WAV is supported");
      }
    } else if (std::strncmp(tag, "data", 4) == 0) {
      pcm.resize(size / 2);
      in.read(reinterpret_cast<char*>(pcm.data()), size);
      if (static_cast<std::uint32_t>(in.gcount()) != size) {
        throw IngestError("'" + path + "': truncated data chunk");
      }
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (rate == 0 || channels == 0) throw IngestError("'" + path + "': missing fmt chunk");
  if (pcm.empty()) throw IngestError("'" + path + "': missing data chunk");

  Waveform w;
  w.sample_rate = rate;
  std::size_t n = pcm.size() / channels;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) acc += pcm[i * channels + c];
    w.samples[i] = acc / channels / 32768.0;
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& wav) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot open '" + path + "' for writing");
  std::uint32_t rate = static_cast<std::uint32_t>(std::lround(wav.sample_rate));
  std::uint32_t data_size = static_cast<std::uint32_t>(wav.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32le(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32le(out, 16);
  write_u16le(out, 1);   // PCM
  write_u16le(out, 1);   // mono
  write_u32le(out, rate);
  write_u32le(out, rate * 2);
  write_u16le(out, 2);
  write_u16le(out, 16);
  out.write("data", 4);
  write_u32le(out, data_size);
  for (double s : wav.samples) {
    double v = std::clamp(s, -1.0, 1.0) * 32767.0;
    auto pcm = static_cast<std::int16_t>(std::lround(v));
    std::uint8_t b[2] = {std::uint8_t(std::uint16_t(pcm)),
                         std::uint8_t(std::uint16_t(pcm) >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
  }
}

Waveform resample(const Waveform& wav, double target_rate) {
  if (wav.sample_rate <= 0 || target_rate <= 0) {
    throw DomainError("resample: rates must be positive");
  }
  if (wav.sample_rate == target_rate) return wav;
  Waveform out;
  out.sample_rate = target_rate;
  std::size_t n = static_cast<std::size_t>(
      std::floor(static_cast<double>(wav.samples.size()) * target_rate / wav.sample_rate));
  out.samples.resize(n);
  double step = wav.sample_rate / target_rate;
  for (std::size_t i = 0; i < n; ++i) {
    double pos = static_cast<double>(i) * step;
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    double a = wav.samples[std::min(lo, wav.samples.size() - 1)];
    double b = wav.samples[std::min(lo + 1, wav.samples.size() - 1)];
    out.samples[i] = a + frac * (b - a);
  }
  return out;
}

namespace {

bool has_extension(const std::string& path, const char* ext) {
  auto e = fs::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

class BuiltinMediaReader : public MediaReader {
 public:
  FrameSequence read_video(const std::string& path) override {
    if (!has_extension(path, ".y4m")) {
      throw IngestError("'" + path + "': unsupported container (no external decoder found); "
                        "expected .y4m");
    }
    return read_y4m(path);
  }

  Waveform read_audio(const std::string& path) override {
    if (has_extension(path, ".wav")) return read_wav(path);
    // sidecar audio next to a raw video file
    fs::path side = fs::path(path).replace_extension(".wav");
    if (fs::exists(side)) return read_wav(side.string());
    throw IngestError("'" + path + "': no audio track or sidecar .wav found");
  }
};

class FfmpegMediaReader : public MediaReader {
 public:
  FrameSequence read_video(const std::string& path) override {
    if (has_extension(path, ".y4m")) return read_y4m(path);
    fs::path tmp = fs::temp_directory_path() /
                   ("multipcl_dec_" + std::to_string(::getpid()) + ".y4m");
    std::string cmd = "ffmpeg -v error -y -i '" + path + "' -pix_fmt yuv444p '" +
                      tmp.string() + "'";
    if (std::system(cmd.c_str()) != 0) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IngestError("'" + path + "': ffmpeg failed to decode video");
    }
    FrameSequence seq = read_y4m(tmp.string());
    std::error_code ec;
    fs::remove(tmp, ec);
    return seq;
  }

  Waveform read_audio(const std::string& path) override {
    if (has_extension(path, ".wav")) return read_wav(path);
    if (has_extension(path, ".y4m")) return BuiltinMediaReader().read_audio(path);
    fs::path tmp = fs::temp_directory_path() /
                   ("multipcl_dec_" + std::to_string(::getpid()) + ".wav");
    std::string cmd = "ffmpeg -v error -y -i '" + path + "' -ac 1 -acodec pcm_s16le '" +
                      tmp.string() + "'";
    if (std::system(cmd.c_str()) != 0) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IngestError("'" + path + "': ffmpeg failed to decode audio");
    }
    Waveform w = read_wav(tmp.string());
    std::error_code ec;
    fs::remove(tmp, ec);
    return w;
  }
};

}  // namespace

bool ffmpeg_available() {
  static int cached = -1;
  if (cached < 0) cached = std::system("ffmpeg -version > /dev/null 2>&1") == 0 ? 1 : 0;
  return cached == 1;
}

std::unique_ptr<MediaReader> make_media_reader() {
  if (ffmpeg_available()) return std::make_unique<FfmpegMediaReader>();
  return std::make_unique<BuiltinMediaReader>();
}

}  // namespace multipcl::ingest
