#include "multipcl/bundle.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace multipcl::ingest {

bool FeatureMatrix::all_finite() const {
  for (float v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

bool FeatureMatrix::row_is_zero(std::size_t r) const {
  for (std::size_t c = 0; c < cols; ++c)
    if (at(r, c) != 0.0f) return false;
  return true;
}

FeatureMatrix FeatureMatrix::from_eigen(const Eigen::MatrixXd& m) {
  FeatureMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          static_cast<float>(m(r, c));
  return out;
}

Eigen::MatrixXd FeatureMatrix::to_eigen() const {
  Eigen::MatrixXd out(static_cast<long>(rows), static_cast<long>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<long>(r), static_cast<long>(c)) = at(r, c);
  return out;
}

FeatureMatrix& ModalityBundle::of(Modality m) {
  switch (m) {
    case Modality::video: return video;
    case Modality::face: return face;
    case Modality::audio: return audio;
    case Modality::text: return text;
  }
  throw ContractError("unknown modality");
}

const FeatureMatrix& ModalityBundle::of(Modality m) const {
  return const_cast<ModalityBundle*>(this)->of(m);
}

void ModalityBundle::validate() const {
  for (Modality m : kAllModalities) {
    if (!has(m)) continue;
    const FeatureMatrix& mat = of(m);
    if (!mat.all_finite()) {
      throw ContractError("bundle modality " + modality_name(m) + " has non-finite values");
    }
  }
}

namespace {

constexpr char kMagic[4] = {'P', 'C', 'L', 'F'};
constexpr std::uint8_t kVersion = 1;

char modality_tag(Modality m) { return modality_code(m); }

void write_u32le(std::ostream& out, std::uint32_t v) {
  std::uint8_t b[4] = {std::uint8_t(v), std::uint8_t(v >> 8), std::uint8_t(v >> 16),
                       std::uint8_t(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::istream& in) {
  std::uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

void write_f32le(std::ostream& out, const std::vector<float>& v) {
  // assumes little-endian IEEE-754 host floats
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(float)));
}

}  // namespace

void cache_bundle(const ModalityBundle& bundle, const std::string& path) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot open '" + tmp + "' for writing");
    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    for (Modality m : kAllModalities) {
      if (!bundle.has(m)) continue;
      const FeatureMatrix& mat = bundle.of(m);
      out.put(modality_tag(m));
      write_u32le(out, static_cast<std::uint32_t>(mat.rows));
      write_u32le(out, static_cast<std::uint32_t>(mat.cols));
      write_f32le(out, mat.data);
    }
    if (!out) throw CacheError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CacheError("cannot move cache into place at '" + path + "'");
  }
}

ModalityBundle load_cached(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open cache '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw CacheError("'" + path + "': bad magic header");
  }
  int version = in.get();
  if (version != kVersion) {
    throw CacheError("'" + path + "': unsupported cache version " + std::to_string(version));
  }
  ModalityBundle bundle;
  int tag;
  while ((tag = in.get()) != EOF) {
    Modality m;
    try {
      m = modality_from_code(static_cast<char>(tag));
    } catch (const ConfigError&) {
      throw CacheError("'" + path + "': unknown section tag byte " + std::to_string(tag));
    }
    const std::string section = modality_name(m);
    std::uint32_t rows = read_u32le(in);
    std::uint32_t cols = read_u32le(in);
    if (!in) throw CacheError("'" + path + "': truncated header of section " + section);
    FeatureMatrix mat(rows, cols);
    in.read(reinterpret_cast<char*>(mat.data.data()),
            static_cast<std::streamsize>(mat.data.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != mat.data.size() * sizeof(float)) {
      throw CacheError("'" + path + "': truncated payload of section " + section);
    }
    if (bundle.has(m)) throw CacheError("'" + path + "': duplicate section " + section);
    bundle.of(m) = std::move(mat);
    bundle.present.insert(m);
  }
  return bundle;
}

}  // namespace multipcl::ingest
