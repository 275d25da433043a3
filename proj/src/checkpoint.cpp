#include "multipcl/checkpoint.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

namespace multipcl::fusion {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'L', 'M'};
constexpr std::uint8_t kVersion = 1;

void write_u16le(std::ostream& out, std::uint16_t v) {
  std::uint8_t b[2] = {std::uint8_t(v), std::uint8_t(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  std::uint8_t b[4] = {std::uint8_t(v), std::uint8_t(v >> 8), std::uint8_t(v >> 16),
                       std::uint8_t(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint16_t read_u16le(std::istream& in) {
  std::uint8_t b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(std::uint16_t(b[0]) | std::uint16_t(b[1]) << 8);
}

std::uint32_t read_u32le(std::istream& in) {
  std::uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

}  // namespace

std::string config_to_json(const FusionConfig& config, Variant variant) {
  nlohmann::ordered_json j;
  j["variant"] = variant_name(variant);
  j["model_dim"] = config.model_dim;
  j["heads"] = config.heads;
  j["dropout"] = config.dropout;
  j["mask_zero_keys"] = config.mask_zero_keys;
  j["shared_projections"] = config.shared_projections;
  auto mods = nlohmann::ordered_json::array();
  for (Modality m : config.modalities) mods.push_back(modality_name(m));
  j["modalities"] = mods;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : config.pairs) pairs.push_back(pair_key(p));
  j["pairs"] = pairs;
  auto dims = nlohmann::ordered_json::object();
  for (const auto& [m, dim] : config.input_dims) dims[modality_name(m)] = dim;
  j["input_dims"] = dims;
  return j.dump();
}

namespace {

std::pair<FusionConfig, Variant> config_from_json(const std::string& text,
                                                  const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CacheError("'" + path + "': bad checkpoint config record: " + e.what());
  }
  FusionConfig c;
  Variant variant;
  try {
    variant = variant_from_name(j.at("variant").get<std::string>());
    c.model_dim = j.at("model_dim").get<int>();
    c.heads = j.at("heads").get<int>();
    c.dropout = j.at("dropout").get<double>();
    c.mask_zero_keys = j.at("mask_zero_keys").get<bool>();
    c.shared_projections = j.at("shared_projections").get<bool>();
    for (const auto& m : j.at("modalities")) {
      c.modalities.push_back(modality_from_name(m.get<std::string>()));
    }
    for (const auto& p : j.at("pairs")) {
      std::string key = p.get<std::string>();
      auto colon = key.find(':');
      if (colon == std::string::npos) {
        throw CacheError("'" + path + "': bad pair key '" + key + "'");
      }
      c.pairs.emplace_back(modality_from_name(key.substr(0, colon)),
                           modality_from_name(key.substr(colon + 1)));
    }
    for (auto it = j.at("input_dims").begin(); it != j.at("input_dims").end(); ++it) {
      c.input_dims[modality_from_name(it.key())] = it.value().get<long>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw CacheError("'" + path + "': incomplete checkpoint config: " + e.what());
  }
  return {c, variant};
}

}  // namespace

void save_checkpoint(const FusionModel& model, const std::string& path) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot open '" + tmp + "' for writing");
    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    const std::string cfg = config_to_json(model.config, model.variant);
    write_u32le(out, static_cast<std::uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    for (const auto& [name, value] : model.params) {
      write_u16le(out, static_cast<std::uint16_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      write_u32le(out, static_cast<std::uint32_t>(value.rows()));
      write_u32le(out, static_cast<std::uint32_t>(value.cols()));
      for (long r = 0; r < value.rows(); ++r) {
        for (long c = 0; c < value.cols(); ++c) {
          auto f = static_cast<float>(value(r, c));
          out.write(reinterpret_cast<const char*>(&f), sizeof(float));
        }
      }
    }
    if (!out) throw CacheError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CacheError("cannot move checkpoint into place at '" + path + "'");
  }
}

FusionModel load_checkpoint(const std::string& path,
                            const std::optional<FusionConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open checkpoint '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw CacheError("'" + path + "': bad magic header");
  }
  if (in.get() != kVersion) throw CacheError("'" + path + "': unsupported version");
  std::uint32_t cfg_len = read_u32le(in);
  std::string cfg_text(cfg_len, '\0');
  in.read(cfg_text.data(), cfg_len);
  if (static_cast<std::uint32_t>(in.gcount()) != cfg_len) {
    throw CacheError("'" + path + "': truncated config record");
  }
  auto [config, variant] = config_from_json(cfg_text, path);
  config.validate();

  if (expected.has_value()) {
    const std::string want = config_to_json(*expected, variant);
    const std::string got = config_to_json(config, variant);
    if (want != got) {
      throw ValidationError("checkpoint config mismatch: expected " + want + ", found " + got);
    }
  }

  FusionModel model;
  model.config = config;
  model.variant = variant;
  while (true) {
    int peek = in.peek();
    if (peek == EOF) break;
    std::uint16_t name_len = read_u16le(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t rows = read_u32le(in);
    std::uint32_t cols = read_u32le(in);
    if (!in) throw CacheError("'" + path + "': truncated section header");
    Eigen::MatrixXd value(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        float f;
        in.read(reinterpret_cast<char*>(&f), sizeof(float));
        value(r, c) = f;
      }
    }
    if (!in) throw CacheError("'" + path + "': truncated payload of section " + name);
    model.params[name] = std::move(value);
  }

  // shape audit against a freshly-derived parameter set
  FusionModel reference = FusionModel::init(config, variant, 0);
  for (const auto& [name, value] : reference.params) {
    auto it = model.params.find(name);
    if (it == model.params.end()) {
      throw CacheError("'" + path + "': missing parameter section " + name);
    }
    if (it->second.rows() != value.rows() || it->second.cols() != value.cols()) {
      throw CacheError("'" + path + "': parameter " + name + " has unexpected shape");
    }
  }
  if (model.params.size() != reference.params.size()) {
    throw CacheError("'" + path + "': unexpected extra parameter sections");
  }
  return model;
}

}  // namespace multipcl::fusion
