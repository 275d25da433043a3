#include "multipcl/experiment.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace multipcl::harness {

void ExperimentConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (top_m < 1 || top_m > epochs) throw ConfigError("need epochs >= top_m >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (threshold <= 0.0 || threshold >= 1.0) throw ConfigError("threshold must be in (0,1)");
  if (modalities.empty()) throw ConfigError("modality subset is empty");
}

fusion::FusionConfig ExperimentConfig::fusion_config(
    const std::map<Modality, long>& input_dims) const {
  fusion::FusionConfig c;
  c.model_dim = model_dim;
  c.heads = heads;
  c.dropout = dropout;
  c.mask_zero_keys = mask_zero_keys;
  c.shared_projections = shared_projections;
  c.modalities = modalities;
  c.pairs = pairs.empty() ? fusion::FusionConfig::all_pairs(modalities) : pairs;
  for (Modality m : modalities) {
    auto it = input_dims.find(m);
    if (it == input_dims.end()) {
      throw ConfigError("no input dimension known for modality " + modality_name(m));
    }
    c.input_dims[m] = it->second;
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::with_subset(const std::vector<Modality>& subset) const {
  ExperimentConfig c = *this;
  c.modalities = subset;
  c.pairs.clear();  // regenerate all pairs over the restricted set
  return c;
}

std::vector<Modality> parse_subset(const std::string& key) {
  std::vector<Modality> out;
  std::string token;
  std::stringstream ss(key);
  while (std::getline(ss, token, '+')) {
    std::size_t b = token.find_first_not_of(" \t");
    std::size_t e = token.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty modality in subset '" + key + "'");
    out.push_back(modality_from_name(token.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("empty modality subset");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i] == out[j]) throw ConfigError("duplicate modality in subset '" + key + "'");
  return out;
}

std::string subset_key(const std::vector<Modality>& modalities) {
  std::string out;
  for (std::size_t i = 0; i < modalities.size(); ++i) {
    if (i) out += '+';
    out += modality_code(modalities[i]);
  }
  return out;
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<fusion::ModalityPair> parse_pairs(const std::string& v) {
  if (v == "all") return {};
  std::vector<fusion::ModalityPair> pairs;
  std::stringstream ss(v);
  std::string token;
  while (std::getline(ss, token, ',')) {
    auto colon = token.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("pair '" + token + "' must look like V:T");
    }
    pairs.emplace_back(modality_from_name(token.substr(0, colon)),
                       modality_from_name(token.substr(colon + 1)));
  }
  if (pairs.empty()) throw ConfigError("empty pair list");
  return pairs;
}

}  // namespace

void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "modalities" || key == "subset") c.modalities = parse_subset(value);
    else if (key == "model_dim") c.model_dim = std::stoi(value);
    else if (key == "heads") c.heads = std::stoi(value);
    else if (key == "dropout") c.dropout = std::stod(value);
    else if (key == "mask_zero_keys") c.mask_zero_keys = parse_bool(value, key);
    else if (key == "shared_projections") c.shared_projections = parse_bool(value, key);
    else if (key == "pairs") c.pairs = parse_pairs(value);
    else if (key == "epochs") c.epochs = std::stoi(value);
    else if (key == "batch_size") c.batch_size = std::stoi(value);
    else if (key == "learning_rate") c.learning_rate = std::stod(value);
    else if (key == "folds") c.folds = std::stoi(value);
    else if (key == "top_m") c.top_m = std::stoi(value);
    else if (key == "threshold") c.threshold = std::stod(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "variant") c.variant = fusion::variant_from_name(value);
    else if (key == "top_m_scope") {
      if (value == "per_fold") c.top_m_scope = TopMScope::per_fold;
      else if (value == "across_folds") c.top_m_scope = TopMScope::across_folds;
      else throw ConfigError("top_m_scope must be per_fold or across_folds");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("config key '" + key + "': cannot parse value '" + value + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("config key '" + key + "': value out of range '" + value + "'");
  }
}

ExperimentConfig parse_experiment_config(const std::string& contents) {
  ExperimentConfig c;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t\r");
      std::size_t y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    apply_override(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace multipcl::harness
