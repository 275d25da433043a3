#pragma once

#include <map>
#include <string>
#include <vector>

#include "multipcl/fusion.h"

namespace multipcl::harness {

enum class TopMScope {
  per_fold,      // average the top-m epochs inside each fold, then mean folds
  across_folds,  // take each fold's best epoch, average the top m of those
};

/// Everything one experiment run needs: modality subset, fusion shape,
/// training protocol, and seeding. Defaults follow the reference protocol:
/// 20 epochs, batch 10, learning rate 1e-4, 5 folds, top-5 averaging.
struct ExperimentConfig {
  std::vector<Modality> modalities = {Modality::video, Modality::face, Modality::audio,
                                      Modality::text};
  int model_dim = 256;
  int heads = 4;
  double dropout = 0.0;
  bool mask_zero_keys = false;
  bool shared_projections = false;
  std::vector<fusion::ModalityPair> pairs;  // empty = all ordered pairs over the subset
  int epochs = 20;
  int batch_size = 10;
  double learning_rate = 1e-4;
  int folds = 5;
  int top_m = 5;
  double threshold = 0.5;
  std::uint64_t seed = 0;
  fusion::Variant variant = fusion::Variant::mhca;
  TopMScope top_m_scope = TopMScope::per_fold;

  void validate() const;
  /// Completes a fusion config for this run given observed input dims.
  fusion::FusionConfig fusion_config(const std::map<Modality, long>& input_dims) const;
  /// Same config restricted to a modality subset.
  ExperimentConfig with_subset(const std::vector<Modality>& subset) const;
};

/// Flat key/value config file: one `key = value` per line, '#' comments.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& contents);
/// Applies one `key=value` override; throws ConfigError on unknown keys.
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

/// "V+T" -> {video, text}; accepts the single-letter codes in any order.
std::vector<Modality> parse_subset(const std::string& key);
std::string subset_key(const std::vector<Modality>& modalities);

}  // namespace multipcl::harness
