#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "multipcl/bundle.h"
#include "multipcl/common.h"

namespace multipcl::fusion {

enum class Variant { mhca, fc };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

using ModalityPair = std::pair<Modality, Modality>;
std::string pair_key(const ModalityPair& p);

/// Shape and wiring of the fusion core: common dimension, head count, the
/// modality set S, and the ordered pair set P over which cross-modality
/// attention runs. P defaults to every ordered pair over S, self-pairs
/// included.
struct FusionConfig {
  int model_dim = 256;
  int heads = 4;
  double dropout = 0.0;
  // When set, key rows that are exactly zero in the raw input (the face
  // zero-fill) are excluded from attention. Off by default: zero rows stay
  // valid keys and contribute nothing through the values.
  bool mask_zero_keys = false;
  // One Q/K/V/O block per modality instead of per pair.
  bool shared_projections = false;
  std::vector<Modality> modalities;
  std::vector<ModalityPair> pairs;
  std::map<Modality, long> input_dims;

  int head_dim() const { return model_dim / heads; }
  void validate() const;

  static std::vector<ModalityPair> all_pairs(const std::vector<Modality>& modalities);
  /// Convenience constructor: S from codes ("V+T"), P = all ordered pairs.
  static FusionConfig make(const std::vector<Modality>& modalities,
                           const std::map<Modality, long>& input_dims, int model_dim,
                           int heads);
};

using ParamMap = std::map<std::string, Eigen::MatrixXd>;
using GradMap = std::map<std::string, Eigen::MatrixXd>;

/// Trainable parameters. Weight matrices are initialized uniformly in
/// +-sqrt(6/(fan_in+fan_out)), biases at zero. Parameter names are stable
/// and double as checkpoint section names.
struct FusionModel {
  FusionConfig config;
  Variant variant = Variant::mhca;
  ParamMap params;

  static FusionModel init(const FusionConfig& config, Variant variant, std::uint64_t seed);
  GradMap zero_grads() const;
  std::size_t parameter_count() const;
  /// Throws TrainingError naming the first non-finite parameter.
  void check_finite() const;
};

/// Q/K/V/output projection block of one attention site.
struct PairBlock {
  Eigen::MatrixXd Wq, Wk, Wv, Wo;  // each d x d
};

/// Row-wise softmax (numerically stabilized); every output row sums to 1.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores);

struct MhcaResult {
  Eigen::MatrixXd Q, K, V;             // n_q x d, n_k x d, n_k x d
  std::vector<Eigen::MatrixXd> attn;   // per head, n_q x n_k
  Eigen::MatrixXd concat;              // n_q x d, pre output-projection
  Eigen::MatrixXd out;                 // n_q x d
};

/// Cross-modality multi-head attention: queries from one sequence, keys and
/// values from another, per-head scaled dot-product softmax, heads
/// concatenated then output-projected. `key_mask[t]` true drops key t from
/// every softmax (ignored when it would drop all keys).
MhcaResult mhca_forward(const Eigen::MatrixXd& query_seq, const Eigen::MatrixXd& key_value_seq,
                        const PairBlock& block, int heads,
                        const std::vector<bool>* key_mask = nullptr);

Eigen::MatrixXd mhca(const Eigen::MatrixXd& query_seq, const Eigen::MatrixXd& key_value_seq,
                     const PairBlock& block, int heads);

/// Gradient of mhca w.r.t. its block and both input sequences.
/// d_out is the upstream gradient on `out`.
void mhca_backward(const MhcaResult& fwd, const Eigen::MatrixXd& query_seq,
                   const Eigen::MatrixXd& key_value_seq, const PairBlock& block, int heads,
                   const Eigen::MatrixXd& d_out, PairBlock& d_block, Eigen::MatrixXd& d_query,
                   Eigen::MatrixXd& d_kv);

using SampleInputs = std::map<Modality, Eigen::MatrixXd>;

struct PairState {
  MhcaResult mhca;
  Eigen::MatrixXd dropout_mask;  // empty when dropout is off
  Eigen::VectorXd pooled;
};

struct ForwardTrace {
  SampleInputs inputs;
  std::map<Modality, Eigen::MatrixXd> hidden;
  std::map<std::string, PairState> pairs;
  Eigen::VectorXd unified;
  double logit = 0.0;
  // fc variant intermediates
  Eigen::VectorXd fc_concat;
};

/// Full differentiable forward pass. Pass a dropout rng to sample dropout
/// masks (training); without one the pass is deterministic.
ForwardTrace forward(const FusionModel& model, const SampleInputs& inputs,
                     Rng* dropout_rng = nullptr);

/// Accumulates d(loss)/d(param) into `grads` for a forward trace, given
/// d(loss)/d(logit). Throws TrainingError naming the parameter on any
/// non-finite gradient.
void backward(const FusionModel& model, const ForwardTrace& trace, double dlogit,
              GradMap& grads);

/// Aggregated result of one sample: per-pair attended sequences, their pooled
/// vectors, the unified representation Z (sum over pairs), and the logit.
struct FusionOutput {
  std::map<std::string, Eigen::MatrixXd> attended;
  std::map<std::string, Eigen::VectorXd> pooled;
  Eigen::VectorXd unified;
  double logit = 0.0;
  double probability = 0.0;
};

SampleInputs bundle_inputs(const ingest::ModalityBundle& bundle,
                           const std::vector<Modality>& modalities);

/// Evaluation-mode forward over a bundle (dropout off).
FusionOutput fuse(const ingest::ModalityBundle& bundle, const FusionModel& model);

/// Ablation baseline: mean-pool each modality, concatenate, one fully
/// connected layer of width d, classifier head. Same output shape as fuse().
FusionOutput fc_fusion_baseline(const ingest::ModalityBundle& bundle, const FusionModel& model);

double sigmoid(double x);

}  // namespace multipcl::fusion
