#pragma once

#include <string>
#include <vector>

#include "multipcl/bundle.h"
#include "multipcl/experiment.h"
#include "multipcl/fusion.h"
#include "multipcl/metrics.h"

namespace multipcl::harness {

struct LabeledBundle {
  std::string id;
  int label = 0;
  ingest::ModalityBundle bundle;
};

using BundleCorpus = std::vector<LabeledBundle>;

std::map<Modality, long> corpus_input_dims(const BundleCorpus& corpus,
                                           const std::vector<Modality>& modalities);

struct EpochTrace {
  int epoch = 0;
  double train_loss = 0.0;
  EvalReport eval;
};

struct TrainResult {
  fusion::FusionModel model;
  std::vector<EpochTrace> trace;
};

/// Evaluates a model over a corpus at a decision threshold on sigma(logit).
EvalReport evaluate(const fusion::FusionModel& model, const BundleCorpus& corpus,
                    double threshold);

/// Trains one model: seeded shuffled mini-batches, mean-batch BCE, adaptive
/// moment updates. Records a per-epoch trace, evaluated on `eval_set` when
/// given. Aborts with epoch/batch diagnostics if the loss turns non-finite.
TrainResult train_one(const ExperimentConfig& config, const BundleCorpus& train_set,
                      const BundleCorpus* eval_set, Rng rng);

/// Top-m epoch selection: averages the metric fields of the m trace entries
/// with the highest held-out positive-class F1 (earlier epochs win ties) and
/// keeps the best epoch's confusion counts. m = 1 is the best epoch,
/// m = trace size the mean over all epochs.
EvalReport average_top_epochs(const std::vector<EpochTrace>& trace, int top_m);

/// Stratified k-fold cross-validation with per-fold top-m epoch averaging.
/// The returned report's metric fields are the fold means; per_fold keeps
/// each fold's averaged metrics with its best epoch's confusion counts.
EvalReport cross_validate(const ExperimentConfig& config, const BundleCorpus& corpus,
                          int jobs = 1);

}  // namespace multipcl::harness
