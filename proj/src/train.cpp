#include "multipcl/train.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "multipcl/folds.h"
#include "multipcl/loss.h"
#include "multipcl/optimizer.h"

namespace multipcl::harness {

std::map<Modality, long> corpus_input_dims(const BundleCorpus& corpus,
                                           const std::vector<Modality>& modalities) {
  if (corpus.empty()) throw DomainError("empty corpus");
  std::map<Modality, long> dims;
  for (Modality m : modalities) {
    if (!corpus.front().bundle.has(m)) {
      throw ConfigError("corpus bundles are missing modality " + modality_name(m));
    }
    dims[m] = static_cast<long>(corpus.front().bundle.of(m).cols);
  }
  return dims;
}

EvalReport evaluate(const fusion::FusionModel& model, const BundleCorpus& corpus,
                    double threshold) {
  std::vector<int> preds, labels;
  preds.reserve(corpus.size());
  labels.reserve(corpus.size());
  for (const LabeledBundle& s : corpus) {
    fusion::SampleInputs inputs = fusion::bundle_inputs(s.bundle, model.config.modalities);
    fusion::ForwardTrace tr = fusion::forward(model, inputs);
    preds.push_back(fusion::sigmoid(tr.logit) >= threshold ? 1 : 0);
    labels.push_back(s.label);
  }
  return compute_metrics(preds, labels);
}

TrainResult train_one(const ExperimentConfig& config, const BundleCorpus& train_set,
                      const BundleCorpus* eval_set, Rng rng) {
  config.validate();
  if (train_set.empty()) throw DomainError("train_one: empty training set");
  bool has_pos = false, has_neg = false;
  for (const LabeledBundle& s : train_set) (s.label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw DomainError("train_one: training set must contain both classes");
  }

  const auto dims = corpus_input_dims(train_set, config.modalities);
  fusion::FusionConfig fc = config.fusion_config(dims);
  TrainResult result{fusion::FusionModel::init(fc, config.variant, rng.fork("init").next_u64()),
                     {}};

  fusion::AdamOptimizer optimizer;
  optimizer.learning_rate = config.learning_rate;
  Rng shuffle_rng = rng.fork("shuffle");
  Rng dropout_rng = rng.fork("dropout");
  const bool use_dropout = fc.dropout > 0.0;

  // precompute the double-precision views once
  std::vector<fusion::SampleInputs> inputs;
  inputs.reserve(train_set.size());
  for (const LabeledBundle& s : train_set) {
    inputs.push_back(fusion::bundle_inputs(s.bundle, config.modalities));
  }

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    for (std::size_t start = 0, batch_index = 0; start < order.size();
         start += batch, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::size_t n = end - start;
      fusion::GradMap grads = result.model.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        fusion::ForwardTrace tr = fusion::forward(result.model, inputs[i],
                                                  use_dropout ? &dropout_rng : nullptr);
        batch_loss += fusion::bce_with_logits(tr.logit, train_set[i].label);
        fusion::backward(result.model, tr,
                         fusion::bce_dlogit(tr.logit, train_set[i].label, n), grads);
      }
      batch_loss /= static_cast<double>(n);
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
      }
      loss_sum += batch_loss * static_cast<double>(n);
      optimizer.step(result.model, grads);
    }
    EpochTrace et;
    et.epoch = epoch;
    et.train_loss = loss_sum / static_cast<double>(train_set.size());
    if (eval_set != nullptr) {
      et.eval = evaluate(result.model, *eval_set, config.threshold);
    }
    result.trace.push_back(std::move(et));
  }
  return result;
}

namespace {

// Indices of the m trace entries with the highest held-out positive-class F1,
// earlier epochs first on ties.
std::vector<std::size_t> top_epochs(const std::vector<EpochTrace>& trace, int m) {
  std::vector<std::size_t> idx(trace.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&trace](std::size_t a, std::size_t b) {
    return trace[a].eval.f1_pos > trace[b].eval.f1_pos;
  });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(m)));
  return idx;
}

EvalReport mean_of(const std::vector<EvalReport>& reports, const Confusion& confusion) {
  EvalReport out;
  out.confusion = confusion;
  for (const EvalReport& r : reports) {
    out.precision_pos += r.precision_pos;
    out.recall_pos += r.recall_pos;
    out.f1_pos += r.f1_pos;
    out.f1_macro += r.f1_macro;
    out.accuracy += r.accuracy;
  }
  const auto n = static_cast<double>(reports.size());
  out.precision_pos /= n;
  out.recall_pos /= n;
  out.f1_pos /= n;
  out.f1_macro /= n;
  out.accuracy /= n;
  return out;
}

EvalReport run_fold(const ExperimentConfig& config, const BundleCorpus& corpus,
                    const corpus::FoldSplit& split, Rng fold_rng) {
  BundleCorpus train_set, test_set;
  train_set.reserve(split.train.size());
  test_set.reserve(split.test.size());
  for (std::size_t i : split.train) train_set.push_back(corpus[i]);
  for (std::size_t i : split.test) test_set.push_back(corpus[i]);

  TrainResult tr = train_one(config, train_set, &test_set, fold_rng);
  return average_top_epochs(tr.trace, config.top_m);
}

}  // namespace

EvalReport average_top_epochs(const std::vector<EpochTrace>& trace, int top_m) {
  if (trace.empty()) throw DomainError("average_top_epochs: empty trace");
  if (top_m < 1) throw ConfigError("average_top_epochs: top_m must be >= 1");
  std::vector<std::size_t> picked = top_epochs(trace, top_m);
  std::vector<EvalReport> selected;
  selected.reserve(picked.size());
  for (std::size_t i : picked) selected.push_back(trace[i].eval);
  return mean_of(selected, trace[picked.front()].eval.confusion);
}

EvalReport cross_validate(const ExperimentConfig& config, const BundleCorpus& corpus,
                          int jobs) {
  config.validate();
  std::vector<int> labels;
  labels.reserve(corpus.size());
  for (const LabeledBundle& s : corpus) labels.push_back(s.label);
  const auto folds = corpus::make_folds(labels, config.folds, config.seed);

  ExperimentConfig fold_config = config;
  if (config.top_m_scope == TopMScope::across_folds) fold_config.top_m = 1;

  Rng base(config.seed);
  std::vector<EvalReport> fold_reports(folds.size());
  if (jobs > 1) {
    std::vector<std::future<EvalReport>> futures;
    futures.reserve(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
      futures.push_back(std::async(std::launch::async, [&, f]() {
        return run_fold(fold_config, corpus, folds[f], base.fork("fold").fork(f));
      }));
    }
    for (std::size_t f = 0; f < folds.size(); ++f) fold_reports[f] = futures[f].get();
  } else {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      fold_reports[f] = run_fold(fold_config, corpus, folds[f], base.fork("fold").fork(f));
    }
  }

  std::vector<EvalReport> pool = fold_reports;
  if (config.top_m_scope == TopMScope::across_folds) {
    std::stable_sort(pool.begin(), pool.end(),
                     [](const EvalReport& a, const EvalReport& b) { return a.f1_pos > b.f1_pos; });
    pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(config.top_m)));
  }
  Confusion total;
  for (const EvalReport& r : pool) {
    total.tp += r.confusion.tp;
    total.fp += r.confusion.fp;
    total.fn += r.confusion.fn;
    total.tn += r.confusion.tn;
  }
  EvalReport aggregate = mean_of(pool, total);
  aggregate.per_fold = fold_reports;
  return aggregate;
}

}  // namespace multipcl::harness
