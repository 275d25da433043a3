#include "multipcl/metrics.h"

namespace multipcl::harness {

EvalReport metrics_from_confusion(const Confusion& c) {
  EvalReport r;
  r.confusion = c;
  auto ratio = [](long num, long den) {
    return den > 0 ? 100.0 * static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  r.precision_pos = ratio(c.tp, c.tp + c.fp);
  r.recall_pos = ratio(c.tp, c.tp + c.fn);
  r.f1_pos = (r.precision_pos + r.recall_pos) > 0.0
                 ? 2.0 * r.precision_pos * r.recall_pos / (r.precision_pos + r.recall_pos)
                 : 0.0;
  double precision_neg = ratio(c.tn, c.tn + c.fn);
  double recall_neg = ratio(c.tn, c.tn + c.fp);
  double f1_neg = (precision_neg + recall_neg) > 0.0
                      ? 2.0 * precision_neg * recall_neg / (precision_neg + recall_neg)
                      : 0.0;
  r.f1_macro = (r.f1_pos + f1_neg) / 2.0;
  r.accuracy = ratio(c.tp + c.tn, c.total());
  return r;
}

EvalReport compute_metrics(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw ContractError("compute_metrics: prediction/label length mismatch");
  }
  if (predictions.empty()) throw DomainError("compute_metrics: empty batch");
  Confusion c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    int p = predictions[i], y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      throw DomainError("compute_metrics: values must be 0 or 1");
    }
    if (p == 1 && y == 1) ++c.tp;
    else if (p == 1 && y == 0) ++c.fp;
    else if (p == 0 && y == 1) ++c.fn;
    else ++c.tn;
  }
  return metrics_from_confusion(c);
}

}  // namespace multipcl::harness
