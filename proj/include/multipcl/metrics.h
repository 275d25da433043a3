#pragma once

#include <string>
#include <vector>

#include "multipcl/common.h"

namespace multipcl::harness {

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long total() const { return tp + fp + fn + tn; }
};

/// Table-2 shaped metric row, all values in percent: positive-class
/// precision/recall/F1, macro-averaged F1, accuracy. Zero-denominator
/// precision/recall/F1 are defined as 0.
struct EvalReport {
  Confusion confusion;
  double precision_pos = 0.0;
  double recall_pos = 0.0;
  double f1_pos = 0.0;
  double f1_macro = 0.0;
  double accuracy = 0.0;
  std::vector<EvalReport> per_fold;  // filled by cross-validation aggregates
};

EvalReport compute_metrics(const std::vector<int>& predictions, const std::vector<int>& labels);
EvalReport metrics_from_confusion(const Confusion& c);

}  // namespace multipcl::harness
