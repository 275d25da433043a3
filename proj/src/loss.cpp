#include "multipcl/loss.h"

#include <cmath>

#include "multipcl/fusion.h"

namespace multipcl::fusion {

double bce_with_logits(double logit, int label) {
  if (label != 0 && label != 1) {
    throw DomainError("bce_with_logits: label must be 0 or 1, got " + std::to_string(label));
  }
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

double bce_with_logits(const std::vector<double>& logits, const std::vector<int>& labels) {
  if (logits.size() != labels.size()) {
    throw ContractError("bce_with_logits: batch size mismatch");
  }
  if (logits.empty()) throw DomainError("bce_with_logits: empty batch");
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    acc += bce_with_logits(logits[i], labels[i]);
  }
  return acc / static_cast<double>(logits.size());
}

double bce_dlogit(double logit, int label, std::size_t batch_size) {
  if (label != 0 && label != 1) {
    throw DomainError("bce_dlogit: label must be 0 or 1");
  }
  return (sigmoid(logit) - static_cast<double>(label)) / static_cast<double>(batch_size);
}

}  // namespace multipcl::fusion
