#pragma once

#include <vector>

#include "multipcl/common.h"

namespace multipcl::fusion {

/// Binary cross-entropy on logits, mean over the batch, computed in the
/// numerically stable softplus form: max(x,0) - x*y + log1p(exp(-|x|)).
double bce_with_logits(const std::vector<double>& logits, const std::vector<int>& labels);
double bce_with_logits(double logit, int label);

/// d(mean batch loss)/d(logit_i) = (sigmoid(x_i) - y_i) / N.
double bce_dlogit(double logit, int label, std::size_t batch_size);

}  // namespace multipcl::fusion
