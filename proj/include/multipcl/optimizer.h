#pragma once

#include "multipcl/fusion.h"

namespace multipcl::fusion {

/// Adaptive-moment gradient updates (Adam).
struct AdamOptimizer {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void step(FusionModel& model, const GradMap& grads);

 private:
  GradMap m_, v_;
  long t_ = 0;
};

}  // namespace multipcl::fusion
