#include "multipcl/optimizer.h"

#include <cmath>

namespace multipcl::fusion {

void AdamOptimizer::step(FusionModel& model, const GradMap& grads) {
  if (t_ == 0) {
    m_ = model.zero_grads();
    v_ = model.zero_grads();
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (auto& [name, value] : model.params) {
    const Eigen::MatrixXd& g = grads.at(name);
    Eigen::MatrixXd& m = m_.at(name);
    Eigen::MatrixXd& v = v_.at(name);
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    value.array() -=
        learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + epsilon);
  }
  model.check_finite();
}

}  // namespace multipcl::fusion
