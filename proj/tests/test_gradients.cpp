#include <doctest.h>

#include "multipcl/loss.h"
#include "multipcl/fusion.h"

using namespace multipcl;
using namespace multipcl::fusion;

namespace {

// Central-difference check of every parameter gradient for one sample.
// Returns the worst relative error.
double finite_difference_worst(FusionModel& model, const SampleInputs& inputs, int label,
                               double step = 1e-4) {
  ForwardTrace tr = forward(model, inputs);
  GradMap grads = model.zero_grads();
  backward(model, tr, bce_dlogit(tr.logit, label, 1), grads);

  double worst = 0.0;
  for (auto& [name, value] : model.params) {
    for (long r = 0; r < value.rows(); ++r) {
      for (long c = 0; c < value.cols(); ++c) {
        const double saved = value(r, c);
        value(r, c) = saved + step;
        double up = bce_with_logits(forward(model, inputs).logit, label);
        value(r, c) = saved - step;
        double down = bce_with_logits(forward(model, inputs).logit, label);
        value(r, c) = saved;
        double numeric = (up - down) / (2.0 * step);
        double analytic = grads.at(name)(r, c);
        double rel = std::abs(analytic - numeric) /
                     std::max({1e-6, std::abs(analytic), std::abs(numeric)});
        worst = std::max(worst, rel);
      }
    }
  }
  return worst;
}

SampleInputs random_inputs(const FusionConfig& c, Rng& rng, std::size_t max_len = 4) {
  SampleInputs in;
  for (Modality m : c.modalities) {
    long rows = static_cast<long>(1 + rng.below(max_len));
    Eigen::MatrixXd x(rows, c.input_dims.at(m));
    for (long r = 0; r < rows; ++r)
      for (long col = 0; col < x.cols(); ++col) x(r, col) = rng.uniform(-1.5, 1.5);
    in[m] = x;
  }
  return in;
}

FusionConfig random_small_config(Rng& rng) {
  std::vector<Modality> mods = {Modality::video, Modality::face, Modality::audio,
                                Modality::text};
  std::map<Modality, long> dims;
  for (Modality m : mods) dims[m] = static_cast<long>(2 + rng.below(4));
  int heads = rng.below(2) == 0 ? 1 : 2;
  int d = heads * static_cast<int>(2 + rng.below(3));  // d <= 8, divisible by heads
  return FusionConfig::make(mods, dims, d, heads);
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences on random small configs") {
  Rng rng(2101);
  for (int trial = 0; trial < 4; ++trial) {
    FusionConfig c = random_small_config(rng);
    FusionModel model = FusionModel::init(c, Variant::mhca, rng.next_u64());
    SampleInputs in = random_inputs(c, rng);
    double worst = finite_difference_worst(model, in, static_cast<int>(rng.below(2)));
    CAPTURE(trial);
    CHECK(worst <= 1e-3);
  }
}

TEST_CASE("fc variant gradients also match finite differences") {
  Rng rng(2102);
  for (int trial = 0; trial < 3; ++trial) {
    FusionConfig c = random_small_config(rng);
    FusionModel model = FusionModel::init(c, Variant::fc, rng.next_u64());
    SampleInputs in = random_inputs(c, rng);
    CHECK(finite_difference_worst(model, in, 1) <= 1e-3);
  }
}

TEST_CASE("shared-projection gradients accumulate correctly across pairs") {
  Rng rng(2103);
  FusionConfig c = random_small_config(rng);
  c.shared_projections = true;
  FusionModel model = FusionModel::init(c, Variant::mhca, 5);
  SampleInputs in = random_inputs(c, rng);
  CHECK(finite_difference_worst(model, in, 0) <= 1e-3);
}

TEST_CASE("gradient norm vanishes at a near-minimum of a separated sample") {
  Rng rng(2104);
  FusionConfig c = random_small_config(rng);
  FusionModel model = FusionModel::init(c, Variant::mhca, 6);
  SampleInputs in = random_inputs(c, rng);
  // push the logit deep into the correct side: sigmoid saturates, loss ~ 0
  ForwardTrace probe = forward(model, in);
  model.params.at("head.b")(0, 0) = 40.0 - probe.logit + model.params.at("head.b")(0, 0);
  ForwardTrace tr = forward(model, in);
  REQUIRE(tr.logit == doctest::Approx(40.0));
  GradMap grads = model.zero_grads();
  backward(model, tr, bce_dlogit(tr.logit, 1, 1), grads);
  double norm = 0.0;
  for (const auto& [name, g] : grads) norm += g.squaredNorm();
  CHECK(std::sqrt(norm) < 1e-4);
}

TEST_CASE("doubling the upstream gradient exactly doubles every parameter gradient") {
  Rng rng(2105);
  FusionConfig c = random_small_config(rng);
  FusionModel model = FusionModel::init(c, Variant::mhca, 8);
  SampleInputs in = random_inputs(c, rng);
  ForwardTrace tr = forward(model, in);
  double dlogit = bce_dlogit(tr.logit, 1, 1);
  GradMap g1 = model.zero_grads(), g2 = model.zero_grads();
  backward(model, tr, dlogit, g1);
  backward(model, tr, 2.0 * dlogit, g2);
  for (const auto& [name, g] : g1) {
    CHECK(((2.0 * g) - g2.at(name)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("non-finite gradients name the parameter") {
  FusionConfig c = FusionConfig::make({Modality::video}, {{Modality::video, 2}}, 4, 1);
  FusionModel model = FusionModel::init(c, Variant::mhca, 9);
  SampleInputs in;
  Eigen::MatrixXd x(1, 2);
  x << 1e308, -1e308;
  in[Modality::video] = x;
  GradMap grads = model.zero_grads();
  bool threw = false;
  try {
    ForwardTrace tr = forward(model, in);
    backward(model, tr, 1.0, grads);
  } catch (const TrainingError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
  CHECK(threw);
}
