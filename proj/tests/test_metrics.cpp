#include <doctest.h>

#include "multipcl/grid.h"
#include "multipcl/metrics.h"

using namespace multipcl;
using namespace multipcl::harness;

TEST_CASE("a perfect classifier scores 100 everywhere") {
  std::vector<int> labels = {0, 1, 1, 0, 1, 0, 0, 1};
  EvalReport r = compute_metrics(labels, labels);
  CHECK(r.precision_pos == 100.0);
  CHECK(r.recall_pos == 100.0);
  CHECK(r.f1_pos == 100.0);
  CHECK(r.f1_macro == 100.0);
  CHECK(r.accuracy == 100.0);
}

TEST_CASE("TP=4 FP=1 FN=1 TN=4 gives 80.0 across the board") {
  std::vector<int> preds, labels;
  for (int i = 0; i < 4; ++i) { preds.push_back(1); labels.push_back(1); }  // TP
  preds.push_back(1); labels.push_back(0);                                  // FP
  preds.push_back(0); labels.push_back(1);                                  // FN
  for (int i = 0; i < 4; ++i) { preds.push_back(0); labels.push_back(0); }  // TN
  EvalReport r = compute_metrics(preds, labels);
  CHECK(r.precision_pos == 80.0);
  CHECK(r.recall_pos == 80.0);
  CHECK(r.f1_pos == 80.0);
  CHECK(r.accuracy == 80.0);
  CHECK(r.confusion.tp == 4);
  CHECK(r.confusion.fp == 1);
  CHECK(r.confusion.fn == 1);
  CHECK(r.confusion.tn == 4);
}

TEST_CASE("metrics are permutation invariant") {
  Rng rng(71);
  std::vector<int> preds, labels;
  for (int i = 0; i < 40; ++i) {
    preds.push_back(static_cast<int>(rng.below(2)));
    labels.push_back(static_cast<int>(rng.below(2)));
  }
  EvalReport a = compute_metrics(preds, labels);
  std::vector<std::size_t> perm(preds.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<int> p2(preds.size()), l2(labels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    p2[i] = preds[perm[i]];
    l2[i] = labels[perm[i]];
  }
  EvalReport b = compute_metrics(p2, l2);
  CHECK(a.f1_pos == b.f1_pos);
  CHECK(a.f1_macro == b.f1_macro);
  CHECK(a.accuracy == b.accuracy);
}

TEST_CASE("macro F1 equals the unweighted mean of per-class F1 on random batches") {
  Rng rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.below(30);
    std::vector<int> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(rng.below(2));
      labels[i] = static_cast<int>(rng.below(2));
    }
    EvalReport r = compute_metrics(preds, labels);
    // direct confusion-matrix oracle with flipped classes
    std::vector<int> preds_neg(n), labels_neg(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds_neg[i] = 1 - preds[i];
      labels_neg[i] = 1 - labels[i];
    }
    EvalReport neg = compute_metrics(preds_neg, labels_neg);
    CHECK(r.f1_macro == doctest::Approx((r.f1_pos + neg.f1_pos) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("zero denominators follow the 0.0 convention") {
  // constant-negative predictor: no predicted positives
  std::vector<int> preds = {0, 0, 0, 0, 0};
  std::vector<int> labels = {1, 0, 0, 1, 0};
  EvalReport r = compute_metrics(preds, labels);
  CHECK(r.precision_pos == 0.0);
  CHECK(r.recall_pos == 0.0);
  CHECK(r.f1_pos == 0.0);
  CHECK(r.accuracy == 60.0);  // majority-class rate
}

TEST_CASE("length mismatch is a contract error") {
  CHECK_THROWS_AS(compute_metrics({1, 0}, {1}), ContractError);
  CHECK_THROWS_AS(compute_metrics({}, {}), DomainError);
  CHECK_THROWS_AS(compute_metrics({2}, {1}), DomainError);
}

TEST_CASE("the table renderer emits rows in the reference column order") {
  GridRow row;
  row.subset = "V+A+T+F";
  row.variant = fusion::Variant::mhca;
  row.report.precision_pos = 68.09;
  row.report.recall_pos = 80.00;
  row.report.f1_pos = 73.56;
  row.report.f1_macro = 81.06;
  row.report.accuracy = 84.03;
  std::string table = render_table({row});
  auto p = table.find("68.09");
  auto rp = table.find("80.00");
  auto f1 = table.find("73.56");
  auto fm = table.find("81.06");
  auto acc = table.find("84.03");
  REQUIRE(p != std::string::npos);
  CHECK(p < rp);
  CHECK(rp < f1);
  CHECK(f1 < fm);
  CHECK(fm < acc);
}
