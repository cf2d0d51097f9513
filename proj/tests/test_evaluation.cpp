#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "relnet/evaluation.hpp"

using namespace relnet;
using namespace relnet::evaluation;
using corpus::Label;

namespace {

std::vector<Label> labels(std::initializer_list<int> xs) {
  std::vector<Label> out;
  for (int x : xs) out.push_back(x ? Label::True : Label::False);
  return out;
}

}  // namespace

TEST_CASE("confusion counts exactly") {
  std::vector<Label> golds = labels({1, 1, 0, 0, 1});
  ConfusionMatrix perfect = confusion(golds, golds);
  CHECK(perfect.counts[0][1] == 0);
  CHECK(perfect.counts[1][0] == 0);
  CHECK(perfect.total() == 5);

  std::vector<Label> flipped = labels({0, 0, 1, 1, 0});
  ConfusionMatrix total = confusion(flipped, golds);
  CHECK(total.counts[0][0] == 0);
  CHECK(total.counts[1][1] == 0);
  CHECK(total.total() == 5);

  std::vector<Label> mixed = labels({1, 0, 0, 1, 1});  // 3 of 5 correct
  ConfusionMatrix cm = confusion(mixed, golds);
  CHECK(cm.total() == 5);
  CHECK(cm.counts[1][1] + cm.counts[0][0] == 3);
}

TEST_CASE("confusion rejects mismatched or empty inputs") {
  CHECK_THROWS_AS(confusion(labels({1}), labels({1, 0})), std::invalid_argument);
  CHECK_THROWS_AS(confusion({}, {}), std::invalid_argument);
}

TEST_CASE("class_prf direct formula") {
  // TRUE class: tp=3, fp=1, fn=2
  ConfusionMatrix cm;
  cm.counts[1][1] = 3;
  cm.counts[0][1] = 1;
  cm.counts[1][0] = 2;
  cm.counts[0][0] = 4;
  ClassMetrics m = class_prf(cm, Label::True);
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.6));
  CHECK(m.f1 == doctest::Approx(0.66667).epsilon(1e-4));
  CHECK(m.support == 5);
}

TEST_CASE("class_prf defines 0/0 as 0") {
  ConfusionMatrix cm;
  cm.counts[0][0] = 10;  // FALSE-only data, never predicted TRUE
  ClassMetrics m = class_prf(cm, Label::True);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.support == 0);
}

TEST_CASE("class_prf on perfect predictions") {
  ConfusionMatrix cm;
  cm.counts[1][1] = 7;
  cm.counts[0][0] = 3;
  ClassMetrics m = class_prf(cm, Label::True);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
  CHECK(m.support == 7);
}

TEST_CASE("weighted f1 reconciles the reported per-class numbers") {
  // A recurrent run that never predicts TRUE: per-class P/R 0/0 and 0.57/1.0
  const double lstm_row = weighted_f1(0.0, 0.0, 0.57, 1.0, 5431, 7198);
  CHECK(std::abs(lstm_row - 0.4138) < 0.0005);

  // The convolution + SVM run at C=10^0, gamma=10^-1
  const double cnn_svm_row = weighted_f1(0.7986, 0.7441, 0.8164, 0.8584, 5431, 7198);
  CHECK(std::abs(cnn_svm_row - 0.8083) < 0.0005);

  CHECK(weighted_f1(1.0, 1.0, 1.0, 1.0, 10, 20) == doctest::Approx(1.0));
}

TEST_CASE("weighted f1 rejects zero total support") {
  CHECK_THROWS_AS(weighted_f1(1.0, 1.0, 1.0, 1.0, 0, 0), std::invalid_argument);
}

TEST_CASE("weighted f1 is a convex combination of per-class f1") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const double pt = rng.next_double(), rt = rng.next_double();
    const double pf = rng.next_double(), rf = rng.next_double();
    const long st = 1 + static_cast<long>(rng.next_below(1000));
    const long sf = 1 + static_cast<long>(rng.next_below(1000));
    const double f1t = pt + rt == 0 ? 0 : 2 * pt * rt / (pt + rt);
    const double f1f = pf + rf == 0 ? 0 : 2 * pf * rf / (pf + rf);
    const double w = weighted_f1(pt, rt, pf, rf, st, sf);
    CHECK(w >= std::min(f1t, f1f) - 1e-12);
    CHECK(w <= std::max(f1t, f1f) + 1e-12);
    // relabeling invariance: swap classes and supports
    CHECK(weighted_f1(pf, rf, pt, rt, sf, st) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("report metrics agree between confusion matrix and prediction lists") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Label> golds, preds;
    const int n = 5 + static_cast<int>(rng.next_below(200));
    for (int i = 0; i < n; ++i) {
      golds.push_back(rng.next_double() < 0.4 ? Label::True : Label::False);
      preds.push_back(rng.next_double() < 0.5 ? Label::True : Label::False);
    }
    EvaluationReport from_lists = evaluate(preds, golds);
    EvaluationReport from_cm = report_from_confusion(confusion(preds, golds));
    CHECK(from_lists.weighted_f1 == from_cm.weighted_f1);
    CHECK(from_lists.macro_f1 == from_cm.macro_f1);
    CHECK(from_lists.true_cls.f1 == from_cm.true_cls.f1);

    CHECK(from_lists.weighted_f1 >=
          std::min(from_lists.true_cls.f1, from_lists.false_cls.f1) - 1e-12);
    CHECK(from_lists.weighted_f1 <=
          std::max(from_lists.true_cls.f1, from_lists.false_cls.f1) + 1e-12);
  }
}

TEST_CASE("report JSON round trip carries every field") {
  std::vector<Label> golds = labels({1, 1, 0, 0, 1, 0});
  std::vector<Label> preds = labels({1, 0, 0, 1, 1, 0});
  EvaluationReport r = evaluate(preds, golds);
  EvaluationReport back = report_from_json(report_to_json(r));
  CHECK(back.true_cls.precision == r.true_cls.precision);
  CHECK(back.true_cls.recall == r.true_cls.recall);
  CHECK(back.false_cls.f1 == r.false_cls.f1);
  CHECK(back.weighted_f1 == r.weighted_f1);
  CHECK(back.macro_f1 == r.macro_f1);
  CHECK(back.true_cls.support == r.true_cls.support);
  CHECK(back.false_cls.support == r.false_cls.support);
}

TEST_CASE("report table mentions both classes and the weighted metric") {
  EvaluationReport r = evaluate(labels({1, 0}), labels({1, 0}));
  const std::string table = report_to_table(r);
  CHECK(table.find("TRUE") != std::string::npos);
  CHECK(table.find("FALSE") != std::string::npos);
  CHECK(table.find("weighted F1") != std::string::npos);
  CHECK(table.find("1.0000") != std::string::npos);
}
