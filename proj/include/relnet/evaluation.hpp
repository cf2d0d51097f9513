#pragma once

#include <string>
#include <vector>

#include "relnet/corpus.hpp"

// Confusion counts, per-class precision/recall/F1 and the headline metric:
// the support-weighted mean of per-class F1. Any 0/0 ratio is defined as 0.

namespace relnet::evaluation {

using corpus::Label;

struct ConfusionMatrix {
  // counts[gold][pred], indexed by Label (0 = FALSE, 1 = TRUE)
  long counts[2][2] = {{0, 0}, {0, 0}};

  long total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
  long support(Label cls) const {
    const int c = static_cast<int>(cls);
    return counts[c][0] + counts[c][1];
  }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct EvaluationReport {
  ClassMetrics true_cls;
  ClassMetrics false_cls;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::string> notes;  // which metrics were 0/0 and coerced to 0
};

ConfusionMatrix confusion(const std::vector<Label>& preds, const std::vector<Label>& golds);

ClassMetrics class_prf(const ConfusionMatrix& cm, Label cls);

// Support-weighted mean of the per-class F1 computed from precision/recall
// pairs; the arithmetic the tables of results use.
double weighted_f1(double p_true, double r_true, double p_false, double r_false, long support_true,
                   long support_false);

EvaluationReport report_from_confusion(const ConfusionMatrix& cm);
EvaluationReport evaluate(const std::vector<Label>& preds, const std::vector<Label>& golds);

// JSON object with fields p_true, r_true, f1_true, p_false, r_false,
// f1_false, weighted_f1, macro_f1, support_true, support_false.
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

// Fixed-width human-readable table.
std::string report_to_table(const EvaluationReport& report);

}  // namespace relnet::evaluation
