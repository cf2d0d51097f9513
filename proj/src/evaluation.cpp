#include "relnet/evaluation.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace relnet::evaluation {

using nlohmann::json;

ConfusionMatrix confusion(const std::vector<Label>& preds, const std::vector<Label>& golds) {
  if (preds.size() != golds.size())
    throw std::invalid_argument("confusion: " + std::to_string(preds.size()) +
                                " predictions vs " + std::to_string(golds.size()) + " golds");
  if (preds.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i)
    ++cm.counts[static_cast<int>(golds[i])][static_cast<int>(preds[i])];
  return cm;
}

namespace {

inline double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

ClassMetrics class_prf(const ConfusionMatrix& cm, Label cls) {
  const int c = static_cast<int>(cls);
  const double tp = static_cast<double>(cm.counts[c][c]);
  const double fp = static_cast<double>(cm.counts[1 - c][c]);
  const double fn = static_cast<double>(cm.counts[c][1 - c]);
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = f1_of(m.precision, m.recall);
  m.support = cm.support(cls);
  return m;
}

double weighted_f1(double p_true, double r_true, double p_false, double r_false, long support_true,
                   long support_false) {
  const long total = support_true + support_false;
  if (total <= 0) throw std::invalid_argument("weighted_f1: zero total support");
  const double wt = static_cast<double>(support_true) / static_cast<double>(total);
  const double wf = static_cast<double>(support_false) / static_cast<double>(total);
  return wt * f1_of(p_true, r_true) + wf * f1_of(p_false, r_false);
}

namespace {

void note_degenerate(const ConfusionMatrix& cm, Label cls, const ClassMetrics& m,
                     std::vector<std::string>& notes) {
  const int c = static_cast<int>(cls);
  const char* name = cls == Label::True ? "TRUE" : "FALSE";
  if (cm.counts[c][c] + cm.counts[1 - c][c] == 0)
    notes.push_back(std::string(name) + " precision is 0/0, reported as 0");
  if (m.support == 0) notes.push_back(std::string(name) + " recall is 0/0, reported as 0");
  if (m.precision + m.recall == 0.0 && cm.counts[c][c] + cm.counts[1 - c][c] > 0 && m.support > 0)
    notes.push_back(std::string(name) + " F1 is 0/0, reported as 0");
}

}  // namespace

EvaluationReport report_from_confusion(const ConfusionMatrix& cm) {
  EvaluationReport r;
  r.true_cls = class_prf(cm, Label::True);
  r.false_cls = class_prf(cm, Label::False);
  r.weighted_f1 = weighted_f1(r.true_cls.precision, r.true_cls.recall, r.false_cls.precision,
                              r.false_cls.recall, r.true_cls.support, r.false_cls.support);
  r.macro_f1 = 0.5 * (r.true_cls.f1 + r.false_cls.f1);
  note_degenerate(cm, Label::True, r.true_cls, r.notes);
  note_degenerate(cm, Label::False, r.false_cls, r.notes);
  return r;
}

EvaluationReport evaluate(const std::vector<Label>& preds, const std::vector<Label>& golds) {
  return report_from_confusion(confusion(preds, golds));
}

std::string report_to_json(const EvaluationReport& r) {
  json j;
  j["p_true"] = r.true_cls.precision;
  j["r_true"] = r.true_cls.recall;
  j["f1_true"] = r.true_cls.f1;
  j["p_false"] = r.false_cls.precision;
  j["r_false"] = r.false_cls.recall;
  j["f1_false"] = r.false_cls.f1;
  j["weighted_f1"] = r.weighted_f1;
  j["macro_f1"] = r.macro_f1;
  j["support_true"] = r.true_cls.support;
  j["support_false"] = r.false_cls.support;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j.dump(2);
}

EvaluationReport report_from_json(const std::string& text) {
  EvaluationReport r;
  try {
    json j = json::parse(text);
    r.true_cls.precision = j.at("p_true").get<double>();
    r.true_cls.recall = j.at("r_true").get<double>();
    r.true_cls.f1 = j.at("f1_true").get<double>();
    r.false_cls.precision = j.at("p_false").get<double>();
    r.false_cls.recall = j.at("r_false").get<double>();
    r.false_cls.f1 = j.at("f1_false").get<double>();
    r.weighted_f1 = j.at("weighted_f1").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.true_cls.support = j.at("support_true").get<long>();
    r.false_cls.support = j.at("support_false").get<long>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

std::string report_to_table(const EvaluationReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "class     precision   recall       f1  support\n";
  os << "TRUE         " << r.true_cls.precision << "   " << r.true_cls.recall << "   "
     << r.true_cls.f1 << "  " << std::setw(7) << r.true_cls.support << "\n";
  os << "FALSE        " << r.false_cls.precision << "   " << r.false_cls.recall << "   "
     << r.false_cls.f1 << "  " << std::setw(7) << r.false_cls.support << "\n";
  os << "weighted F1  " << r.weighted_f1 << "\n";
  os << "macro F1     " << r.macro_f1 << "\n";
  return os.str();
}

}  // namespace relnet::evaluation
