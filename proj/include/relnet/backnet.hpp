#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/corpus.hpp"

// Back-part classifiers: the dense softmax head used to train the network,
// and an RBF-kernel SVM trained by SMO on feature vectors extracted at the
// dropout layer.

namespace relnet::backnet {

struct DenseHead {
  int input_dim = 0;  // K
  Param w;            // stored transposed: 2 rows of K
  Param b;            // 2 biases

  const double* w_row(int cls) const { return w.value.data() + static_cast<std::size_t>(cls) * input_dim; }
};

DenseHead make_dense_head(int input_dim, Rng& rng);

// Class index 0 = FALSE, 1 = TRUE.
std::array<double, 2> head_logits(const std::vector<double>& v, const DenseHead& head);
std::array<double, 2> softmax2(const std::array<double, 2>& logits);
std::array<double, 2> dense_softmax(const std::vector<double>& v, const DenseHead& head);

struct CrossEntropyResult {
  double loss = 0.0;
  std::array<double, 2> d_logits{};  // probs - onehot(label)
};

CrossEntropyResult cross_entropy(const std::array<double, 2>& probs, corpus::Label label);

// Accumulates head gradients for one instance and returns d(loss)/d(input).
std::vector<double> head_backward(DenseHead& head, const std::vector<double>& v,
                                  const std::array<double, 2>& d_logits);

double rbf_kernel(const double* a, const double* b, std::size_t n, double gamma);
double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma);

// Dropout-layer feature vectors with labels mapped TRUE -> +1, FALSE -> -1.
struct FeatureDataset {
  Matrix x;            // n x K
  std::vector<int> y;  // +1 / -1

  std::size_t size() const { return y.size(); }
};

void save_features(const FeatureDataset& data, const std::string& path);
FeatureDataset load_features(const std::string& path);

struct SvmModel {
  Matrix support_vectors;          // n_sv x K
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  double gamma = 1.0;
  double c = 1.0;
};

void save_svm(const SvmModel& model, const std::string& path);
SvmModel load_svm(const std::string& path);

struct SmoOptions {
  double tol = 1e-3;
  int max_passes = 10;       // consecutive violation-free sweeps to converge
  int max_sweeps = 1000;     // hard cap; exceeding it sets converged = false
  std::uint64_t seed = 0;
  std::size_t gram_limit = 2500;  // full Gram cache up to this many points
  bool record_objective = false;  // trace dual objective after each update
};

struct SmoResult {
  SvmModel model;
  bool converged = true;
  int sweeps = 0;
  std::vector<double> alphas;            // final dual variables, one per point
  std::vector<double> objective_trace;   // only when record_objective
};

SmoResult smo_train(const FeatureDataset& data, double c, double gamma,
                    const SmoOptions& opts = {});

struct Decision {
  double score = 0.0;
  corpus::Label label = corpus::Label::False;  // score > 0 -> TRUE, ties -> FALSE
};

Decision svm_decision(const SvmModel& model, const std::vector<double>& x);
Decision svm_decision(const SvmModel& model, const double* x, std::size_t n);

// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const FeatureDataset& data, const std::vector<double>& alphas, double gamma);

}  // namespace relnet::backnet
