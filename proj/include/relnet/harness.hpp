#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relnet/backnet.hpp"
#include "relnet/evaluation.hpp"
#include "relnet/model.hpp"
#include "relnet/optim.hpp"

// Grid-search harness: enumerates topology/SVM hyperparameter grids, runs
// each configuration independently (optionally across a worker pool, one
// deterministic seed per cell) and exports heatmap CSVs of the SVM sweep.

namespace relnet::harness {

struct NNGridSpec {
  frontnet::Topology topology = frontnet::Topology::Cnn;
  std::vector<int> filters = {50, 100, 150, 200};                      // CNN
  std::vector<std::vector<int>> windows = {{2, 3}, {2, 3, 4}, {2, 3, 4, 5}};  // CNN
  std::vector<double> dropouts = {0.25, 0.50, 0.75};
  std::vector<int> hidden = {50, 100, 150, 200};  // LSTM / Bi-LSTM
  std::vector<int> postag_dims = {0, 50, 100};

  static NNGridSpec default_cnn();
  static NNGridSpec default_lstm(frontnet::Topology topology);
};

struct NNConfigPoint {
  frontnet::Topology topology = frontnet::Topology::Cnn;
  int filters = 0;
  std::vector<int> windows;
  int hidden = 0;
  double dropout = 0.0;
  int postag_dim = 0;

  std::string descriptor() const;
};

// Full Cartesian product in deterministic order (outer to inner as declared).
std::vector<NNConfigPoint> enumerate_nn_grid(const NNGridSpec& spec);

struct SvmGridSpec {
  int c_exp_lo = -3, c_exp_hi = 6;          // C = 10^k
  int gamma_exp_lo = -3, gamma_exp_hi = 6;  // gamma = 10^k
};

struct SvmConfigPoint {
  int c_exp = 0;
  int gamma_exp = 0;

  std::string descriptor() const;
};

std::vector<SvmConfigPoint> enumerate_svm_grid(const SvmGridSpec& spec);

struct ExperimentResult {
  std::string descriptor;
  bool ok = false;
  std::string error;  // set when !ok
  evaluation::EvaluationReport report;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  std::optional<int> c_exp, gamma_exp;  // SVM cells only
};

struct NNGridContext {
  optim::NetworkConfig base;  // per-point fields are overwritten per cell
  optim::TrainConfig train;   // fixed parameters (epochs, batch, lr)
  const features::EmbeddingTable* pretrained_words = nullptr;
  std::uint64_t seed = 0;
  int workers = 1;
};

// One independently seeded training + evaluation per configuration; a failing
// configuration is recorded as a failed result and does not stop the sweep.
std::vector<ExperimentResult> run_nn_grid(const std::vector<NNConfigPoint>& configs,
                                          const std::vector<corpus::EncodedInstance>& train_data,
                                          const std::vector<corpus::EncodedInstance>& eval_data,
                                          const NNGridContext& ctx);

struct SvmGridContext {
  backnet::SmoOptions smo;
  std::uint64_t seed = 0;
  int workers = 1;
};

std::vector<ExperimentResult> run_svm_grid(const backnet::FeatureDataset& train_features,
                                           const backnet::FeatureDataset& eval_features,
                                           const SvmGridSpec& grid, const SvmGridContext& ctx);

// CSV with a header row of C exponents; one row per gamma exponent; cells are
// weighted F1. Fails if the rectangular grid has a missing or failed cell.
void export_heatmap(const std::vector<ExperimentResult>& results, const std::string& path);

struct Heatmap {
  std::vector<int> c_exps;
  std::vector<int> gamma_exps;
  Matrix values;  // gamma rows x C columns
};

Heatmap load_heatmap(const std::string& path);

// Highest weighted F1 among successful results; ties go to the
// lexicographically smallest descriptor.
const ExperimentResult& select_best(const std::vector<ExperimentResult>& results);

void save_results(const std::vector<ExperimentResult>& results, const std::string& path);
std::vector<ExperimentResult> load_results(const std::string& path);

}  // namespace relnet::harness
