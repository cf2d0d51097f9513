#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relnet/backnet.hpp"
#include "relnet/corpus.hpp"
#include "relnet/features.hpp"
#include "relnet/frontnet.hpp"

// The trainable network: embedding tables -> front classifier -> dropout ->
// dense softmax head, plus the configuration needed to rebuild it from a
// checkpoint.

namespace relnet::optim {

struct NetworkConfig {
  corpus::EncodeOptions encode;     // T, L, W
  features::FeatureConfig feature;  // embedding dims
  frontnet::Topology topology = frontnet::Topology::Cnn;
  std::vector<int> cnn_windows = {2, 3, 4};
  int cnn_filters = 150;
  int lstm_hidden = 200;
  double dropout_rate = 0.25;
  bool word_trainable = false;
  // vocabulary sizes, recorded so checkpoints validate against their vocab
  int word_vocab = 0;
  int pos_vocab = 0;
  int char_vocab = 0;

  // Table-style descriptor, e.g. "CNN; Filter=150; Window=2,3,4; Dropout=0.25;
  // POS-Tag Dim=50".
  std::string descriptor() const;
};

struct NetworkModel {
  NetworkConfig config;
  features::FeatureTables tables;
  frontnet::FrontModel front;
  backnet::DenseHead head;

  int front_output_dim() const { return front.output_dim(); }

  // Fixed enumeration order shared by the optimizer, the checkpoint format
  // and the finite-difference checker. all_params includes frozen tables.
  std::vector<Param*> all_params();
  std::vector<Param*> trainable_params();
  void zero_grads();
};

// Builds a freshly initialized network. Vocabulary sizes must already be set
// in the config. All initialization randomness derives from `seed`.
NetworkModel build_network(const NetworkConfig& config, std::uint64_t seed);

// Replaces the word table with pretrained embeddings (dimension must match).
void set_word_table(NetworkModel& model, features::EmbeddingTable table);

struct InstanceForward {
  features::FeatureMatrix fm;
  frontnet::FrontResult front;
  std::array<double, 2> logits{};
  std::array<double, 2> probs{};
};

InstanceForward model_forward(const NetworkModel& model, const corpus::EncodedInstance& inst,
                              frontnet::DropoutMode mode, Rng* dropout_rng = nullptr);

// Backpropagates d(loss)/d(logits) through head, dropout, front and
// embeddings, accumulating into every trainable Param's grad buffer.
void model_backward(NetworkModel& model, const InstanceForward& fwd,
                    const std::array<double, 2>& d_logits);

corpus::Label model_predict(const NetworkModel& model, const corpus::EncodedInstance& inst);

double model_accuracy(const NetworkModel& model, const std::vector<corpus::EncodedInstance>& data);

}  // namespace relnet::optim

namespace relnet::backnet {

// Dropout-layer outputs (INFER mode, deterministic) for every instance.
FeatureDataset extract_feature_vectors(const optim::NetworkModel& model,
                                       const std::vector<corpus::EncodedInstance>& instances);

}  // namespace relnet::backnet
