#include "relnet/model.hpp"

#include <sstream>

namespace relnet::optim {

std::string NetworkConfig::descriptor() const {
  std::ostringstream os;
  os << frontnet::topology_name(topology) << "; ";
  if (topology == frontnet::Topology::Cnn) {
    os << "Filter=" << cnn_filters << "; Window=";
    for (std::size_t i = 0; i < cnn_windows.size(); ++i) {
      if (i) os << ",";
      os << cnn_windows[i];
    }
    os << "; ";
  } else {
    os << "Hidden=" << lstm_hidden << "; ";
  }
  os << "Dropout=" << dropout_rate << "; POS-Tag Dim=" << feature.postag_dim;
  if (feature.char_conv.enabled) os << "; Char=" << feature.char_conv.char_filters;
  return os.str();
}

std::vector<Param*> NetworkModel::all_params() {
  std::vector<Param*> out;
  out.push_back(&tables.word.weights);
  out.push_back(&tables.position.weights);
  if (tables.postag) out.push_back(&tables.postag->weights);
  if (tables.char_conv) {
    out.push_back(&tables.char_conv->table.weights);
    out.push_back(&tables.char_conv->filters);
    out.push_back(&tables.char_conv->bias);
  }
  for (Param* p : front.params()) out.push_back(p);
  out.push_back(&head.w);
  out.push_back(&head.b);
  return out;
}

std::vector<Param*> NetworkModel::trainable_params() {
  std::vector<Param*> out;
  if (tables.word.trainable) out.push_back(&tables.word.weights);
  out.push_back(&tables.position.weights);
  if (tables.postag && tables.postag->trainable) out.push_back(&tables.postag->weights);
  if (tables.char_conv) {
    out.push_back(&tables.char_conv->table.weights);
    out.push_back(&tables.char_conv->filters);
    out.push_back(&tables.char_conv->bias);
  }
  for (Param* p : front.params()) out.push_back(p);
  out.push_back(&head.w);
  out.push_back(&head.b);
  return out;
}

void NetworkModel::zero_grads() {
  for (Param* p : all_params()) p->zero_grad();
}

NetworkModel build_network(const NetworkConfig& config, std::uint64_t seed) {
  if (config.word_vocab < 2 || config.pos_vocab < 1)
    throw std::invalid_argument("build_network: vocabulary sizes not set");
  Rng rng(derive_seed(seed, "init"));
  NetworkModel model;
  model.config = config;

  const features::FeatureConfig& fc = config.feature;
  model.tables.word = features::make_table("word_table", config.word_vocab, fc.word_dim, rng);
  model.tables.word.trainable = config.word_trainable;
  model.tables.position =
      features::make_table("position_table", 2 * config.encode.clip + 1, fc.position_dim, rng);
  if (fc.postag_dim > 0)
    model.tables.postag =
        features::make_table("postag_table", config.pos_vocab, fc.postag_dim, rng);
  if (fc.char_conv.enabled)
    model.tables.char_conv = features::make_char_conv(fc.char_conv, config.char_vocab, rng);

  model.front.kind = config.topology;
  if (config.topology == frontnet::Topology::Cnn) {
    model.front.conv =
        frontnet::make_conv_front(config.cnn_windows, config.cnn_filters, fc.total_dim(), rng);
  } else {
    const auto dir = config.topology == frontnet::Topology::Bilstm
                         ? frontnet::Direction::Bidirectional
                         : frontnet::Direction::Forward;
    model.front.lstm = frontnet::make_lstm_front(dir, config.lstm_hidden, fc.total_dim(), rng);
  }
  model.head = backnet::make_dense_head(model.front.output_dim(), rng);
  return model;
}

void set_word_table(NetworkModel& model, features::EmbeddingTable table) {
  if (table.dim != model.config.feature.word_dim)
    throw DataError("pretrained embedding dimension " + std::to_string(table.dim) +
                    " does not match configured word_dim " +
                    std::to_string(model.config.feature.word_dim));
  if (table.rows != model.config.word_vocab)
    throw DataError("pretrained embedding rows do not match vocabulary size");
  table.trainable = model.config.word_trainable;
  model.tables.word = std::move(table);
}

InstanceForward model_forward(const NetworkModel& model, const corpus::EncodedInstance& inst,
                              frontnet::DropoutMode mode, Rng* dropout_rng) {
  InstanceForward fwd;
  fwd.fm = features::embed_sequence(inst, model.tables, model.config.feature);
  frontnet::DropoutSpec drop{model.config.dropout_rate, mode, 0};
  fwd.front = frontnet::front_forward(fwd.fm, model.front, drop, dropout_rng);
  fwd.logits = backnet::head_logits(fwd.front.output, model.head);
  fwd.probs = backnet::softmax2(fwd.logits);
  return fwd;
}

void model_backward(NetworkModel& model, const InstanceForward& fwd,
                    const std::array<double, 2>& d_logits) {
  std::vector<double> d_front = backnet::head_backward(model.head, fwd.front.output, d_logits);
  Matrix d_fm = frontnet::front_backward(model.front, fwd.front.cache, d_front);
  features::embed_backward(fwd.fm, d_fm, model.tables, model.config.feature);
}

corpus::Label model_predict(const NetworkModel& model, const corpus::EncodedInstance& inst) {
  InstanceForward fwd = model_forward(model, inst, frontnet::DropoutMode::Infer);
  return fwd.probs[1] > fwd.probs[0] ? corpus::Label::True : corpus::Label::False;
}

double model_accuracy(const NetworkModel& model, const std::vector<corpus::EncodedInstance>& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const corpus::EncodedInstance& inst : data)
    if (model_predict(model, inst) == inst.label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace relnet::optim

namespace relnet::backnet {

FeatureDataset extract_feature_vectors(const optim::NetworkModel& model,
                                       const std::vector<corpus::EncodedInstance>& instances) {
  FeatureDataset data;
  const int k = model.front_output_dim();
  data.x = Matrix(instances.size(), k);
  data.y.resize(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    optim::InstanceForward fwd =
        optim::model_forward(model, instances[i], frontnet::DropoutMode::Infer);
    std::copy(fwd.front.output.begin(), fwd.front.output.end(), data.x.row(i));
    data.y[i] = instances[i].label == corpus::Label::True ? 1 : -1;
  }
  return data;
}

}  // namespace relnet::backnet
