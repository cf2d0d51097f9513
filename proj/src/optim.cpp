#include "relnet/optim.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relnet/kernels.hpp"

namespace relnet::optim {

using nlohmann::json;

void AdamState::step(const std::vector<Param*>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i]->size(), 0.0);
      v_[i].assign(params[i]->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("adam_step: parameter list changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    if (p.size() != m_[i].size()) throw std::invalid_argument("adam_step: shape mismatch");
    kernels::adam_update(p.value.data(), p.grad.data(), m_[i].data(), v_[i].data(), p.size(),
                         cfg_.lr, cfg_.beta1, cfg_.beta2, cfg_.eps, bc1, bc2);
  }
}

void adam_step(AdamState& state, const std::vector<Param*>& params) { state.step(params); }

TrainResult train(NetworkModel& model, const std::vector<corpus::EncodedInstance>& data,
                  const TrainConfig& cfg) {
  if (data.empty()) throw DataError("train: no training instances");
  if (cfg.epochs < 1 || cfg.batch_size < 1)
    throw std::invalid_argument("train: epochs and batch_size must be >= 1");

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  AdamState adam(adam_cfg);
  std::vector<Param*> params = model.trainable_params();
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));

  TrainResult result;
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;

    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      model.zero_grads();
      for (std::size_t k = begin; k < end; ++k) {
        const corpus::EncodedInstance& inst = data[order[k]];
        InstanceForward fwd =
            model_forward(model, inst, frontnet::DropoutMode::Train, &dropout_rng);
        backnet::CrossEntropyResult ce = backnet::cross_entropy(fwd.probs, inst.label);
        epoch_loss += ce.loss;
        std::array<double, 2> d_logits = {ce.d_logits[0] * inv_batch, ce.d_logits[1] * inv_batch};
        model_backward(model, fwd, d_logits);
      }
      adam.step(params);
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return result;
}

double finite_difference_check(const std::function<double()>& loss_fn,
                               const std::vector<Param*>& params, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("finite_difference_check: eps must be positive");
  double max_rel = 0.0;
  for (Param* p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double f_plus = loss_fn();
      p->value[i] = saved - eps;
      const double f_minus = loss_fn();
      p->value[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double rel = std::abs(p->grad[i] - numeric) / std::max(1.0, std::abs(numeric));
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'R', 'N', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

json config_to_json(const NetworkConfig& c) {
  json j;
  j["seq_len"] = c.encode.seq_len;
  j["clip"] = c.encode.clip;
  j["max_word_len"] = c.encode.max_word_len;
  j["word_dim"] = c.feature.word_dim;
  j["position_dim"] = c.feature.position_dim;
  j["postag_dim"] = c.feature.postag_dim;
  j["char_enabled"] = c.feature.char_conv.enabled;
  j["char_dim"] = c.feature.char_conv.char_dim;
  j["char_filters"] = c.feature.char_conv.char_filters;
  j["char_window"] = c.feature.char_conv.char_window;
  j["topology"] = frontnet::topology_name(c.topology);
  j["cnn_windows"] = c.cnn_windows;
  j["cnn_filters"] = c.cnn_filters;
  j["lstm_hidden"] = c.lstm_hidden;
  j["dropout_rate"] = c.dropout_rate;
  j["word_trainable"] = c.word_trainable;
  j["word_vocab"] = c.word_vocab;
  j["pos_vocab"] = c.pos_vocab;
  j["char_vocab"] = c.char_vocab;
  return j;
}

frontnet::Topology topology_from_name(const std::string& name) {
  if (name == "CNN") return frontnet::Topology::Cnn;
  if (name == "LSTM") return frontnet::Topology::Lstm;
  if (name == "Bi-LSTM") return frontnet::Topology::Bilstm;
  throw DataError("unknown topology name: " + name);
}

NetworkConfig config_from_json(const json& j) {
  NetworkConfig c;
  c.encode.seq_len = j.at("seq_len").get<int>();
  c.encode.clip = j.at("clip").get<int>();
  c.encode.max_word_len = j.at("max_word_len").get<int>();
  c.feature.word_dim = j.at("word_dim").get<int>();
  c.feature.position_dim = j.at("position_dim").get<int>();
  c.feature.postag_dim = j.at("postag_dim").get<int>();
  c.feature.char_conv.enabled = j.at("char_enabled").get<bool>();
  c.feature.char_conv.char_dim = j.at("char_dim").get<int>();
  c.feature.char_conv.char_filters = j.at("char_filters").get<int>();
  c.feature.char_conv.char_window = j.at("char_window").get<int>();
  c.topology = topology_from_name(j.at("topology").get<std::string>());
  c.cnn_windows = j.at("cnn_windows").get<std::vector<int>>();
  c.cnn_filters = j.at("cnn_filters").get<int>();
  c.lstm_hidden = j.at("lstm_hidden").get<int>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.word_trainable = j.at("word_trainable").get<bool>();
  c.word_vocab = j.at("word_vocab").get<int>();
  c.pos_vocab = j.at("pos_vocab").get<int>();
  c.char_vocab = j.at("char_vocab").get<int>();
  return c;
}

void append_bytes(std::string& buf, const void* data, std::size_t len) {
  buf.append(static_cast<const char*>(data), len);
}

void append_u32(std::string& buf, std::uint32_t v) { append_bytes(buf, &v, sizeof v); }
void append_u64(std::string& buf, std::uint64_t v) { append_bytes(buf, &v, sizeof v); }

class Reader {
 public:
  Reader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}

  const void* take(std::size_t len) {
    if (pos_ + len > buf_.size()) throw DataError(path_ + ": truncated checkpoint");
    const void* p = buf_.data() + pos_;
    pos_ += len;
    return p;
  }

  std::uint32_t take_u32() {
    std::uint32_t v;
    std::memcpy(&v, take(sizeof v), sizeof v);
    return v;
  }

  std::uint64_t take_u64() {
    std::uint64_t v;
    std::memcpy(&v, take(sizeof v), sizeof v);
    return v;
  }

  std::string take_string(std::size_t len) {
    return std::string(static_cast<const char*>(take(len)), len);
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::string& buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const NetworkModel& model, const std::string& path) {
  std::string buf;
  append_bytes(buf, kMagic, sizeof kMagic);
  append_u32(buf, kVersion);
  const std::string cfg = config_to_json(model.config).dump();
  append_u64(buf, cfg.size());
  append_bytes(buf, cfg.data(), cfg.size());

  std::vector<Param*> params = const_cast<NetworkModel&>(model).all_params();
  append_u64(buf, params.size());
  for (const Param* p : params) {
    append_u64(buf, p->name.size());
    append_bytes(buf, p->name.data(), p->name.size());
    append_u64(buf, p->value.size());
    append_bytes(buf, p->value.data(), p->value.size() * sizeof(double));
  }
  append_u32(buf, crc32(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint file: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

NetworkModel load_checkpoint(const std::string& path,
                             std::optional<frontnet::Topology> expected_topology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();

  if (buf.size() < sizeof kMagic + sizeof(std::uint32_t) * 2)
    throw DataError(path + ": truncated checkpoint");
  const std::size_t body = buf.size() - sizeof(std::uint32_t);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, buf.data() + body, sizeof stored_crc);
  if (crc32(buf.data(), body) != stored_crc)
    throw DataError(path + ": checksum mismatch (corrupted checkpoint)");

  Reader r(buf, path);
  if (std::memcmp(r.take(sizeof kMagic), kMagic, sizeof kMagic) != 0)
    throw DataError(path + ": not a checkpoint file");
  const std::uint32_t version = r.take_u32();
  if (version != kVersion)
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));

  const std::uint64_t cfg_len = r.take_u64();
  NetworkConfig config;
  try {
    config = config_from_json(json::parse(r.take_string(cfg_len)));
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed checkpoint config: " + e.what());
  }
  if (expected_topology && config.topology != *expected_topology)
    throw DataError(path + ": checkpoint topology is " +
                    std::string(frontnet::topology_name(config.topology)) + ", expected " +
                    frontnet::topology_name(*expected_topology));

  NetworkModel model = build_network(config, 0);
  std::vector<Param*> params = model.all_params();
  const std::uint64_t block_count = r.take_u64();
  if (block_count != params.size())
    throw DataError(path + ": checkpoint has " + std::to_string(block_count) +
                    " parameter blocks, model needs " + std::to_string(params.size()));
  for (Param* p : params) {
    const std::uint64_t name_len = r.take_u64();
    const std::string name = r.take_string(name_len);
    if (name != p->name)
      throw DataError(path + ": parameter block '" + name + "' does not match expected '" +
                      p->name + "'");
    const std::uint64_t count = r.take_u64();
    if (count != p->value.size())
      throw DataError(path + ": parameter '" + name + "' has " + std::to_string(count) +
                      " values, expected " + std::to_string(p->value.size()));
    std::memcpy(p->value.data(), r.take(count * sizeof(double)), count * sizeof(double));
  }
  if (r.pos() != body) throw DataError(path + ": trailing bytes in checkpoint");
  return model;
}

}  // namespace relnet::optim
