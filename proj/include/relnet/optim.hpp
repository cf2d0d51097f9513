#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relnet/model.hpp"

// Adam optimization, the end-to-end training loop, finite-difference gradient
// verification and binary model checkpoints.

namespace relnet::optim {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(const AdamConfig& cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

  // One update over every parameter block; reads Param::grad.
  void step(const std::vector<Param*>& params);

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

void adam_step(AdamState& state, const std::vector<Param*>& params);

struct TrainConfig {
  int epochs = 2;
  int batch_size = 32;
  double lr = 0.001;
  std::uint64_t seed = 0;  // expanded into shuffle/dropout streams
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

TrainResult train(NetworkModel& model, const std::vector<corpus::EncodedInstance>& data,
                  const TrainConfig& cfg);

// Central finite differences per coordinate against the analytic gradients
// already stored in each Param's grad buffer. Returns the maximum relative
// error with normalization max(1, |numeric|).
double finite_difference_check(const std::function<double()>& loss_fn,
                               const std::vector<Param*>& params, double eps);

// Versioned binary checkpoint with a whole-file CRC-32. Round trips are
// bit-exact. Layout: magic "RNCP", u32 version, u64 config length, config
// JSON, u64 block count, per block (u64 name length, name, u64 value count,
// raw little-endian doubles), u32 CRC of everything before it.
void save_checkpoint(const NetworkModel& model, const std::string& path);
NetworkModel load_checkpoint(const std::string& path,
                             std::optional<frontnet::Topology> expected_topology = std::nullopt);

}  // namespace relnet::optim
