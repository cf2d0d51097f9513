#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/features.hpp"

// Front-part classifiers: a multi-window CNN with max-over-time pooling, or a
// single-layer LSTM / Bi-LSTM, both followed by dropout on the fixed-size
// output vector. Forward passes fill a ForwardCache holding everything the
// exact backward pass needs; the input FeatureMatrix must outlive the cache.

namespace relnet::frontnet {

enum class Topology { Cnn, Lstm, Bilstm };
enum class Direction { Forward, Backward, Bidirectional };
enum class DropoutMode { Train, Infer };

const char* topology_name(Topology t);

struct DropoutSpec {
  double rate = 0.0;
  DropoutMode mode = DropoutMode::Infer;
  std::uint64_t seed = 0;
};

struct ConvFront {
  std::vector<int> windows;
  int filters_per_window = 0;
  int input_dim = 0;
  std::vector<Param> weights;  // per window: filters x (window * D), tanh activation
  std::vector<Param> biases;   // per window: filters

  int output_dim() const { return filters_per_window * static_cast<int>(windows.size()); }
};

ConvFront make_conv_front(const std::vector<int>& windows, int filters_per_window, int input_dim,
                          Rng& rng);

// One LSTM cell; gates stacked [input, forget, candidate, output] along the
// 4H axis. Forget-gate bias starts at 1.0.
struct LstmCell {
  int input_dim = 0;
  int hidden = 0;
  Param w;  // 4H x D
  Param u;  // 4H x H
  Param b;  // 4H
};

struct LstmFront {
  Direction direction = Direction::Forward;
  int hidden = 0;
  int input_dim = 0;
  LstmCell cell;                      // forward (or single-direction) cell
  std::optional<LstmCell> back_cell;  // bidirectional only

  int output_dim() const { return direction == Direction::Bidirectional ? 2 * hidden : hidden; }
};

LstmFront make_lstm_front(Direction direction, int hidden, int input_dim, Rng& rng);

struct LstmStepCache {
  std::vector<double> i, f, g, o, c, tanh_c;
};

struct LstmPassCache {
  std::vector<LstmStepCache> steps;
  std::vector<int> time_index;         // processing step -> input row
  std::vector<std::vector<double>> h;  // h[0] = zero state, h[s+1] after step s
};

struct ForwardCache {
  Topology kind = Topology::Cnn;
  const Matrix* input = nullptr;
  int valid_len = 0;
  // CNN
  std::vector<std::vector<int>> conv_argmax;  // per window: argmax position per filter
  // LSTM
  LstmPassCache fwd, bwd;
  // shared
  std::vector<double> pre_dropout;  // front output before dropout
  std::vector<double> dropout_mask; // per-component scale; empty = identity
};

struct FrontResult {
  std::vector<double> output;
  ForwardCache cache;
};

// Inverted dropout. TRAIN zeroes each component with probability rate and
// scales survivors by 1/(1-rate); INFER is the identity. Returns the output
// and the applied per-component scale mask.
std::pair<std::vector<double>, std::vector<double>> dropout(const std::vector<double>& v,
                                                            const DropoutSpec& spec);

// Streaming variant used by the training loop: draws from `rng` instead of
// reseeding per call.
std::vector<double> dropout_mask(std::size_t n, double rate, DropoutMode mode, Rng& rng);

FrontResult cnn_forward(const features::FeatureMatrix& fm, const ConvFront& conv,
                        const DropoutSpec& drop, Rng* rng = nullptr);

FrontResult lstm_forward(const features::FeatureMatrix& fm, const LstmFront& front,
                         const DropoutSpec& drop, Rng* rng = nullptr);

// Exact gradients of a scalar loss w.r.t. the front parameters (accumulated
// into the Param grad buffers) and the input rows (returned).
Matrix cnn_backward(ConvFront& conv, const ForwardCache& cache, const std::vector<double>& grad_out);
Matrix lstm_backward(LstmFront& front, const ForwardCache& cache, const std::vector<double>& grad_out);

// Topology-dispatching façade used by the model plumbing.
struct FrontModel {
  Topology kind = Topology::Cnn;
  std::optional<ConvFront> conv;
  std::optional<LstmFront> lstm;

  int output_dim() const;
  std::vector<Param*> params();
};

FrontResult front_forward(const features::FeatureMatrix& fm, const FrontModel& front,
                          const DropoutSpec& drop, Rng* rng = nullptr);
Matrix front_backward(FrontModel& front, const ForwardCache& cache,
                      const std::vector<double>& grad_out);

}  // namespace relnet::frontnet
