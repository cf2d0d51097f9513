#include "relnet/frontnet.hpp"

#include <cmath>
#include <stdexcept>

#include "relnet/kernels.hpp"

namespace relnet::frontnet {

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::Cnn:
      return "CNN";
    case Topology::Lstm:
      return "LSTM";
    case Topology::Bilstm:
      return "Bi-LSTM";
  }
  return "?";
}

ConvFront make_conv_front(const std::vector<int>& windows, int filters_per_window, int input_dim,
                          Rng& rng) {
  if (windows.empty() || filters_per_window <= 0 || input_dim <= 0)
    throw std::invalid_argument("make_conv_front: bad shape");
  ConvFront conv;
  conv.windows = windows;
  conv.filters_per_window = filters_per_window;
  conv.input_dim = input_dim;
  for (int w : windows) {
    Param weight("conv_w" + std::to_string(w),
                 static_cast<std::size_t>(filters_per_window) * w * input_dim);
    for (double& x : weight.value) x = rng.uniform(-0.05, 0.05);
    conv.weights.push_back(std::move(weight));
    conv.biases.emplace_back("conv_b" + std::to_string(w), filters_per_window);
  }
  return conv;
}

namespace {

LstmCell make_cell(const std::string& prefix, int hidden, int input_dim, Rng& rng) {
  LstmCell cell;
  cell.input_dim = input_dim;
  cell.hidden = hidden;
  cell.w = Param(prefix + "_w", static_cast<std::size_t>(4) * hidden * input_dim);
  cell.u = Param(prefix + "_u", static_cast<std::size_t>(4) * hidden * hidden);
  cell.b = Param(prefix + "_b", static_cast<std::size_t>(4) * hidden);
  for (double& x : cell.w.value) x = rng.uniform(-0.05, 0.05);
  for (double& x : cell.u.value) x = rng.uniform(-0.05, 0.05);
  for (int h = 0; h < hidden; ++h) cell.b.value[hidden + h] = 1.0;  // forget gate
  return cell;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmFront make_lstm_front(Direction direction, int hidden, int input_dim, Rng& rng) {
  if (hidden <= 0 || input_dim <= 0) throw std::invalid_argument("make_lstm_front: bad shape");
  LstmFront front;
  front.direction = direction;
  front.hidden = hidden;
  front.input_dim = input_dim;
  front.cell = make_cell(direction == Direction::Backward ? "lstm_bwd" : "lstm_fwd", hidden,
                         input_dim, rng);
  if (direction == Direction::Bidirectional)
    front.back_cell = make_cell("lstm_bwd", hidden, input_dim, rng);
  return front;
}

std::vector<double> dropout_mask(std::size_t n, double rate, DropoutMode mode, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  std::vector<double> mask(n, 1.0);
  if (mode == DropoutMode::Infer || rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < n; ++i) mask[i] = rng.next_double() < rate ? 0.0 : keep_scale;
  return mask;
}

std::pair<std::vector<double>, std::vector<double>> dropout(const std::vector<double>& v,
                                                            const DropoutSpec& spec) {
  Rng rng(derive_seed(spec.seed, "dropout"));
  std::vector<double> mask = dropout_mask(v.size(), spec.rate, spec.mode, rng);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * mask[i];
  return {out, mask};
}

namespace {

void apply_dropout(FrontResult& result, const DropoutSpec& drop, Rng* rng) {
  result.cache.pre_dropout = result.output;
  if (drop.mode == DropoutMode::Infer || drop.rate == 0.0) {
    result.cache.dropout_mask.clear();
    return;
  }
  std::vector<double> mask;
  if (rng) {
    mask = dropout_mask(result.output.size(), drop.rate, drop.mode, *rng);
  } else {
    Rng local(derive_seed(drop.seed, "dropout"));
    mask = dropout_mask(result.output.size(), drop.rate, drop.mode, local);
  }
  for (std::size_t i = 0; i < result.output.size(); ++i) result.output[i] *= mask[i];
  result.cache.dropout_mask = std::move(mask);
}

}  // namespace

FrontResult cnn_forward(const features::FeatureMatrix& fm, const ConvFront& conv,
                        const DropoutSpec& drop, Rng* rng) {
  const int T = static_cast<int>(fm.values.rows());
  const int D = static_cast<int>(fm.values.cols());
  if (D != conv.input_dim) throw std::invalid_argument("cnn_forward: feature dim mismatch");
  int max_window = 0;
  for (int w : conv.windows) max_window = std::max(max_window, w);
  if (T < max_window)
    throw DataError("sequence length " + std::to_string(T) + " shorter than window " +
                    std::to_string(max_window));

  FrontResult result;
  result.cache.kind = Topology::Cnn;
  result.cache.input = &fm.values;
  result.cache.valid_len = fm.valid_len;
  result.output.resize(conv.output_dim());
  result.cache.conv_argmax.resize(conv.windows.size());

  const double* base = fm.values.row(0);
  int out_off = 0;
  for (std::size_t wi = 0; wi < conv.windows.size(); ++wi) {
    const int w = conv.windows[wi];
    const int flat = w * D;
    const int positions = T - w + 1;
    std::vector<int>& argmax = result.cache.conv_argmax[wi];
    argmax.assign(conv.filters_per_window, 0);
    for (int f = 0; f < conv.filters_per_window; ++f) {
      const double* filter = conv.weights[wi].value.data() + static_cast<std::size_t>(f) * flat;
      const double bias = conv.biases[wi].value[f];
      double best = -HUGE_VAL;
      int best_pos = 0;
      // convolve over the full padded length; ties keep the lowest position
      for (int p = 0; p < positions; ++p) {
        const double pre = kernels::dot(filter, base + static_cast<std::size_t>(p) * D, flat) + bias;
        if (pre > best) {
          best = pre;
          best_pos = p;
        }
      }
      result.output[out_off + f] = std::tanh(best);
      argmax[f] = best_pos;
    }
    out_off += conv.filters_per_window;
  }
  apply_dropout(result, drop, rng);
  return result;
}

namespace {

// Runs one LSTM pass over the non-PAD rows of `input` in the order given by
// `time_index`, returning the final hidden state.
std::vector<double> lstm_pass(const Matrix& input, const LstmCell& cell,
                              const std::vector<int>& time_index, LstmPassCache& cache) {
  const int H = cell.hidden;
  const int D = cell.input_dim;
  const int n = static_cast<int>(time_index.size());
  cache.steps.clear();
  cache.steps.resize(n);
  cache.time_index = time_index;
  cache.h.assign(n + 1, std::vector<double>(H, 0.0));

  std::vector<double> c_prev(H, 0.0);
  for (int s = 0; s < n; ++s) {
    const double* x = input.row(time_index[s]);
    const std::vector<double>& h_prev = cache.h[s];
    LstmStepCache& step = cache.steps[s];
    step.i.resize(H);
    step.f.resize(H);
    step.g.resize(H);
    step.o.resize(H);
    step.c.resize(H);
    step.tanh_c.resize(H);
    for (int h = 0; h < H; ++h) {
      const auto gate_pre = [&](int gate) {
        const std::size_t r = static_cast<std::size_t>(gate) * H + h;
        return kernels::dot(cell.w.value.data() + r * D, x, D) +
               kernels::dot(cell.u.value.data() + r * H, h_prev.data(), H) + cell.b.value[r];
      };
      step.i[h] = sigmoid(gate_pre(0));
      step.f[h] = sigmoid(gate_pre(1));
      step.g[h] = std::tanh(gate_pre(2));
      step.o[h] = sigmoid(gate_pre(3));
      step.c[h] = step.f[h] * c_prev[h] + step.i[h] * step.g[h];
      step.tanh_c[h] = std::tanh(step.c[h]);
      cache.h[s + 1][h] = step.o[h] * step.tanh_c[h];
    }
    c_prev = step.c;
  }
  return cache.h[n];
}

}  // namespace

FrontResult lstm_forward(const features::FeatureMatrix& fm, const LstmFront& front,
                         const DropoutSpec& drop, Rng* rng) {
  const int D = static_cast<int>(fm.values.cols());
  if (D != front.input_dim) throw std::invalid_argument("lstm_forward: feature dim mismatch");
  const int n = fm.valid_len;
  if (n <= 0) throw DataError("lstm_forward: all-PAD sequence");

  FrontResult result;
  result.cache.kind = front.direction == Direction::Bidirectional ? Topology::Bilstm : Topology::Lstm;
  result.cache.input = &fm.values;
  result.cache.valid_len = n;

  std::vector<int> fwd_order(n), bwd_order(n);
  for (int s = 0; s < n; ++s) {
    fwd_order[s] = s;
    bwd_order[s] = n - 1 - s;
  }

  switch (front.direction) {
    case Direction::Forward:
      result.output = lstm_pass(fm.values, front.cell, fwd_order, result.cache.fwd);
      break;
    case Direction::Backward:
      result.output = lstm_pass(fm.values, front.cell, bwd_order, result.cache.bwd);
      break;
    case Direction::Bidirectional: {
      std::vector<double> hf = lstm_pass(fm.values, front.cell, fwd_order, result.cache.fwd);
      std::vector<double> hb = lstm_pass(fm.values, *front.back_cell, bwd_order, result.cache.bwd);
      result.output = hf;
      result.output.insert(result.output.end(), hb.begin(), hb.end());
      break;
    }
  }
  apply_dropout(result, drop, rng);
  return result;
}

namespace {

void lstm_pass_backward(LstmCell& cell, const LstmPassCache& cache, const Matrix& input,
                        const std::vector<double>& dh_final, Matrix& d_input) {
  const int H = cell.hidden;
  const int D = cell.input_dim;
  const int n = static_cast<int>(cache.steps.size());
  std::vector<double> dh = dh_final;
  std::vector<double> dc(H, 0.0);
  std::vector<double> dpre(static_cast<std::size_t>(4) * H);
  const std::vector<double> zeros(H, 0.0);

  for (int s = n - 1; s >= 0; --s) {
    const LstmStepCache& step = cache.steps[s];
    const std::vector<double>& h_prev = cache.h[s];
    const std::vector<double>& c_prev = s > 0 ? cache.steps[s - 1].c : zeros;
    const double* x = input.row(cache.time_index[s]);

    for (int h = 0; h < H; ++h) {
      const double d_o = dh[h] * step.tanh_c[h];
      const double dch = dc[h] + dh[h] * step.o[h] * (1.0 - step.tanh_c[h] * step.tanh_c[h]);
      const double d_i = dch * step.g[h];
      const double d_f = dch * c_prev[h];
      const double d_g = dch * step.i[h];
      dc[h] = dch * step.f[h];
      dpre[0 * H + h] = d_i * step.i[h] * (1.0 - step.i[h]);
      dpre[1 * H + h] = d_f * step.f[h] * (1.0 - step.f[h]);
      dpre[2 * H + h] = d_g * (1.0 - step.g[h] * step.g[h]);
      dpre[3 * H + h] = d_o * step.o[h] * (1.0 - step.o[h]);
    }

    double* dx = d_input.row(cache.time_index[s]);
    std::fill(dh.begin(), dh.end(), 0.0);
    for (int r = 0; r < 4 * H; ++r) {
      const double g = dpre[r];
      if (g == 0.0) continue;
      kernels::axpy(g, x, cell.w.grad.data() + static_cast<std::size_t>(r) * D, D);
      kernels::axpy(g, h_prev.data(), cell.u.grad.data() + static_cast<std::size_t>(r) * H, H);
      cell.b.grad[r] += g;
      kernels::axpy(g, cell.w.value.data() + static_cast<std::size_t>(r) * D, dx, D);
      kernels::axpy(g, cell.u.value.data() + static_cast<std::size_t>(r) * H, dh.data(), H);
    }
  }
}

std::vector<double> dropout_backward(const ForwardCache& cache, const std::vector<double>& grad_out) {
  if (cache.dropout_mask.empty()) return grad_out;
  if (cache.dropout_mask.size() != grad_out.size())
    throw std::invalid_argument("front_backward: gradient size mismatch");
  std::vector<double> g(grad_out.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_out[i] * cache.dropout_mask[i];
  return g;
}

}  // namespace

Matrix cnn_backward(ConvFront& conv, const ForwardCache& cache, const std::vector<double>& grad_out) {
  if (!cache.input || cache.kind != Topology::Cnn)
    throw std::invalid_argument("cnn_backward: cache does not come from cnn_forward");
  if (static_cast<int>(grad_out.size()) != conv.output_dim())
    throw std::invalid_argument("cnn_backward: gradient size mismatch");
  const Matrix& input = *cache.input;
  const int D = conv.input_dim;
  Matrix d_input(input.rows(), input.cols());
  const std::vector<double> dvec = dropout_backward(cache, grad_out);

  int out_off = 0;
  for (std::size_t wi = 0; wi < conv.windows.size(); ++wi) {
    const int w = conv.windows[wi];
    const int flat = w * D;
    for (int f = 0; f < conv.filters_per_window; ++f) {
      const double g = dvec[out_off + f];
      if (g == 0.0) continue;
      const double out = cache.pre_dropout[out_off + f];
      const double delta = g * (1.0 - out * out);  // tanh'
      const int p = cache.conv_argmax[wi][f];
      const double* window = input.row(0) + static_cast<std::size_t>(p) * D;
      kernels::axpy(delta, window,
                    conv.weights[wi].grad.data() + static_cast<std::size_t>(f) * flat, flat);
      conv.biases[wi].grad[f] += delta;
      kernels::axpy(delta, conv.weights[wi].value.data() + static_cast<std::size_t>(f) * flat,
                    d_input.row(0) + static_cast<std::size_t>(p) * D, flat);
    }
    out_off += conv.filters_per_window;
  }
  return d_input;
}

Matrix lstm_backward(LstmFront& front, const ForwardCache& cache,
                     const std::vector<double>& grad_out) {
  if (!cache.input || cache.kind == Topology::Cnn)
    throw std::invalid_argument("lstm_backward: cache does not come from lstm_forward");
  if (static_cast<int>(grad_out.size()) != front.output_dim())
    throw std::invalid_argument("lstm_backward: gradient size mismatch");
  const Matrix& input = *cache.input;
  Matrix d_input(input.rows(), input.cols());
  const std::vector<double> dvec = dropout_backward(cache, grad_out);
  const int H = front.hidden;

  switch (front.direction) {
    case Direction::Forward:
      lstm_pass_backward(front.cell, cache.fwd, input, dvec, d_input);
      break;
    case Direction::Backward:
      lstm_pass_backward(front.cell, cache.bwd, input, dvec, d_input);
      break;
    case Direction::Bidirectional: {
      std::vector<double> dhf(dvec.begin(), dvec.begin() + H);
      std::vector<double> dhb(dvec.begin() + H, dvec.end());
      lstm_pass_backward(front.cell, cache.fwd, input, dhf, d_input);
      lstm_pass_backward(*front.back_cell, cache.bwd, input, dhb, d_input);
      break;
    }
  }
  return d_input;
}

int FrontModel::output_dim() const {
  return kind == Topology::Cnn ? conv->output_dim() : lstm->output_dim();
}

std::vector<Param*> FrontModel::params() {
  std::vector<Param*> out;
  if (kind == Topology::Cnn) {
    for (std::size_t i = 0; i < conv->weights.size(); ++i) {
      out.push_back(&conv->weights[i]);
      out.push_back(&conv->biases[i]);
    }
  } else {
    out.push_back(&lstm->cell.w);
    out.push_back(&lstm->cell.u);
    out.push_back(&lstm->cell.b);
    if (lstm->back_cell) {
      out.push_back(&lstm->back_cell->w);
      out.push_back(&lstm->back_cell->u);
      out.push_back(&lstm->back_cell->b);
    }
  }
  return out;
}

FrontResult front_forward(const features::FeatureMatrix& fm, const FrontModel& front,
                          const DropoutSpec& drop, Rng* rng) {
  if (front.kind == Topology::Cnn) return cnn_forward(fm, *front.conv, drop, rng);
  return lstm_forward(fm, *front.lstm, drop, rng);
}

Matrix front_backward(FrontModel& front, const ForwardCache& cache,
                      const std::vector<double>& grad_out) {
  if (front.kind == Topology::Cnn) return cnn_backward(*front.conv, cache, grad_out);
  return lstm_backward(*front.lstm, cache, grad_out);
}

}  // namespace relnet::frontnet
