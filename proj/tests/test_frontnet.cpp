#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relnet/frontnet.hpp"

using namespace relnet;
using namespace relnet::frontnet;

namespace {

features::FeatureMatrix matrix_input(const std::vector<std::vector<double>>& rows, int valid_len) {
  features::FeatureMatrix fm;
  fm.values = Matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), fm.values.row(r));
  fm.valid_len = valid_len;
  return fm;
}

ConvFront hand_conv() {
  ConvFront conv;
  conv.windows = {2};
  conv.filters_per_window = 1;
  conv.input_dim = 1;
  conv.weights.emplace_back("conv_w2", 2);
  conv.weights[0].value = {1.0, 1.0};
  conv.biases.emplace_back("conv_b2", 1);
  return conv;
}

const DropoutSpec kNoDropout{0.0, DropoutMode::Infer, 0};

}  // namespace

TEST_CASE("cnn_forward hand-computed tanh max pool") {
  features::FeatureMatrix fm = matrix_input({{0.1}, {0.2}, {0.3}}, 3);
  FrontResult r = cnn_forward(fm, hand_conv(), kNoDropout);
  REQUIRE(r.output.size() == 1);
  CHECK(r.output[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(r.output[0] == doctest::Approx(0.46212).epsilon(1e-4));
}

TEST_CASE("cnn_forward output length is filters x windows") {
  Rng rng(3);
  ConvFront conv = make_conv_front({2, 3, 4}, 150, 5, rng);
  CHECK(conv.output_dim() == 450);
  features::FeatureMatrix fm = matrix_input(std::vector<std::vector<double>>(8, std::vector<double>(5, 0.1)), 8);
  FrontResult r = cnn_forward(fm, conv, kNoDropout);
  CHECK(r.output.size() == 450);
}

TEST_CASE("cnn_forward zero weights give a zero vector") {
  ConvFront conv;
  conv.windows = {2, 3};
  conv.filters_per_window = 4;
  conv.input_dim = 3;
  for (int w : conv.windows) {
    conv.weights.emplace_back("w" + std::to_string(w), 4 * w * 3);
    conv.biases.emplace_back("b" + std::to_string(w), 4);
  }
  features::FeatureMatrix fm = matrix_input(std::vector<std::vector<double>>(6, {1.0, -2.0, 0.5}), 6);
  FrontResult r = cnn_forward(fm, conv, kNoDropout);
  for (double v : r.output) CHECK(v == 0.0);
}

TEST_CASE("cnn_forward rejects sequences shorter than the window") {
  Rng rng(3);
  ConvFront conv = make_conv_front({2, 3, 4}, 2, 2, rng);
  features::FeatureMatrix fm = matrix_input({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, 3);
  CHECK_THROWS_AS(cnn_forward(fm, conv, kNoDropout), DataError);
}

TEST_CASE("permuting filters permutes the pooled output identically") {
  Rng rng(9);
  ConvFront conv = make_conv_front({2}, 3, 2, rng);
  ConvFront permuted = conv;
  // swap filters 0 and 2 (rows of the weight block and their biases)
  for (int d = 0; d < 4; ++d)
    std::swap(permuted.weights[0].value[0 * 4 + d], permuted.weights[0].value[2 * 4 + d]);
  std::swap(permuted.biases[0].value[0], permuted.biases[0].value[2]);

  features::FeatureMatrix fm = matrix_input(
      {{0.3, -0.1}, {0.9, 0.4}, {-0.5, 0.2}, {0.1, 0.8}}, 4);
  FrontResult a = cnn_forward(fm, conv, kNoDropout);
  FrontResult b = cnn_forward(fm, permuted, kNoDropout);
  CHECK(a.output[0] == b.output[2]);
  CHECK(a.output[1] == b.output[1]);
  CHECK(a.output[2] == b.output[0]);
}

TEST_CASE("max-over-time pooling is invariant to pattern translation") {
  Rng rng(14);
  ConvFront conv = make_conv_front({2}, 3, 2, rng);
  std::vector<std::vector<double>> base(8, {0.0, 0.0});
  std::vector<std::vector<double>> shifted = base;
  const std::vector<std::vector<double>> pattern = {{2.0, -1.5}, {1.0, 2.5}};
  base[2] = pattern[0];
  base[3] = pattern[1];
  shifted[5] = pattern[0];
  shifted[6] = pattern[1];
  FrontResult a = cnn_forward(matrix_input(base, 8), conv, kNoDropout);
  FrontResult b = cnn_forward(matrix_input(shifted, 8), conv, kNoDropout);
  for (std::size_t i = 0; i < a.output.size(); ++i)
    CHECK(a.output[i] == doctest::Approx(b.output[i]).epsilon(1e-12));
}

TEST_CASE("lstm_forward zero weights produce a zero hidden state") {
  LstmFront front;
  front.direction = Direction::Forward;
  front.hidden = 3;
  front.input_dim = 2;
  front.cell.input_dim = 2;
  front.cell.hidden = 3;
  front.cell.w = Param("w", 4 * 3 * 2);
  front.cell.u = Param("u", 4 * 3 * 3);
  front.cell.b = Param("b", 4 * 3);
  features::FeatureMatrix fm = matrix_input({{1.0, 2.0}, {-1.0, 0.5}}, 2);
  FrontResult r = lstm_forward(fm, front, kNoDropout);
  REQUIRE(r.output.size() == 3);
  for (double v : r.output) CHECK(v == 0.0);
}

TEST_CASE("bidirectional lstm output is 2H wide") {
  Rng rng(5);
  LstmFront front = make_lstm_front(Direction::Bidirectional, 200, 4, rng);
  CHECK(front.output_dim() == 400);
  features::FeatureMatrix fm =
      matrix_input(std::vector<std::vector<double>>(3, {0.1, 0.2, 0.3, 0.4}), 3);
  FrontResult r = lstm_forward(fm, front, kNoDropout);
  CHECK(r.output.size() == 400);
}

TEST_CASE("single-step lstm matches the direct recurrence") {
  LstmFront front;
  front.direction = Direction::Forward;
  front.hidden = 1;
  front.input_dim = 1;
  front.cell.input_dim = 1;
  front.cell.hidden = 1;
  front.cell.w = Param("w", 4);
  front.cell.u = Param("u", 4);
  front.cell.b = Param("b", 4);
  front.cell.w.value = {0.7, -0.4, 1.1, 0.3};  // gate order i, f, g, o
  front.cell.b.value = {0.1, 0.2, -0.3, 0.05};
  const double x = 0.8;
  features::FeatureMatrix fm = matrix_input({{x}}, 1);
  FrontResult r = lstm_forward(fm, front, kNoDropout);

  const auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  const double i = sigmoid(0.7 * x + 0.1);
  const double g = std::tanh(1.1 * x - 0.3);
  const double o = sigmoid(0.3 * x + 0.05);
  const double c = i * g;  // forget gate has nothing to forget at step one
  REQUIRE(r.output.size() == 1);
  CHECK(r.output[0] == doctest::Approx(o * std::tanh(c)).epsilon(1e-12));
}

TEST_CASE("lstm_forward rejects an all-PAD sequence") {
  Rng rng(5);
  LstmFront front = make_lstm_front(Direction::Forward, 2, 2, rng);
  features::FeatureMatrix fm = matrix_input({{0.0, 0.0}, {0.0, 0.0}}, 0);
  CHECK_THROWS_AS(lstm_forward(fm, front, kNoDropout), DataError);
}

TEST_CASE("bidirectional equals independently computed directional passes") {
  Rng rng(31);
  LstmFront bi = make_lstm_front(Direction::Bidirectional, 3, 2, rng);

  LstmFront fwd;
  fwd.direction = Direction::Forward;
  fwd.hidden = 3;
  fwd.input_dim = 2;
  fwd.cell = bi.cell;

  LstmFront bwd;
  bwd.direction = Direction::Backward;
  bwd.hidden = 3;
  bwd.input_dim = 2;
  bwd.cell = *bi.back_cell;

  features::FeatureMatrix fm =
      matrix_input({{0.2, -0.4}, {0.9, 0.1}, {-0.3, 0.5}, {0.6, -0.2}}, 4);
  FrontResult rb = lstm_forward(fm, bi, kNoDropout);
  FrontResult rf = lstm_forward(fm, fwd, kNoDropout);
  FrontResult rr = lstm_forward(fm, bwd, kNoDropout);
  REQUIRE(rb.output.size() == 6);
  for (int h = 0; h < 3; ++h) {
    CHECK(rb.output[h] == rf.output[h]);
    CHECK(rb.output[3 + h] == rr.output[h]);
  }
}

TEST_CASE("lstm stops at the last non-PAD step") {
  Rng rng(8);
  LstmFront front = make_lstm_front(Direction::Forward, 2, 2, rng);
  features::FeatureMatrix with_pad =
      matrix_input({{0.5, -0.1}, {0.2, 0.7}, {0.0, 0.0}, {0.0, 0.0}}, 2);
  features::FeatureMatrix exact = matrix_input({{0.5, -0.1}, {0.2, 0.7}}, 2);
  CHECK(lstm_forward(with_pad, front, kNoDropout).output ==
        lstm_forward(exact, front, kNoDropout).output);
}

TEST_CASE("dropout rate 0 and INFER mode are identities") {
  const std::vector<double> v = {1.0, -2.0, 3.0};
  auto [out0, mask0] = dropout(v, {0.0, DropoutMode::Train, 7});
  CHECK(out0 == v);
  CHECK(mask0 == std::vector<double>{1.0, 1.0, 1.0});

  auto [out1, mask1] = dropout(v, {0.5, DropoutMode::Infer, 7});
  CHECK(out1 == v);
  CHECK(mask1 == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("dropout rejects rate >= 1") {
  CHECK_THROWS_AS(dropout({1.0}, {1.0, DropoutMode::Train, 0}), std::invalid_argument);
}

TEST_CASE("inverted dropout preserves the expectation") {
  const std::vector<double> ones(8, 1.0);
  double sum = 0.0;
  long count = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    auto [out, mask] = dropout(ones, {0.5, DropoutMode::Train, static_cast<std::uint64_t>(trial)});
    for (double v : out) sum += v;
    count += static_cast<long>(out.size());
  }
  const double mean = sum / static_cast<double>(count);
  CHECK(mean > 0.95);
  CHECK(mean < 1.05);
}

TEST_CASE("dropout is deterministic given the seed") {
  const std::vector<double> v(16, 2.0);
  auto [a, am] = dropout(v, {0.5, DropoutMode::Train, 1234});
  auto [b, bm] = dropout(v, {0.5, DropoutMode::Train, 1234});
  CHECK(a == b);
  CHECK(am == bm);
}

TEST_CASE("max-pool backward routes gradient only to the argmax window") {
  ConvFront conv = hand_conv();
  // position 1 wins: windows sum to 0.3 and 1.2
  features::FeatureMatrix fm = matrix_input({{0.1}, {0.2}, {1.0}}, 3);
  FrontResult r = cnn_forward(fm, conv, kNoDropout);
  Matrix d_input = cnn_backward(conv, r.cache, {1.0});
  CHECK(d_input.at(0, 0) == 0.0);
  CHECK(d_input.at(1, 0) != 0.0);
  CHECK(d_input.at(2, 0) != 0.0);
}

namespace {

// finite differences over front parameters and inputs against a linear probe
void check_front_gradients(FrontModel& front, features::FeatureMatrix& fm) {
  Rng rng(55);
  std::vector<double> probe(front.output_dim());
  for (double& p : probe) p = rng.uniform(-1.0, 1.0);

  const auto loss = [&] {
    FrontResult r = front_forward(fm, front, kNoDropout);
    double s = 0.0;
    for (std::size_t i = 0; i < r.output.size(); ++i) s += r.output[i] * probe[i];
    return s;
  };

  for (Param* p : front.params()) p->zero_grad();
  FrontResult r = front_forward(fm, front, kNoDropout);
  Matrix d_input = front_backward(front, r.cache, probe);

  const double eps = 1e-5;
  double max_rel = 0.0;
  for (Param* p : front.params()) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double fp = loss();
      p->value[i] = saved - eps;
      const double fmn = loss();
      p->value[i] = saved;
      const double numeric = (fp - fmn) / (2 * eps);
      max_rel = std::max(max_rel,
                         std::abs(p->grad[i] - numeric) / std::max(1.0, std::abs(numeric)));
    }
  }
  CHECK(max_rel < 1e-4);

  double max_rel_input = 0.0;
  for (std::size_t i = 0; i < fm.values.size(); ++i) {
    const double saved = fm.values.data()[i];
    fm.values.data()[i] = saved + eps;
    const double fp = loss();
    fm.values.data()[i] = saved - eps;
    const double fmn = loss();
    fm.values.data()[i] = saved;
    const double numeric = (fp - fmn) / (2 * eps);
    max_rel_input = std::max(
        max_rel_input, std::abs(d_input.data()[i] - numeric) / std::max(1.0, std::abs(numeric)));
  }
  CHECK(max_rel_input < 1e-4);
}

features::FeatureMatrix random_input(int t, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(t, std::vector<double>(d));
  for (auto& row : rows)
    for (double& x : row) x = rng.uniform(-0.8, 0.8);
  return matrix_input(rows, t);
}

}  // namespace

TEST_CASE("tiny cnn passes the finite-difference check") {
  Rng rng(17);
  FrontModel front;
  front.kind = Topology::Cnn;
  front.conv = make_conv_front({2, 3}, 2, 4, rng);
  features::FeatureMatrix fm = random_input(6, 4, 1001);
  check_front_gradients(front, fm);
}

TEST_CASE("tiny bi-lstm passes the finite-difference check") {
  Rng rng(18);
  FrontModel front;
  front.kind = Topology::Bilstm;
  front.lstm = make_lstm_front(Direction::Bidirectional, 4, 3, rng);
  features::FeatureMatrix fm = random_input(5, 3, 1002);
  check_front_gradients(front, fm);
}

TEST_CASE("tiny forward lstm passes the finite-difference check") {
  Rng rng(19);
  FrontModel front;
  front.kind = Topology::Lstm;
  front.lstm = make_lstm_front(Direction::Forward, 3, 3, rng);
  features::FeatureMatrix fm = random_input(5, 3, 1003);
  check_front_gradients(front, fm);
}

TEST_CASE("train-mode forward passes are deterministic given the seed") {
  Rng rng(20);
  FrontModel front;
  front.kind = Topology::Cnn;
  front.conv = make_conv_front({2}, 5, 3, rng);
  features::FeatureMatrix fm = random_input(6, 3, 2002);
  DropoutSpec drop{0.5, DropoutMode::Train, 909};
  FrontResult a = cnn_forward(fm, *front.conv, drop);
  FrontResult b = cnn_forward(fm, *front.conv, drop);
  CHECK(a.output == b.output);
}
