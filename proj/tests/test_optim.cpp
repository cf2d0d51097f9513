#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "relnet/optim.hpp"
#include "relnet/synthetic.hpp"
#include "support/test_util.hpp"

using namespace relnet;
using namespace relnet::optim;
using relnet::testsupport::TempFile;

namespace {

struct Pipeline {
  corpus::Vocabulary vocab;
  std::vector<corpus::EncodedInstance> instances;
  NetworkConfig config;

  explicit Pipeline(int sentences = 12, std::uint64_t seed = 71,
                    frontnet::Topology topo = frontnet::Topology::Cnn) {
    corpus::SyntheticSpec spec;
    spec.sentences = sentences;
    std::vector<corpus::Sentence> sents = corpus::generate_synthetic_corpus(spec, seed);
    vocab = corpus::build_vocabulary(sents, 1);
    config.encode = {30, 50, 8};
    instances = corpus::encode_corpus(sents, vocab, config.encode,
                                      corpus::UnlabeledPolicy::AssumeFalse);
    config.feature.word_dim = 8;
    config.feature.position_dim = 4;
    config.feature.postag_dim = 4;
    config.topology = topo;
    config.cnn_windows = {2, 3};
    config.cnn_filters = 4;
    config.lstm_hidden = 4;
    config.dropout_rate = 0.0;
    config.word_trainable = true;
    config.word_vocab = static_cast<int>(vocab.word_count());
    config.pos_vocab = static_cast<int>(vocab.pos_count());
    config.char_vocab = static_cast<int>(vocab.char_count());
  }
};

std::vector<double> snapshot(NetworkModel& model) {
  std::vector<double> all;
  for (Param* p : model.all_params()) all.insert(all.end(), p->value.begin(), p->value.end());
  return all;
}

}  // namespace

TEST_CASE("adam first step is lr times the unit step") {
  Param p("p", 1);
  p.value = {1.0};
  p.grad = {2.0};
  AdamState adam;
  adam.step({&p});
  CHECK(p.value[0] == doctest::Approx(0.999).epsilon(1e-9));
  CHECK(adam.step_count() == 1);
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
  Param p("p", 3);
  p.value = {1.0, -2.0, 0.5};
  AdamState adam;
  adam.step({&p});
  CHECK(p.value == std::vector<double>{1.0, -2.0, 0.5});
  CHECK(adam.step_count() == 1);
}

TEST_CASE("adam shrinks a parameter monotonically under constant gradient") {
  Param p("p", 1);
  p.value = {1.0};
  AdamState adam;
  double prev = 1.0;
  for (int step = 0; step < 5; ++step) {
    p.grad = {2.0};
    adam.step({&p});
    CHECK(p.value[0] < prev);
    prev = p.value[0];
  }
}

TEST_CASE("adam rejects a changed parameter list") {
  Param p("p", 2), q("q", 3);
  AdamState adam;
  adam.step({&p});
  CHECK_THROWS_AS(adam.step({&p, &q}), std::invalid_argument);
}

TEST_CASE("train config defaults to two epochs") {
  TrainConfig cfg;
  CHECK(cfg.epochs == 2);
  CHECK(cfg.batch_size == 32);
}

TEST_CASE("train records one loss per epoch and is deterministic") {
  Pipeline pl;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 5;

  NetworkModel a = build_network(pl.config, 17);
  TrainResult ra = train(a, pl.instances, cfg);
  REQUIRE(ra.epoch_loss.size() == 3);

  NetworkModel b = build_network(pl.config, 17);
  TrainResult rb = train(b, pl.instances, cfg);
  CHECK(ra.epoch_loss == rb.epoch_loss);
  CHECK(snapshot(a) == snapshot(b));
}

TEST_CASE("train rejects empty data") {
  Pipeline pl;
  NetworkModel model = build_network(pl.config, 1);
  CHECK_THROWS_AS(train(model, {}, TrainConfig{}), DataError);
}

TEST_CASE("a small first step does not increase the batch loss") {
  Pipeline pl;
  NetworkModel model = build_network(pl.config, 23);
  std::vector<corpus::EncodedInstance> batch(pl.instances.begin(),
                                             pl.instances.begin() + std::min<std::size_t>(8, pl.instances.size()));
  const auto batch_loss = [&] {
    double total = 0.0;
    for (const corpus::EncodedInstance& inst : batch) {
      InstanceForward fwd = model_forward(model, inst, frontnet::DropoutMode::Infer);
      total += backnet::cross_entropy(fwd.probs, inst.label).loss;
    }
    return total / static_cast<double>(batch.size());
  };
  const double before = batch_loss();
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = static_cast<int>(batch.size());
  cfg.lr = 1e-3;
  cfg.seed = 9;
  train(model, batch, cfg);
  const double after = batch_loss();
  CHECK(after <= before + 1e-6);
}

TEST_CASE("frozen word table is bit-identical after training") {
  Pipeline pl;
  NetworkConfig cfg = pl.config;
  cfg.word_trainable = false;
  NetworkModel model = build_network(cfg, 3);
  const std::vector<double> before = model.tables.word.weights.value;
  TrainConfig tc;
  tc.epochs = 1;
  tc.seed = 2;
  train(model, pl.instances, tc);
  CHECK(model.tables.word.weights.value == before);
}

TEST_CASE("finite_difference_check is exact on quadratics and linear maps") {
  Param p("p", 1);
  p.value = {3.0};
  p.grad = {6.0};  // d(p^2)/dp at p = 3
  const auto quad = [&] { return p.value[0] * p.value[0]; };
  CHECK(finite_difference_check(quad, {&p}, 1e-5) < 1e-10);

  Param q("q", 2);
  q.value = {1.0, -2.0};
  q.grad = {4.0, 2.5};
  const auto linear = [&] { return 4.0 * q.value[0] + 2.5 * q.value[1]; };
  // exact up to the rounding of the difference quotient itself
  CHECK(finite_difference_check(linear, {&q}, 1e-5) < 1e-10);
}

TEST_CASE("full tiny network passes the finite-difference check") {
  Pipeline pl(8, 31);
  NetworkConfig cfg = pl.config;
  cfg.feature.char_conv = {true, 2, 3, 2};
  NetworkModel model = build_network(cfg, 13);
  std::vector<corpus::EncodedInstance> batch(pl.instances.begin(), pl.instances.begin() + 3);

  const auto loss = [&] {
    double total = 0.0;
    for (const corpus::EncodedInstance& inst : batch) {
      InstanceForward fwd = model_forward(model, inst, frontnet::DropoutMode::Infer);
      total += backnet::cross_entropy(fwd.probs, inst.label).loss;
    }
    return total;
  };

  model.zero_grads();
  for (const corpus::EncodedInstance& inst : batch) {
    InstanceForward fwd = model_forward(model, inst, frontnet::DropoutMode::Infer);
    model_backward(model, fwd, backnet::cross_entropy(fwd.probs, inst.label).d_logits);
  }
  CHECK(finite_difference_check(loss, model.trainable_params(), 1e-5) < 1e-4);
}

TEST_CASE("checkpoints round trip bit-exactly") {
  Pipeline pl;
  NetworkModel model = build_network(pl.config, 29);
  TrainConfig tc;
  tc.epochs = 1;
  tc.seed = 4;
  train(model, pl.instances, tc);

  TempFile f("ckpt");
  save_checkpoint(model, f.path());
  NetworkModel loaded = load_checkpoint(f.path());
  CHECK(snapshot(model) == snapshot(loaded));
  CHECK(loaded.config.descriptor() == model.config.descriptor());

  // loaded model predicts identically
  for (std::size_t i = 0; i < std::min<std::size_t>(10, pl.instances.size()); ++i)
    CHECK(model_predict(model, pl.instances[i]) == model_predict(loaded, pl.instances[i]));
}

TEST_CASE("truncated checkpoints fail the checksum") {
  Pipeline pl;
  NetworkModel model = build_network(pl.config, 29);
  TempFile f("ckpt");
  save_checkpoint(model, f.path());
  std::string bytes = f.read();
  bytes.resize(bytes.size() - 7);
  std::ofstream(f.path(), std::ios::binary) << bytes;
  CHECK_THROWS_WITH_AS(load_checkpoint(f.path()), doctest::Contains("checksum"), DataError);
}

TEST_CASE("corrupted checkpoint bytes fail the checksum") {
  Pipeline pl;
  NetworkModel model = build_network(pl.config, 29);
  TempFile f("ckpt");
  save_checkpoint(model, f.path());
  std::string bytes = f.read();
  bytes[bytes.size() / 2] ^= 0x40;
  std::ofstream(f.path(), std::ios::binary) << bytes;
  CHECK_THROWS_WITH_AS(load_checkpoint(f.path()), doctest::Contains("checksum"), DataError);
}

TEST_CASE("loading a checkpoint with the wrong expected topology fails") {
  Pipeline pl;
  NetworkModel model = build_network(pl.config, 29);  // CNN
  TempFile f("ckpt");
  save_checkpoint(model, f.path());
  try {
    load_checkpoint(f.path(), frontnet::Topology::Bilstm);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("CNN") != std::string::npos);
    CHECK(msg.find("Bi-LSTM") != std::string::npos);
  }
}

TEST_CASE("lstm topology trains and checkpoints") {
  Pipeline pl(10, 83, frontnet::Topology::Bilstm);
  NetworkModel model = build_network(pl.config, 11);
  TrainConfig tc;
  tc.epochs = 1;
  tc.seed = 6;
  TrainResult r = train(model, pl.instances, tc);
  CHECK(r.epoch_loss.size() == 1);
  TempFile f("ckpt");
  save_checkpoint(model, f.path());
  NetworkModel loaded = load_checkpoint(f.path(), frontnet::Topology::Bilstm);
  CHECK(snapshot(model) == snapshot(loaded));
}
