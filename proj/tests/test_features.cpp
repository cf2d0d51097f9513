#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relnet/features.hpp"
#include "relnet/kernels.hpp"
#include "relnet/synthetic.hpp"
#include "support/test_util.hpp"

using namespace relnet;
using namespace relnet::features;
using relnet::testsupport::TempFile;

namespace {

corpus::Vocabulary two_word_vocab() {
  corpus::Vocabulary v;
  v.add_word("a");
  v.add_word("b");
  return v;
}

}  // namespace

TEST_CASE("load_word_embeddings parses word2vec text format") {
  TempFile f("w2v");
  f.write("2 3\na 1 0 0\nb 0 1 0\n");
  corpus::Vocabulary v = two_word_vocab();
  EmbeddingTable t = load_word_embeddings(f.path(), v, 1);
  REQUIRE(t.rows == 4);
  REQUIRE(t.dim == 3);
  CHECK_FALSE(t.trainable);
  const double* a = t.row(v.word_id("a"));
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  const double* b = t.row(v.word_id("b"));
  CHECK(b[1] == 1.0);
  // PAD row stays zero
  CHECK(t.row(0)[0] == 0.0);
  CHECK(t.row(0)[2] == 0.0);
}

TEST_CASE("load_word_embeddings seeds OOV rows and reports them") {
  TempFile f("w2v");
  f.write("1 3\na 1 0 0\n");
  corpus::Vocabulary v = two_word_vocab();
  v.add_word("c");
  std::vector<std::string> oov;
  EmbeddingTable t = load_word_embeddings(f.path(), v, 99, &oov);
  // "b", "c" and the UNK pseudo-token are absent from the file
  CHECK(oov.size() == 3);
  const double* c = t.row(v.word_id("c"));
  bool nonzero = false;
  for (int d = 0; d < 3; ++d) {
    CHECK(std::abs(c[d]) <= 0.25);
    if (c[d] != 0.0) nonzero = true;
  }
  CHECK(nonzero);
  // seeded: same seed reproduces the same rows
  EmbeddingTable t2 = load_word_embeddings(f.path(), v, 99);
  CHECK(t.weights.value == t2.weights.value);
}

TEST_CASE("load_word_embeddings rejects malformed rows") {
  corpus::Vocabulary v = two_word_vocab();
  TempFile f("w2v");

  f.write("2 3\na 1 0\nb 0 1 0\n");
  try {
    load_word_embeddings(f.path(), v);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }

  f.write("2 3\na 1 0 zzz\nb 0 1 0\n");
  CHECK_THROWS_AS(load_word_embeddings(f.path(), v), DataError);

  f.write("3 3\na 1 0 0\nb 0 1 0\n");  // header promises 3 rows
  CHECK_THROWS_AS(load_word_embeddings(f.path(), v), DataError);

  f.write("nonsense\n");
  CHECK_THROWS_AS(load_word_embeddings(f.path(), v), DataError);
}

TEST_CASE("relative_position_index clamps and shifts") {
  corpus::EntitySpan span{10, 12, ""};
  CHECK(relative_position_index(10, span, 50) == 50);
  CHECK(relative_position_index(11, span, 50) == 50);
  CHECK(relative_position_index(7, span, 50) == 47);
  CHECK(relative_position_index(131, span, 50) == 100);
  CHECK(relative_position_index(0, span, 3) == 0);
}

namespace {

struct Fixture {
  corpus::Vocabulary vocab;
  std::vector<corpus::EncodedInstance> instances;

  explicit Fixture(int t = 10) {
    std::vector<corpus::Sentence> sents = corpus::generate_synthetic_corpus({.sentences = 6}, 17);
    vocab = corpus::build_vocabulary(sents, 1);
    for (const corpus::Sentence& s : sents) {
      for (const corpus::InstancePair& p :
           generate_instances(s, corpus::UnlabeledPolicy::AssumeFalse)) {
        try {
          instances.push_back(corpus::encode_instance(s, p, vocab, {t, 50, 8}));
        } catch (const DataError&) {
          // entities too far apart for this tiny window
        }
      }
    }
  }
};

FeatureTables make_tables(const FeatureConfig& cfg, const corpus::Vocabulary& vocab,
                          std::uint64_t seed) {
  Rng rng(seed);
  FeatureTables tables;
  tables.word = make_table("word_table", static_cast<int>(vocab.word_count()), cfg.word_dim, rng);
  tables.position = make_table("position_table", 101, cfg.position_dim, rng);
  if (cfg.postag_dim > 0)
    tables.postag = make_table("postag_table", static_cast<int>(vocab.pos_count()), cfg.postag_dim, rng);
  if (cfg.char_conv.enabled)
    tables.char_conv = make_char_conv(cfg.char_conv, static_cast<int>(vocab.char_count()), rng);
  return tables;
}

}  // namespace

TEST_CASE("embed_sequence dimensions follow the config") {
  FeatureConfig full;  // 100 + 2*50 + 50 = 250
  CHECK(full.total_dim() == 250);

  FeatureConfig no_postag;
  no_postag.postag_dim = 0;
  CHECK(no_postag.total_dim() == 200);

  Fixture fx;
  FeatureTables tables = make_tables(full, fx.vocab, 5);
  FeatureMatrix fm = embed_sequence(fx.instances[0], tables, full);
  CHECK(fm.values.rows() == 10);
  CHECK(fm.values.cols() == 250);

  FeatureTables t2 = make_tables(no_postag, fx.vocab, 5);
  FeatureMatrix fm2 = embed_sequence(fx.instances[0], t2, no_postag);
  CHECK(fm2.values.cols() == 200);
}

TEST_CASE("embed_sequence concatenation order is word, p1, p2, postag, char") {
  FeatureConfig cfg;
  cfg.word_dim = 4;
  cfg.position_dim = 3;
  cfg.postag_dim = 2;
  Fixture fx;
  FeatureTables tables = make_tables(cfg, fx.vocab, 8);
  const corpus::EncodedInstance& inst = fx.instances[0];
  FeatureMatrix fm = embed_sequence(inst, tables, cfg);

  for (int t : {0, 3, 9}) {
    const double* row = fm.values.row(t);
    const double* w = tables.word.row(inst.word_ids[t]);
    const double* p1 = tables.position.row(inst.p1_idx[t]);
    const double* p2 = tables.position.row(inst.p2_idx[t]);
    const double* pt = tables.postag->row(inst.pos_ids[t]);
    for (int d = 0; d < 4; ++d) CHECK(row[d] == w[d]);
    for (int d = 0; d < 3; ++d) CHECK(row[4 + d] == p1[d]);
    for (int d = 0; d < 3; ++d) CHECK(row[7 + d] == p2[d]);
    for (int d = 0; d < 2; ++d) CHECK(row[10 + d] == pt[d]);
  }

  // two encodings of the same instance are bitwise identical
  FeatureMatrix again = embed_sequence(inst, tables, cfg);
  CHECK(again.values == fm.values);
}

namespace {

CharConv hand_char_conv(bool use_tanh) {
  CharConv conv;
  conv.char_dim = 1;
  conv.char_filters = 1;
  conv.char_window = 2;
  conv.use_tanh = use_tanh;
  conv.table.rows = 5;
  conv.table.dim = 1;
  conv.table.weights = Param("char_table", 5);
  conv.table.weights.value = {0.0, 0.0, 0.1, 0.2, 0.3};
  conv.filters = Param("char_filters", 2);
  conv.filters.value = {1.0, 1.0};  // sums adjacent scalar embeddings
  conv.bias = Param("char_bias", 1);
  return conv;
}

}  // namespace

TEST_CASE("char_features hand-computed convolution") {
  CharConv conv = hand_char_conv(false);
  std::vector<double> out = char_features({2, 3, 4}, conv);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == doctest::Approx(0.5));  // max(0.1+0.2, 0.2+0.3)

  CharConv tanh_conv = hand_char_conv(true);
  std::vector<double> out_tanh = char_features({2, 3, 4}, tanh_conv);
  CHECK(out_tanh[0] == doctest::Approx(std::tanh(0.5)));
}

TEST_CASE("char_features of an all-PAD word is a zero vector") {
  Rng rng(4);
  CharConfig cfg{true, 3, 20, 2};
  CharConv conv = make_char_conv(cfg, 7, rng);
  std::vector<double> out = char_features({0, 0, 0, 0}, conv);
  REQUIRE(out.size() == 20);
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("char_features output length equals the filter count") {
  Rng rng(4);
  CharConv conv = make_char_conv({true, 4, 20, 3}, 9, rng);
  CHECK(char_features({1, 2, 3, 4, 5}, conv).size() == 20);
}

TEST_CASE("char_features max-pool dominates every position response") {
  Rng rng(12);
  CharConv conv = make_char_conv({true, 3, 6, 2}, 10, rng);
  std::vector<int> ids = {2, 5, 3, 9, 1, 4};
  std::vector<double> out = char_features(ids, conv);
  const int positions = static_cast<int>(ids.size()) - conv.char_window + 1;
  for (int f = 0; f < conv.char_filters; ++f) {
    for (int p = 0; p < positions; ++p) {
      double pre = conv.bias.value[f];
      for (int k = 0; k < conv.char_window; ++k)
        for (int d = 0; d < conv.char_dim; ++d)
          pre += conv.filters.value[(f * conv.char_window + k) * conv.char_dim + d] *
                 conv.table.row(ids[p + k])[d];
      CHECK(out[f] >= std::tanh(pre) - 1e-12);
    }
  }
}

TEST_CASE("embedding gradients match finite differences") {
  FeatureConfig cfg;
  cfg.word_dim = 3;
  cfg.position_dim = 2;
  cfg.postag_dim = 2;
  cfg.char_conv = {true, 2, 3, 2};
  Fixture fx(6);
  FeatureTables tables = make_tables(cfg, fx.vocab, 21);
  tables.word.trainable = true;
  const corpus::EncodedInstance& inst = fx.instances[0];

  // linear probe loss: sum of fm .* R
  Rng rng(3);
  Matrix probe(6, cfg.total_dim());
  for (double& x : probe.data()) x = rng.uniform(-1.0, 1.0);
  const auto loss = [&] {
    FeatureMatrix fm = embed_sequence(inst, tables, cfg);
    double s = 0.0;
    for (std::size_t i = 0; i < fm.values.size(); ++i) s += fm.values.data()[i] * probe.data()[i];
    return s;
  };

  FeatureMatrix fm = embed_sequence(inst, tables, cfg);
  embed_backward(fm, probe, tables, cfg);

  std::vector<Param*> params = {&tables.word.weights, &tables.position.weights,
                                &tables.postag->weights, &tables.char_conv->table.weights,
                                &tables.char_conv->filters, &tables.char_conv->bias};
  const double eps = 1e-5;
  for (Param* p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double fp = loss();
      p->value[i] = saved - eps;
      const double fmn = loss();
      p->value[i] = saved;
      const double numeric = (fp - fmn) / (2 * eps);
      CHECK(std::abs(p->grad[i] - numeric) / std::max(1.0, std::abs(numeric)) < 1e-5);
    }
  }
}

TEST_CASE("frozen word table receives no gradient") {
  FeatureConfig cfg;
  cfg.word_dim = 3;
  cfg.position_dim = 2;
  cfg.postag_dim = 0;
  Fixture fx(6);
  FeatureTables tables = make_tables(cfg, fx.vocab, 2);
  tables.word.trainable = false;
  FeatureMatrix fm = embed_sequence(fx.instances[0], tables, cfg);
  Matrix ones(6, cfg.total_dim(), 1.0);
  embed_backward(fm, ones, tables, cfg);
  for (double gw : tables.word.weights.grad) CHECK(gw == 0.0);
  double pos_total = 0.0;
  for (double gp : tables.position.weights.grad) pos_total += std::abs(gp);
  CHECK(pos_total > 0.0);
}

TEST_CASE("embedding lookups reject out-of-range ids") {
  Rng rng(1);
  EmbeddingTable t = make_table("t", 4, 2, rng);
  CHECK_THROWS_AS(t.row(4), DataError);
  CHECK_THROWS_AS(t.row(-1), DataError);
}
