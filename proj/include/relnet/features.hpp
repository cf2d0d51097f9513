#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/corpus.hpp"

// Turns an EncodedInstance into a T x D feature matrix: concatenated word,
// position (one shared table, looked up once per entity channel), POS-tag and
// optional character-convolution embeddings. Row layout is fixed:
// [ word | p1 | p2 | postag | char ] with absent blocks dropped.

namespace relnet::features {

struct EmbeddingTable {
  Param weights;  // rows x dim, row-major
  int rows = 0;
  int dim = 0;
  bool trainable = true;

  const double* row(int r) const;
  double* grad_row(int r);
};

// Trainable-table initialization: uniform(-0.05, 0.05), PAD row (index 0) zero.
EmbeddingTable make_table(const std::string& name, int rows, int dim, Rng& rng);

struct CharConfig {
  bool enabled = false;
  int char_dim = 30;
  int char_filters = 50;
  int char_window = 3;
};

struct FeatureConfig {
  int word_dim = 100;
  int position_dim = 50;   // per entity channel; two channels share one table
  int postag_dim = 50;     // 0 disables the POS-tag block
  CharConfig char_conv;

  int total_dim() const {
    return word_dim + 2 * position_dim + postag_dim +
           (char_conv.enabled ? char_conv.char_filters : 0);
  }
};

// Character convolution: embed chars, convolve each filter over positions,
// max-pool over positions. tanh activation by default; `use_tanh = false`
// keeps the raw responses (used by hand-computed checks).
struct CharConv {
  EmbeddingTable table;   // char vocab x char_dim
  Param filters;          // char_filters x (char_window * char_dim)
  Param bias;             // char_filters
  int char_dim = 0;
  int char_filters = 0;
  int char_window = 0;
  bool use_tanh = true;
};

CharConv make_char_conv(const CharConfig& cfg, int char_vocab, Rng& rng);

struct FeatureTables {
  EmbeddingTable word;
  EmbeddingTable position;              // (2L+1) x position_dim, shared by p1/p2
  std::optional<EmbeddingTable> postag;
  std::optional<CharConv> char_conv;
};

struct CharWordCache {
  bool all_pad = true;
  std::vector<int> argmax;  // best window position per filter
};

struct FeatureMatrix {
  Matrix values;  // T x D
  int valid_len = 0;
  // lookup caches for the backward pass
  std::vector<int> word_ids, pos_ids, p1_idx, p2_idx;
  std::vector<std::vector<int>> char_ids;
  std::vector<CharWordCache> char_cache;
};

// Loads word2vec text format ("V D" header, then one "token v1 .. vD" row per
// word) into a |vocab| x D table. PAD is zero; vocabulary words missing from
// the file get seeded uniform(-0.25, 0.25) rows and are reported via `oov`.
// The returned table is frozen (trainable = false) by default.
EmbeddingTable load_word_embeddings(const std::string& path, const corpus::Vocabulary& vocab,
                                    std::uint64_t seed = 0,
                                    std::vector<std::string>* oov = nullptr);

// clamp(signed distance to span, -L, L) + L, in [0, 2L].
int relative_position_index(int token_idx, const corpus::EntitySpan& span, int clip);

std::vector<double> char_features(const std::vector<int>& char_ids_row, const CharConv& conv,
                                  CharWordCache* cache = nullptr);

FeatureMatrix embed_sequence(const corpus::EncodedInstance& inst, const FeatureTables& tables,
                             const FeatureConfig& config);

// Accumulates d(loss)/d(values) into the gradient buffers of every trainable
// table (and the char-conv parameters) touched by the forward pass.
void embed_backward(const FeatureMatrix& fm, const Matrix& d_values, FeatureTables& tables,
                    const FeatureConfig& config);

}  // namespace relnet::features
