#include "relnet/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "relnet/kernels.hpp"

namespace relnet::features {

const double* EmbeddingTable::row(int r) const {
  if (r < 0 || r >= rows) throw DataError("embedding lookup out of range: " + std::to_string(r));
  return weights.value.data() + static_cast<std::size_t>(r) * dim;
}

double* EmbeddingTable::grad_row(int r) {
  if (r < 0 || r >= rows) throw DataError("embedding lookup out of range: " + std::to_string(r));
  return weights.grad.data() + static_cast<std::size_t>(r) * dim;
}

EmbeddingTable make_table(const std::string& name, int rows, int dim, Rng& rng) {
  EmbeddingTable t;
  t.rows = rows;
  t.dim = dim;
  t.trainable = true;
  t.weights = Param(name, static_cast<std::size_t>(rows) * dim);
  for (int r = 1; r < rows; ++r)
    for (int d = 0; d < dim; ++d)
      t.weights.value[static_cast<std::size_t>(r) * dim + d] = rng.uniform(-0.05, 0.05);
  return t;
}

CharConv make_char_conv(const CharConfig& cfg, int char_vocab, Rng& rng) {
  CharConv conv;
  conv.char_dim = cfg.char_dim;
  conv.char_filters = cfg.char_filters;
  conv.char_window = cfg.char_window;
  conv.table = make_table("char_table", char_vocab, cfg.char_dim, rng);
  conv.filters =
      Param("char_filters", static_cast<std::size_t>(cfg.char_filters) * cfg.char_window * cfg.char_dim);
  for (double& w : conv.filters.value) w = rng.uniform(-0.05, 0.05);
  conv.bias = Param("char_bias", cfg.char_filters);
  return conv;
}

EmbeddingTable load_word_embeddings(const std::string& path, const corpus::Vocabulary& vocab,
                                    std::uint64_t seed, std::vector<std::string>* oov) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty embedding file");
  long long file_words = 0, dim = 0;
  {
    std::istringstream iss(header);
    std::string extra;
    if (!(iss >> file_words >> dim) || (iss >> extra) || file_words < 0 || dim <= 0)
      throw DataError(path + ": malformed word2vec header '" + header + "'");
  }

  EmbeddingTable table;
  table.rows = static_cast<int>(vocab.word_count());
  table.dim = static_cast<int>(dim);
  table.trainable = false;
  table.weights = Param("word_table", static_cast<std::size_t>(table.rows) * table.dim);

  std::vector<bool> filled(table.rows, false);
  filled[0] = true;  // PAD stays zero
  std::string line;
  long long row_count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row_count;
    std::istringstream iss(line);
    std::string token;
    iss >> token;
    std::vector<double> vec;
    vec.reserve(dim);
    std::string field;
    while (iss >> field) {
      char* endp = nullptr;
      const double v = std::strtod(field.c_str(), &endp);
      if (endp == field.c_str() || *endp != '\0')
        throw DataError(path + ": non-numeric component '" + field + "' for token '" + token + "'");
      vec.push_back(v);
    }
    if (static_cast<long long>(vec.size()) != dim)
      throw DataError(path + ": token '" + token + "' has " + std::to_string(vec.size()) +
                      " components, header says " + std::to_string(dim));
    auto it = vocab.words().find(token);
    if (it == vocab.words().end() || it->second == 0) continue;
    std::copy(vec.begin(), vec.end(),
              table.weights.value.begin() + static_cast<std::size_t>(it->second) * dim);
    filled[it->second] = true;
  }
  if (row_count != file_words)
    throw DataError(path + ": header promises " + std::to_string(file_words) + " rows, found " +
                    std::to_string(row_count));

  Rng rng(derive_seed(seed, "oov"));
  for (const auto& [word, id] : vocab.words()) {
    if (filled[id]) continue;
    double* row = table.weights.value.data() + static_cast<std::size_t>(id) * dim;
    for (int d = 0; d < dim; ++d) row[d] = rng.uniform(-0.25, 0.25);
    if (oov) oov->push_back(word);
  }
  return table;
}

int relative_position_index(int token_idx, const corpus::EntitySpan& span, int clip) {
  return std::clamp(corpus::relative_position(token_idx, span), -clip, clip) + clip;
}

std::vector<double> char_features(const std::vector<int>& char_ids_row, const CharConv& conv,
                                  CharWordCache* cache) {
  const int W = static_cast<int>(char_ids_row.size());
  const int cw = conv.char_window;
  const int cd = conv.char_dim;
  if (W < cw)
    throw DataError("word length " + std::to_string(W) + " shorter than char window " +
                    std::to_string(cw));
  std::vector<double> out(conv.char_filters, 0.0);
  if (cache) {
    cache->all_pad = true;
    cache->argmax.assign(conv.char_filters, 0);
  }
  bool all_pad = true;
  for (int id : char_ids_row)
    if (id != 0) all_pad = false;
  if (all_pad) return out;  // padding rows carry no characters
  if (cache) cache->all_pad = false;

  // contiguous char-embedding buffer so each window is one flat slice
  std::vector<double> emb(static_cast<std::size_t>(W) * cd);
  for (int c = 0; c < W; ++c)
    std::copy_n(conv.table.row(char_ids_row[c]), cd, emb.begin() + static_cast<std::size_t>(c) * cd);

  const int positions = W - cw + 1;
  for (int f = 0; f < conv.char_filters; ++f) {
    const double* filter = conv.filters.value.data() + static_cast<std::size_t>(f) * cw * cd;
    double best = -HUGE_VAL;
    int best_pos = 0;
    for (int p = 0; p < positions; ++p) {
      const double pre =
          kernels::dot(filter, emb.data() + static_cast<std::size_t>(p) * cd, cw * cd) +
          conv.bias.value[f];
      if (pre > best) {
        best = pre;
        best_pos = p;
      }
    }
    out[f] = conv.use_tanh ? std::tanh(best) : best;
    if (cache) cache->argmax[f] = best_pos;
  }
  return out;
}

FeatureMatrix embed_sequence(const corpus::EncodedInstance& inst, const FeatureTables& tables,
                             const FeatureConfig& config) {
  const int T = static_cast<int>(inst.word_ids.size());
  const int D = config.total_dim();
  FeatureMatrix fm;
  fm.values = Matrix(T, D);
  fm.valid_len = corpus::valid_length(inst);
  fm.word_ids = inst.word_ids;
  fm.pos_ids = inst.pos_ids;
  fm.p1_idx = inst.p1_idx;
  fm.p2_idx = inst.p2_idx;
  if (config.char_conv.enabled) {
    fm.char_ids = inst.char_ids;
    fm.char_cache.resize(T);
  }

  for (int t = 0; t < T; ++t) {
    double* row = fm.values.row(t);
    int off = 0;
    std::copy_n(tables.word.row(inst.word_ids[t]), config.word_dim, row + off);
    off += config.word_dim;
    std::copy_n(tables.position.row(inst.p1_idx[t]), config.position_dim, row + off);
    off += config.position_dim;
    std::copy_n(tables.position.row(inst.p2_idx[t]), config.position_dim, row + off);
    off += config.position_dim;
    if (config.postag_dim > 0) {
      std::copy_n(tables.postag->row(inst.pos_ids[t]), config.postag_dim, row + off);
      off += config.postag_dim;
    }
    if (config.char_conv.enabled) {
      std::vector<double> cf = char_features(inst.char_ids[t], *tables.char_conv, &fm.char_cache[t]);
      std::copy(cf.begin(), cf.end(), row + off);
      off += config.char_conv.char_filters;
    }
  }
  return fm;
}

namespace {

void char_backward(const FeatureMatrix& fm, int t, const double* d_out, CharConv& conv) {
  const CharWordCache& cache = fm.char_cache[t];
  if (cache.all_pad) return;
  const std::vector<int>& ids = fm.char_ids[t];
  const int W = static_cast<int>(ids.size());
  const int cw = conv.char_window;
  const int cd = conv.char_dim;

  std::vector<double> emb(static_cast<std::size_t>(W) * cd);
  for (int c = 0; c < W; ++c)
    std::copy_n(conv.table.row(ids[c]), cd, emb.begin() + static_cast<std::size_t>(c) * cd);

  for (int f = 0; f < conv.char_filters; ++f) {
    double g = d_out[f];
    if (g == 0.0) continue;
    const int p = cache.argmax[f];
    const double* filter = conv.filters.value.data() + static_cast<std::size_t>(f) * cw * cd;
    if (conv.use_tanh) {
      const double pre =
          kernels::dot(filter, emb.data() + static_cast<std::size_t>(p) * cd, cw * cd) +
          conv.bias.value[f];
      const double th = std::tanh(pre);
      g *= 1.0 - th * th;
    }
    conv.bias.grad[f] += g;
    double* dfilter = conv.filters.grad.data() + static_cast<std::size_t>(f) * cw * cd;
    kernels::axpy(g, emb.data() + static_cast<std::size_t>(p) * cd, dfilter, cw * cd);
    for (int k = 0; k < cw; ++k)
      kernels::axpy(g, filter + static_cast<std::size_t>(k) * cd, conv.table.grad_row(ids[p + k]),
                    cd);
  }
}

}  // namespace

void embed_backward(const FeatureMatrix& fm, const Matrix& d_values, FeatureTables& tables,
                    const FeatureConfig& config) {
  const int T = static_cast<int>(fm.values.rows());
  if (d_values.rows() != fm.values.rows() || d_values.cols() != fm.values.cols())
    throw std::invalid_argument("embed_backward: gradient shape mismatch");
  for (int t = 0; t < T; ++t) {
    const double* drow = d_values.row(t);
    int off = 0;
    if (tables.word.trainable)
      kernels::axpy(1.0, drow + off, tables.word.grad_row(fm.word_ids[t]), config.word_dim);
    off += config.word_dim;
    kernels::axpy(1.0, drow + off, tables.position.grad_row(fm.p1_idx[t]), config.position_dim);
    off += config.position_dim;
    kernels::axpy(1.0, drow + off, tables.position.grad_row(fm.p2_idx[t]), config.position_dim);
    off += config.position_dim;
    if (config.postag_dim > 0) {
      if (tables.postag->trainable)
        kernels::axpy(1.0, drow + off, tables.postag->grad_row(fm.pos_ids[t]), config.postag_dim);
      off += config.postag_dim;
    }
    if (config.char_conv.enabled) {
      char_backward(fm, t, drow + off, *tables.char_conv);
      off += config.char_conv.char_filters;
    }
  }
}

}  // namespace relnet::features
