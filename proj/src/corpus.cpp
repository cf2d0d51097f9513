#include "relnet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace relnet::corpus {

using nlohmann::json;

const char* const kPadToken = "<pad>";
const char* const kUnkToken = "<unk>";

Vocabulary::Vocabulary() {
  words_[kPadToken] = 0;
  words_[kUnkToken] = 1;
  pos_tags_[kPadToken] = 0;
  chars_[kPadToken] = 0;
  chars_[kUnkToken] = 1;
}

int Vocabulary::word_id(const std::string& w) const {
  auto it = words_.find(w);
  return it == words_.end() ? 1 : it->second;
}

int Vocabulary::pos_id(const std::string& tag) const {
  auto it = pos_tags_.find(tag);
  return it == pos_tags_.end() ? 0 : it->second;
}

int Vocabulary::char_id(const std::string& utf8_ch) const {
  auto it = chars_.find(utf8_ch);
  return it == chars_.end() ? 1 : it->second;
}

int Vocabulary::add_word(const std::string& w) {
  auto it = words_.find(w);
  if (it != words_.end()) return it->second;
  int id = static_cast<int>(words_.size());
  words_[w] = id;
  return id;
}

int Vocabulary::add_pos(const std::string& tag) {
  auto it = pos_tags_.find(tag);
  if (it != pos_tags_.end()) return it->second;
  int id = static_cast<int>(pos_tags_.size());
  pos_tags_[tag] = id;
  return id;
}

int Vocabulary::add_char(const std::string& utf8_ch) {
  auto it = chars_.find(utf8_ch);
  if (it != chars_.end()) return it->second;
  int id = static_cast<int>(chars_.size());
  chars_[utf8_ch] = id;
  return id;
}

namespace {

void check_dense(const std::map<std::string, int>& m, const std::string& which) {
  std::vector<bool> seen(m.size(), false);
  for (const auto& [token, id] : m) {
    if (id < 0 || static_cast<std::size_t>(id) >= m.size() || seen[id])
      throw DataError("vocabulary: ids of '" + which + "' are not dense (token '" + token + "')");
    seen[id] = true;
  }
}

}  // namespace

void Vocabulary::save(const std::string& path) const {
  json j;
  j["words"] = words_;
  j["pos_tags"] = pos_tags_;
  j["chars"] = chars_;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  out << j.dump(2) << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed vocabulary file " + path + ": " + e.what());
  }
  Vocabulary v;
  try {
    v.words_ = j.at("words").get<std::map<std::string, int>>();
    v.pos_tags_ = j.at("pos_tags").get<std::map<std::string, int>>();
    v.chars_ = j.at("chars").get<std::map<std::string, int>>();
  } catch (const json::exception& e) {
    throw DataError("malformed vocabulary file " + path + ": " + e.what());
  }
  if (v.words_.count(kPadToken) == 0 || v.words_.at(kPadToken) != 0 ||
      v.words_.count(kUnkToken) == 0 || v.words_.at(kUnkToken) != 1)
    throw DataError("vocabulary file " + path + ": missing PAD/UNK word entries");
  check_dense(v.words_, "words");
  check_dense(v.pos_tags_, "pos_tags");
  check_dense(v.chars_, "chars");
  return v;
}

std::vector<std::string> utf8_chars(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if ((c & 0x80) == 0x00) len = 1;
    else if ((c & 0xe0) == 0xc0) len = 2;
    else if ((c & 0xf0) == 0xe0) len = 3;
    else if ((c & 0xf8) == 0xf0) len = 4;
    if (i + len > text.size()) len = 1;
    // continuation bytes must match, otherwise treat the byte as a unit
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xc0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

namespace {

std::string loc(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool found = false;
    for (const char* k : known)
      if (key == k) found = true;
    if (!found) throw DataError(where + ": unknown field '" + key + "'");
  }
}

Sentence parse_sentence(const json& j, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": record is not a JSON object");
  reject_unknown_keys(j, {"tokens", "pos_tags", "entities", "relations"}, where);
  Sentence s;
  try {
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.pos_tags = j.at("pos_tags").get<std::vector<std::string>>();
    for (const auto& je : j.at("entities")) {
      reject_unknown_keys(je, {"start", "end", "label"}, where);
      EntitySpan span;
      span.start = je.at("start").get<int>();
      span.end = je.at("end").get<int>();
      if (je.contains("label") && !je.at("label").is_null())
        span.label = je.at("label").get<std::string>();
      s.entities.push_back(span);
    }
    for (const auto& jr : j.at("relations")) {
      reject_unknown_keys(jr, {"e1", "e2", "related"}, where);
      RelationAnnotation r;
      r.e1 = jr.at("e1").get<int>();
      r.e2 = jr.at("e2").get<int>();
      r.related = jr.at("related").get<bool>();
      s.relations.push_back(r);
    }
  } catch (const json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
  const int n = static_cast<int>(s.tokens.size());
  if (s.pos_tags.size() != s.tokens.size())
    throw DataError(where + ": pos_tags length (" + std::to_string(s.pos_tags.size()) +
                    ") != tokens length (" + std::to_string(s.tokens.size()) + ")");
  for (std::size_t k = 0; k < s.entities.size(); ++k) {
    const EntitySpan& sp = s.entities[k];
    if (sp.start < 0 || sp.start >= sp.end || sp.end > n)
      throw DataError(where + ": entity " + std::to_string(k) + " span [" +
                      std::to_string(sp.start) + "," + std::to_string(sp.end) +
                      ") out of bounds for " + std::to_string(n) + " tokens");
  }
  const int ne = static_cast<int>(s.entities.size());
  for (std::size_t k = 0; k < s.relations.size(); ++k) {
    const RelationAnnotation& r = s.relations[k];
    if (r.e1 == r.e2 || r.e1 < 0 || r.e2 < 0 || r.e1 >= ne || r.e2 >= ne)
      throw DataError(where + ": relation " + std::to_string(k) + " has invalid entity indices (" +
                      std::to_string(r.e1) + "," + std::to_string(r.e2) + ")");
  }
  return s;
}

}  // namespace

std::vector<Sentence> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::vector<Sentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(loc(path, line_no) + ": invalid JSON: " + e.what());
    }
    out.push_back(parse_sentence(j, loc(path, line_no)));
  }
  return out;
}

void save_corpus(const std::vector<Sentence>& sentences, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const Sentence& s : sentences) {
    json j;
    j["tokens"] = s.tokens;
    j["pos_tags"] = s.pos_tags;
    j["entities"] = json::array();
    for (const EntitySpan& e : s.entities) {
      json je;
      je["start"] = e.start;
      je["end"] = e.end;
      if (!e.label.empty()) je["label"] = e.label;
      j["entities"].push_back(je);
    }
    j["relations"] = json::array();
    for (const RelationAnnotation& r : s.relations) {
      j["relations"].push_back({{"e1", r.e1}, {"e2", r.e2}, {"related", r.related}});
    }
    out << j.dump() << "\n";
  }
}

std::vector<InstancePair> generate_instances(const Sentence& sentence, UnlabeledPolicy policy) {
  // (min,max)-normalized pair -> related
  std::map<std::pair<int, int>, bool> annotated;
  for (const RelationAnnotation& r : sentence.relations) {
    auto key = std::minmax(r.e1, r.e2);
    auto [it, inserted] = annotated.emplace(key, r.related);
    if (!inserted && it->second != r.related)
      throw DataError("conflicting relation annotations for entity pair (" +
                      std::to_string(key.first) + "," + std::to_string(key.second) + ")");
  }
  const int n = static_cast<int>(sentence.entities.size());
  std::vector<InstancePair> out;
  out.reserve(n > 1 ? static_cast<std::size_t>(n) * (n - 1) / 2 : 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      InstancePair p;
      p.e1 = i;
      p.e2 = j;
      auto it = annotated.find({i, j});
      if (it != annotated.end()) {
        p.label = it->second ? Label::True : Label::False;
      } else if (policy == UnlabeledPolicy::AssumeFalse) {
        p.label = Label::False;
      } else {
        throw DataError("entity pair (" + std::to_string(i) + "," + std::to_string(j) +
                        ") has no relation annotation");
      }
      out.push_back(p);
    }
  }
  return out;
}

Vocabulary build_vocabulary(const std::vector<Sentence>& corpus, int min_count) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::unordered_map<std::string, int> freq;
  for (const Sentence& s : corpus)
    for (const std::string& w : s.tokens) ++freq[w];
  Vocabulary v;
  // first-occurrence order keeps ids deterministic
  for (const Sentence& s : corpus) {
    for (const std::string& w : s.tokens) {
      if (freq[w] >= min_count) v.add_word(w);
      for (const std::string& c : utf8_chars(w)) v.add_char(c);
    }
    for (const std::string& t : s.pos_tags) v.add_pos(t);
  }
  return v;
}

int relative_position(int token_idx, const EntitySpan& span) {
  if (token_idx < span.start) return token_idx - span.start;
  if (token_idx >= span.end) return token_idx - (span.end - 1);
  return 0;
}

int valid_length(const EncodedInstance& inst) {
  int n = 0;
  while (n < static_cast<int>(inst.word_ids.size()) && inst.word_ids[n] != 0) ++n;
  return n;
}

EncodedInstance encode_instance(const Sentence& sentence, const InstancePair& pair,
                                const Vocabulary& vocab, const EncodeOptions& opts) {
  const int T = opts.seq_len;
  const int L = opts.clip;
  const int W = opts.max_word_len;
  const int len = static_cast<int>(sentence.tokens.size());
  if (pair.e1 < 0 || pair.e2 < 0 || pair.e1 >= static_cast<int>(sentence.entities.size()) ||
      pair.e2 >= static_cast<int>(sentence.entities.size()))
    throw DataError("encode_instance: entity index out of range");
  EntitySpan s1 = sentence.entities[pair.e1];
  EntitySpan s2 = sentence.entities[pair.e2];

  // Truncation: smallest window containing both spans, centered between them.
  int start = 0;
  if (len > T) {
    const int lo = std::min(s1.start, s2.start);
    const int hi = std::max(s1.end, s2.end);
    if (hi - lo > T)
      throw DataError("entities span " + std::to_string(hi - lo) +
                      " tokens and cannot fit in a window of length " + std::to_string(T));
    const int slack = T - (hi - lo);
    int desired = lo - slack / 2;
    const int min_start = std::max(0, hi - T);
    const int max_start = std::min(lo, len - T);
    start = std::clamp(desired, min_start, max_start);
  }
  const int window_len = std::min(T, len - start);
  s1.start -= start;
  s1.end -= start;
  s2.start -= start;
  s2.end -= start;

  EncodedInstance inst;
  inst.label = pair.label;
  inst.word_ids.assign(T, 0);
  inst.pos_ids.assign(T, 0);
  inst.p1_idx.assign(T, 0);
  inst.p2_idx.assign(T, 0);
  inst.char_ids.assign(T, std::vector<int>(W, 0));

  for (int t = 0; t < window_len; ++t) {
    const std::string& tok = sentence.tokens[start + t];
    inst.word_ids[t] = vocab.word_id(tok);
    inst.pos_ids[t] = vocab.pos_id(sentence.pos_tags[start + t]);
    std::vector<std::string> chars = utf8_chars(tok);
    for (int c = 0; c < W && c < static_cast<int>(chars.size()); ++c)
      inst.char_ids[t][c] = vocab.char_id(chars[c]);
  }
  for (int t = 0; t < T; ++t) {
    inst.p1_idx[t] = std::clamp(relative_position(t, s1), -L, L) + L;
    inst.p2_idx[t] = std::clamp(relative_position(t, s2), -L, L) + L;
  }
  return inst;
}

std::vector<EncodedInstance> encode_corpus(const std::vector<Sentence>& sentences,
                                           const Vocabulary& vocab, const EncodeOptions& opts,
                                           UnlabeledPolicy policy) {
  std::vector<EncodedInstance> out;
  for (const Sentence& s : sentences) {
    for (const InstancePair& p : generate_instances(s, policy))
      out.push_back(encode_instance(s, p, vocab, opts));
  }
  return out;
}

void save_instances(const std::vector<EncodedInstance>& instances, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write instances file: " + path);
  for (const EncodedInstance& inst : instances) {
    json j;
    j["word_ids"] = inst.word_ids;
    j["pos_ids"] = inst.pos_ids;
    j["char_ids"] = inst.char_ids;
    j["p1_idx"] = inst.p1_idx;
    j["p2_idx"] = inst.p2_idx;
    j["label"] = inst.label == Label::True;
    out << j.dump() << "\n";
  }
}

std::vector<EncodedInstance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open instances file: " + path);
  std::vector<EncodedInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      EncodedInstance inst;
      inst.word_ids = j.at("word_ids").get<std::vector<int>>();
      inst.pos_ids = j.at("pos_ids").get<std::vector<int>>();
      inst.char_ids = j.at("char_ids").get<std::vector<std::vector<int>>>();
      inst.p1_idx = j.at("p1_idx").get<std::vector<int>>();
      inst.p2_idx = j.at("p2_idx").get<std::vector<int>>();
      inst.label = j.at("label").get<bool>() ? Label::True : Label::False;
      out.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw DataError(loc(path, line_no) + ": " + e.what());
    }
  }
  return out;
}

std::pair<std::vector<Sentence>, std::vector<Sentence>> split_corpus(
    const std::vector<Sentence>& sentences, double held_out_fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(sentences.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(idx);
  const std::size_t held = static_cast<std::size_t>(
      std::llround(held_out_fraction * static_cast<double>(sentences.size())));
  std::vector<Sentence> rest, held_out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i < held)
      held_out.push_back(sentences[idx[i]]);
    else
      rest.push_back(sentences[idx[i]]);
  }
  return {rest, held_out};
}

}  // namespace relnet::corpus
