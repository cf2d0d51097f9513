#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relnet/common.hpp"

// Annotated-sentence loading, entity-pair expansion, vocabulary construction
// and fixed-length id encoding.
//
// Corpus files are UTF-8 JSON-lines; each line carries `tokens`, `pos_tags`,
// `entities` ({"start","end","label"?}) and `relations` ({"e1","e2","related"}).

namespace relnet::corpus {

enum class Label : int { False = 0, True = 1 };

inline const char* label_name(Label l) { return l == Label::True ? "TRUE" : "FALSE"; }

struct EntitySpan {
  int start = 0;  // token index, inclusive
  int end = 0;    // token index, exclusive
  std::string label;
};

struct RelationAnnotation {
  int e1 = 0;  // entity index
  int e2 = 0;
  bool related = false;
};

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> pos_tags;
  std::vector<EntitySpan> entities;
  std::vector<RelationAnnotation> relations;
};

// One unordered entity pair of a sentence, ordered (e1 < e2), plus its label.
struct InstancePair {
  int e1 = 0;  // index into Sentence::entities
  int e2 = 0;
  Label label = Label::False;
};

enum class UnlabeledPolicy { Error, AssumeFalse };

// Reserved id 0 is PAD in every map; words and chars also reserve id 1 = UNK.
extern const char* const kPadToken;
extern const char* const kUnkToken;

class Vocabulary {
 public:
  Vocabulary();

  int word_id(const std::string& w) const;      // UNK for unseen words
  int pos_id(const std::string& tag) const;     // PAD for unseen tags
  int char_id(const std::string& utf8_ch) const;  // UNK for unseen chars

  int add_word(const std::string& w);
  int add_pos(const std::string& tag);
  int add_char(const std::string& utf8_ch);

  std::size_t word_count() const { return words_.size(); }
  std::size_t pos_count() const { return pos_tags_.size(); }
  std::size_t char_count() const { return chars_.size(); }

  const std::map<std::string, int>& words() const { return words_; }
  const std::map<std::string, int>& pos_tags() const { return pos_tags_; }
  const std::map<std::string, int>& chars() const { return chars_; }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& o) const {
    return words_ == o.words_ && pos_tags_ == o.pos_tags_ && chars_ == o.chars_;
  }

 private:
  std::map<std::string, int> words_;
  std::map<std::string, int> pos_tags_;
  std::map<std::string, int> chars_;
};

struct EncodedInstance {
  std::vector<int> word_ids;            // length T
  std::vector<int> pos_ids;             // length T
  std::vector<std::vector<int>> char_ids;  // T rows of length W
  std::vector<int> p1_idx;              // length T, values in [0, 2L]
  std::vector<int> p2_idx;              // length T
  Label label = Label::False;
};

struct EncodeOptions {
  int seq_len = 100;       // T
  int clip = 50;           // L
  int max_word_len = 25;   // W
};

// Number of real (non-PAD) tokens of an encoded instance. PAD is id 0 and
// real tokens encode to ids >= 1, so this is the count of leading non-zeros.
int valid_length(const EncodedInstance& inst);

std::vector<Sentence> load_corpus(const std::string& path);
void save_corpus(const std::vector<Sentence>& sentences, const std::string& path);

// Expands the C(n,2) unordered entity pairs of a sentence, ordered by
// (e1, e2). Pairs without an annotation follow `policy`.
std::vector<InstancePair> generate_instances(const Sentence& sentence, UnlabeledPolicy policy);

Vocabulary build_vocabulary(const std::vector<Sentence>& corpus, int min_count);

// Signed distance of token i to span [s,e): 0 inside, i-s before, i-(e-1) after.
int relative_position(int token_idx, const EntitySpan& span);

EncodedInstance encode_instance(const Sentence& sentence, const InstancePair& pair,
                                const Vocabulary& vocab, const EncodeOptions& opts);

// Splits UTF-8 text into one std::string per code point. Invalid bytes are
// passed through as single-byte units.
std::vector<std::string> utf8_chars(const std::string& text);

// Encodes a whole corpus (every pair of every sentence). JSON-lines
// serialization of the result is the `prepare` output format.
std::vector<EncodedInstance> encode_corpus(const std::vector<Sentence>& sentences,
                                           const Vocabulary& vocab, const EncodeOptions& opts,
                                           UnlabeledPolicy policy);

void save_instances(const std::vector<EncodedInstance>& instances, const std::string& path);
std::vector<EncodedInstance> load_instances(const std::string& path);

// Seeded sentence-level split; returns {rest, held_out} with
// round(fraction * n) sentences held out.
std::pair<std::vector<Sentence>, std::vector<Sentence>> split_corpus(
    const std::vector<Sentence>& sentences, double held_out_fraction, std::uint64_t seed);

}  // namespace relnet::corpus
