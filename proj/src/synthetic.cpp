#include "relnet/synthetic.hpp"

#include <algorithm>
#include <set>

namespace relnet::corpus {

namespace {

const char* const kMarker = "antara";

std::string filler_word(std::uint64_t k) { return "kata" + std::to_string(k); }
std::string entity_word(std::uint64_t k) { return "Entitas" + std::to_string(k); }

const char* filler_tag(std::uint64_t k) {
  static const char* tags[] = {"NN", "JJ", "VB", "DT", "RB"};
  return tags[k % 5];
}

bool marker_between(const Sentence& s, const EntitySpan& a, const EntitySpan& b) {
  const int lo = std::min(a.end, b.end);
  const int hi = std::max(a.start, b.start);
  for (int t = lo; t < hi; ++t)
    if (s.tokens[t] == kMarker) return true;
  return false;
}

}  // namespace

std::vector<Sentence> generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "synth"));
  std::vector<Sentence> out;
  out.reserve(spec.sentences);
  for (int si = 0; si < spec.sentences; ++si) {
    Sentence s;
    const int len = spec.min_len + static_cast<int>(rng.next_below(spec.max_len - spec.min_len + 1));
    s.tokens.resize(len);
    s.pos_tags.resize(len);
    for (int t = 0; t < len; ++t) {
      const std::uint64_t k = rng.next_below(spec.filler_words);
      s.tokens[t] = filler_word(k);
      s.pos_tags[t] = filler_tag(k);
    }

    // Drop 2..max_entities single-token entities on distinct positions.
    const int n_ent = 2 + static_cast<int>(rng.next_below(spec.max_entities - 1));
    std::set<int> positions;
    while (static_cast<int>(positions.size()) < n_ent)
      positions.insert(static_cast<int>(rng.next_below(len)));
    for (int pos : positions) {
      s.tokens[pos] = entity_word(rng.next_below(spec.entity_words));
      s.pos_tags[pos] = "NNP";
      s.entities.push_back({pos, pos + 1, "ENT"});
    }

    // Markers between some adjacent entity pairs.
    for (std::size_t k = 0; k + 1 < s.entities.size(); ++k) {
      const int gap_lo = s.entities[k].end;
      const int gap_hi = s.entities[k + 1].start;
      if (gap_hi - gap_lo < 1) continue;
      if (rng.next_double() < spec.marker_prob) {
        const int pos = gap_lo + static_cast<int>(rng.next_below(gap_hi - gap_lo));
        s.tokens[pos] = kMarker;
        s.pos_tags[pos] = "IN";
      }
    }

    // Exhaustive annotation by the ground-truth rule.
    for (std::size_t i = 0; i < s.entities.size(); ++i) {
      for (std::size_t j = i + 1; j < s.entities.size(); ++j) {
        const bool near =
            std::abs(s.entities[j].start - s.entities[i].start) <= spec.related_max_distance;
        const bool related = near && marker_between(s, s.entities[i], s.entities[j]);
        s.relations.push_back({static_cast<int>(i), static_cast<int>(j), related});
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace relnet::corpus
