#pragma once

#include <cstdint>

#include "relnet/corpus.hpp"

// Synthetic relation-detection corpora. Real annotated data for this task is
// not redistributable, so benchmarks run on generated sentences whose
// relatedness is a deterministic function of entity distance and a marker
// token placed between related entities.

namespace relnet::corpus {

struct SyntheticSpec {
  int sentences = 2000;
  int filler_words = 40;
  int entity_words = 12;
  int min_len = 10;
  int max_len = 22;
  int max_entities = 3;        // 2..max_entities per sentence
  double marker_prob = 0.55;   // chance of a marker between a candidate pair
  int related_max_distance = 8;  // entity-start distance cap for TRUE pairs
};

// A pair is related iff the marker token sits strictly between the two spans
// and the start distance is within `related_max_distance`. Every pair of
// every sentence carries an explicit annotation.
std::vector<Sentence> generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace relnet::corpus
