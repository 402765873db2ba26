#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gtd/textproc.hpp"

namespace gtd {

// token <-> dense index map plus the document frequencies it was fitted
// with. Index order is first occurrence over the corpus scan. Immutable
// after fit.
struct Vocabulary {
    std::vector<std::string> tokens;                       // index -> token
    std::unordered_map<std::string, std::uint32_t> index;  // token -> index
    std::vector<std::uint32_t> doc_freq;                   // per index
    std::size_t n_docs = 0;

    std::size_t size() const { return tokens.size(); }

    // -1 when out of vocabulary.
    std::int64_t lookup(const std::string& token) const {
        const auto it = index.find(token);
        return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
    }
};

// Sparse vector, entries sorted by index, no duplicates, values finite.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }
    std::size_t nnz() const { return entries.size(); }
};

// Tokens with document frequency >= min_df. Throws DataError on an empty
// document list.
Vocabulary fit_vocabulary(std::span<const TokenSequence> docs, std::size_t min_df = 1);

// Raw in-vocabulary term counts; out-of-vocabulary tokens are dropped.
FeatureVector bow_vector(const Vocabulary& v, const TokenSequence& t);

// value_i = tf_i * (ln((1 + n_docs) / (1 + doc_freq_i)) + 1), then the
// vector is L2-normalized (all-zero vectors stay empty).
FeatureVector tfidf_vector(const Vocabulary& v, const TokenSequence& t);

} // namespace gtd
