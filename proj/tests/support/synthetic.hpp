#pragma once

#include <cstdint>

#include "gtd/corpus.hpp"

namespace gtd::testsupport {

// Two seeded unigram generators sharing a background vocabulary. Each class
// mixes background words (drawn from a class-permuted Zipf distribution)
// with class-specific marker words, so the label signal is lexical rather
// than length-based.
struct SyntheticSpec {
    std::size_t n_docs = 2000;
    std::size_t shared_vocab = 100;
    std::size_t marker_vocab = 30;  // per class
    double marker_prob = 0.3;
    std::size_t min_len = 8;
    std::size_t max_len = 40;
    std::uint64_t seed = 1234;
};

Corpus make_synthetic_corpus(const SyntheticSpec& spec);

// 30-sample linearly separable two-class corpus (exclusive keywords).
Corpus make_separable_corpus(std::size_t n_docs = 30, std::uint64_t seed = 7);

} // namespace gtd::testsupport
