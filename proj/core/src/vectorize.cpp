#include "gtd/vectorize.hpp"

#include <algorithm>
#include <cmath>

#include "gtd/errors.hpp"

namespace gtd {

Vocabulary fit_vocabulary(std::span<const TokenSequence> docs, std::size_t min_df) {
    if (docs.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");
    if (min_df < 1) min_df = 1;

    // First-occurrence order over the full scan; df counts each document once.
    Vocabulary full;
    full.n_docs = docs.size();
    std::vector<std::uint32_t> last_doc;  // last document that counted this token
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) {
            auto [it, inserted] = full.index.try_emplace(
                tok, static_cast<std::uint32_t>(full.tokens.size()));
            if (inserted) {
                full.tokens.push_back(tok);
                full.doc_freq.push_back(1);
                last_doc.push_back(static_cast<std::uint32_t>(d));
            } else if (last_doc[it->second] != d) {
                ++full.doc_freq[it->second];
                last_doc[it->second] = static_cast<std::uint32_t>(d);
            }
        }
    }
    if (min_df == 1) return full;

    Vocabulary pruned;
    pruned.n_docs = full.n_docs;
    for (std::size_t i = 0; i < full.tokens.size(); ++i) {
        if (full.doc_freq[i] < min_df) continue;
        pruned.index.emplace(full.tokens[i], static_cast<std::uint32_t>(pruned.tokens.size()));
        pruned.tokens.push_back(full.tokens[i]);
        pruned.doc_freq.push_back(full.doc_freq[i]);
    }
    return pruned;
}

FeatureVector bow_vector(const Vocabulary& v, const TokenSequence& t) {
    std::unordered_map<std::uint32_t, double> counts;
    for (const auto& tok : t) {
        const auto idx = v.lookup(tok);
        if (idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
    }
    FeatureVector out;
    out.entries.assign(counts.begin(), counts.end());
    std::sort(out.entries.begin(), out.entries.end());
    return out;
}

FeatureVector tfidf_vector(const Vocabulary& v, const TokenSequence& t) {
    FeatureVector out = bow_vector(v, t);
    double norm_sq = 0.0;
    for (auto& [idx, value] : out.entries) {
        const double idf =
            std::log((1.0 + static_cast<double>(v.n_docs)) /
                     (1.0 + static_cast<double>(v.doc_freq[idx]))) +
            1.0;
        value *= idf;
        norm_sq += value * value;
    }
    if (norm_sq > 0.0) {
        const double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (auto& [idx, value] : out.entries) value *= inv_norm;
    }
    return out;
}

} // namespace gtd
