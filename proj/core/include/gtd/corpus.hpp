#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gtd {

enum class Label : int { Human = 0, Generated = 1 };

// Parses "human"/"generated" (case-insensitive). Throws DataError otherwise.
Label parse_label(std::string_view s);
std::string_view label_name(Label l);

struct Document {
    std::string id;
    std::string text;
    std::optional<Label> label;
};

// Immutable after load; document order is load order and every split/stat
// operation is deterministic given that order and a seed.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {}

    const std::vector<Document>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const Document& operator[](std::size_t i) const { return docs_[i]; }

    bool all_labeled() const;

private:
    std::vector<Document> docs_;
};

enum class CorpusFormat { Jsonl, Csv };

// Unlabeled records are rejected unless allow_unlabeled is set (prediction
// inputs may omit labels; training/eval inputs may not).
Corpus load_corpus(const std::string& path, CorpusFormat format,
                   bool allow_unlabeled = false);

// Guesses the format from the file extension (.jsonl/.json -> JSONL,
// .csv -> CSV). Throws DataError for anything else.
CorpusFormat format_from_path(const std::string& path);

// Stratified split: per label class, floor(train_fraction * n_class) docs
// (minimum 1) go to train after a seeded shuffle; the rest to test. Relative
// load order is preserved within each side.
std::pair<Corpus, Corpus> split_corpus(const Corpus& c, double train_fraction,
                                       std::uint64_t seed);

struct LabelWordStats {
    std::size_t n_docs = 0;
    std::size_t min_words = 0;
    std::size_t max_words = 0;
    double avg_words = 0.0;  // unrounded; display rounds to whole words
};

struct CorpusStats {
    LabelWordStats human;
    LabelWordStats generated;

    const LabelWordStats& of(Label l) const {
        return l == Label::Human ? human : generated;
    }
};

// Word count is raw whitespace tokenization of the stored text, independent
// of the preprocessing pipelines.
CorpusStats corpus_stats(const Corpus& c);

std::size_t whitespace_word_count(std::string_view text);

} // namespace gtd
