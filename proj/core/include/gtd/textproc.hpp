#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gtd {

// Lowercase tokens, no whitespace, no empties.
using TokenSequence = std::vector<std::string>;

// Statistical     lowercase + punctuation strip + stopword removal + stemming
// NeuralEnsemble  lowercase + punctuation strip
// Raw             lowercase + punctuation strip (stand-in for feeding
//                 untokenized text to standalone transformer models)
enum class PipelineVariant { Statistical, NeuralEnsemble, Raw };

PipelineVariant parse_pipeline_variant(std::string_view name);
std::string_view pipeline_variant_name(PipelineVariant v);

using Stoplist = std::unordered_set<std::string>;

// Case-folds, then emits maximal runs of letters/digits; punctuation and
// symbols act as separators.
TokenSequence tokenize(std::string_view text);

// Order-preserving exact-match filter. Stoplist entries must be lowercase.
TokenSequence remove_stopwords(TokenSequence tokens, const Stoplist& stoplist);

// Porter-stems every token.
TokenSequence stem(TokenSequence tokens);

TokenSequence preprocess(std::string_view text, PipelineVariant variant,
                         const Stoplist& stoplist);

// One lowercase token per line; '#' starts a comment; blank lines ignored.
Stoplist load_stoplist(const std::string& path);

// The standard English stopword list, compiled in. Identical to the copy
// shipped at data/stopwords_en.txt.
const Stoplist& default_stoplist();

} // namespace gtd
