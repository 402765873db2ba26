#include "gtd/textproc.hpp"

#include <fstream>

#include "gtd/errors.hpp"
#include "gtd/porter.hpp"
#include "gtd/utf8.hpp"

namespace gtd {

PipelineVariant parse_pipeline_variant(std::string_view name) {
    if (name == "statistical") return PipelineVariant::Statistical;
    if (name == "neural_ensemble") return PipelineVariant::NeuralEnsemble;
    if (name == "raw") return PipelineVariant::Raw;
    throw ConfigError("unknown preprocessing variant \"" + std::string(name) +
                      "\" (expected statistical, neural_ensemble or raw)");
}

std::string_view pipeline_variant_name(PipelineVariant v) {
    switch (v) {
        case PipelineVariant::Statistical: return "statistical";
        case PipelineVariant::NeuralEnsemble: return "neural_ensemble";
        default: return "raw";
    }
}

TokenSequence tokenize(std::string_view text) {
    TokenSequence tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = utf8::decode(text, i);
        if (utf8::is_alnum(cp)) {
            utf8::append(current, utf8::fold(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

TokenSequence remove_stopwords(TokenSequence tokens, const Stoplist& stoplist) {
    TokenSequence out;
    out.reserve(tokens.size());
    for (auto& t : tokens)
        if (!stoplist.contains(t)) out.push_back(std::move(t));
    return out;
}

TokenSequence stem(TokenSequence tokens) {
    for (auto& t : tokens) t = porter_stem(t);
    return tokens;
}

TokenSequence preprocess(std::string_view text, PipelineVariant variant,
                         const Stoplist& stoplist) {
    TokenSequence tokens = tokenize(text);
    if (variant == PipelineVariant::Statistical)
        tokens = stem(remove_stopwords(std::move(tokens), stoplist));
    return tokens;
}

Stoplist load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stopword list \"" + path + "\"");
    Stoplist list;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        // trim ASCII whitespace
        const auto begin = line.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r\n");
        list.insert(line.substr(begin, end - begin + 1));
    }
    return list;
}

} // namespace gtd
