#include <benchmark/benchmark.h>

#include "gtd/linear.hpp"
#include "gtd/rng.hpp"
#include "gtd/textproc.hpp"
#include "gtd/vectorize.hpp"

namespace {

using namespace gtd;

std::vector<std::string> sample_texts(std::size_t n) {
    static const char* words[] = {"the",      "detection", "of",     "generated",
                                  "text",     "remains",   "an",     "open",
                                  "problem",  "for",       "large",  "language",
                                  "models",   "and",       "their",  "ensembles",
                                  "punctuation!", "Mixed-Case", "123", "caf\xC3\xA9"};
    Rng rng(7);
    std::vector<std::string> texts(n);
    for (auto& text : texts) {
        const std::size_t len = 20 + rng.below(30);
        for (std::size_t t = 0; t < len; ++t) {
            if (t > 0) text += ' ';
            text += words[rng.below(std::size(words))];
        }
    }
    return texts;
}

void BM_Tokenize(benchmark::State& state) {
    const auto texts = sample_texts(64);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tokenize(texts[i++ % texts.size()]));
    }
}
BENCHMARK(BM_Tokenize);

void BM_PreprocessStatistical(benchmark::State& state) {
    const auto texts = sample_texts(64);
    const Stoplist& stop = default_stoplist();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            preprocess(texts[i++ % texts.size()], PipelineVariant::Statistical, stop));
    }
}
BENCHMARK(BM_PreprocessStatistical);

void BM_TfidfTransform(benchmark::State& state) {
    const auto texts = sample_texts(256);
    std::vector<TokenSequence> docs;
    for (const auto& t : texts) docs.push_back(tokenize(t));
    const Vocabulary vocab = fit_vocabulary(docs, 1);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tfidf_vector(vocab, docs[i++ % docs.size()]));
    }
}
BENCHMARK(BM_TfidfTransform);

void BM_NaiveBayesFit(benchmark::State& state) {
    const auto texts = sample_texts(static_cast<std::size_t>(state.range(0)));
    std::vector<TokenSequence> docs;
    for (const auto& t : texts) docs.push_back(tokenize(t));
    const Vocabulary vocab = fit_vocabulary(docs, 1);
    std::vector<FeatureVector> X;
    std::vector<Label> y;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        X.push_back(tfidf_vector(vocab, docs[d]));
        y.push_back(d % 2 == 0 ? Label::Human : Label::Generated);
    }
    const auto w = uniform_weights(X.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(nb_fit(X, y, w, 1.0, vocab.size()));
    }
}
BENCHMARK(BM_NaiveBayesFit)->Arg(256)->Arg(1024);

} // namespace
