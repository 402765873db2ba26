#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "gtd/errors.hpp"
#include "gtd/porter.hpp"
#include "gtd/rng.hpp"
#include "gtd/textproc.hpp"

using namespace gtd;

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("Hello, world!") == TokenSequence{"hello", "world"});
    CHECK(tokenize("ABS LED blinking)") == TokenSequence{"abs", "led", "blinking"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("\xE2\x80\xA6!!!").empty());  // ellipsis + punctuation only
    CHECK(tokenize("tab\tand\nnewline") == TokenSequence{"tab", "and", "newline"});
    CHECK(tokenize("abc123 456 x-ray") == TokenSequence{"abc123", "456", "x", "ray"});
}

TEST_CASE("tokenize folds case across covered alphabets and keeps accents") {
    CHECK(tokenize("Caf\xC3\xA9 R\xC3\x89SUM\xC3\x89") ==
          TokenSequence{"caf\xC3\xA9", "r\xC3\xA9sum\xC3\xA9"});
    CHECK(tokenize("\xD0\xAD\xD0\xA2\xD0\x9E \xD1\x82\xD0\xB5\xD1\x81\xD1\x82") ==
          TokenSequence{"\xD1\x8D\xD1\x82\xD0\xBE", "\xD1\x82\xD0\xB5\xD1\x81\xD1\x82"});
}

TEST_CASE("stopword removal is an order-preserving exact filter") {
    const Stoplist stop{"this", "is"};
    CHECK(remove_stopwords({"this", "is", "data"}, stop) == TokenSequence{"data"});
    CHECK(remove_stopwords({"a", "b"}, {}) == TokenSequence{"a", "b"});
    CHECK(remove_stopwords({"the", "the", "the"}, {"the"}).empty());
}

// Classic Porter reference vectors (full-stemmer outputs).
TEST_CASE("porter stemmer matches the reference vectors") {
    static const std::pair<const char*, const char*> kVectors[] = {
    {"caresses", "caress"}, {"ponies", "poni"}, {"ties", "ti"},
    {"caress", "caress"}, {"cats", "cat"}, {"feed", "feed"},
    {"agreed", "agre"}, {"plastered", "plaster"}, {"bled", "bled"},
    {"motoring", "motor"}, {"sing", "sing"}, {"conflated", "conflat"},
    {"troubled", "troubl"}, {"sized", "size"}, {"hopping", "hop"},
    {"tanned", "tan"}, {"falling", "fall"}, {"hissing", "hiss"},
    {"fizzed", "fizz"}, {"failing", "fail"}, {"filing", "file"},
    {"happy", "happi"}, {"sky", "sky"}, {"relational", "relat"},
    {"conditional", "condit"}, {"rational", "ration"}, {"valenci", "valenc"},
    {"hesitanci", "hesit"}, {"digitizer", "digit"}, {"conformabli", "conform"},
    {"radicalli", "radic"}, {"differentli", "differ"}, {"vileli", "vile"},
    {"analogousli", "analog"}, {"vietnamization", "vietnam"}, {"predication", "predic"},
    {"operator", "oper"}, {"feudalism", "feudal"}, {"decisiveness", "decis"},
    {"hopefulness", "hope"}, {"callousness", "callous"}, {"formaliti", "formal"},
    {"sensitiviti", "sensit"}, {"sensibiliti", "sensibl"}, {"triplicate", "triplic"},
    {"formative", "form"}, {"formalize", "formal"}, {"electriciti", "electr"},
    {"electrical", "electr"}, {"hopeful", "hope"}, {"goodness", "good"},
    {"revival", "reviv"}, {"allowance", "allow"}, {"inference", "infer"},
    {"airliner", "airlin"}, {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"},
    {"defensible", "defens"}, {"irritant", "irrit"}, {"replacement", "replac"},
    {"adjustment", "adjust"}, {"dependent", "depend"}, {"adoption", "adopt"},
    {"homologou", "homolog"}, {"communism", "commun"}, {"activate", "activ"},
    {"angulariti", "angular"}, {"homologous", "homolog"}, {"effective", "effect"},
    {"bowdlerize", "bowdler"}, {"probate", "probat"}, {"rate", "rate"},
    {"cease", "ceas"}, {"controll", "control"}, {"roll", "roll"},
    {"generalizations", "gener"}, {"oscillators", "oscil"}, {"trouble", "troubl"},
    {"troubles", "troubl"}, {"troubling", "troubl"}, {"oats", "oat"},
    {"tree", "tree"}, {"trees", "tree"}, {"ivy", "ivi"},
    {"orrery", "orreri"}, {"private", "privat"}, {"oaten", "oaten"},
    {"by", "by"}, {"y", "y"}, {"a", "a"},
    {"is", "is"}, {"be", "be"}, {"was", "wa"},
    {"argument", "argument"}, {"arguments", "argument"}, {"agreement", "agreement"},
    {"agreements", "agreement"}, {"connection", "connect"}, {"connections", "connect"},
    {"connected", "connect"}, {"connecting", "connect"}, {"connects", "connect"},
    {"university", "univers"}, {"universities", "univers"}, {"maximum", "maximum"},
    {"multiply", "multipli"}, {"multiplied", "multipli"}, {"crying", "cry"},
    {"cried", "cri"}, {"flies", "fli"}, {"dies", "di"},
    {"died", "di"}, {"dying", "dy"}, {"lying", "ly"},
    {"tying", "ty"}, {"saying", "sai"}, {"said", "said"},
    {"says", "sai"}, {"running", "run"}, {"runner", "runner"},
    {"runs", "run"}, {"easily", "easili"}, {"fairly", "fairli"},
    {"quickly", "quickli"}, {"organization", "organ"}, {"organizer", "organ"},
    {"organized", "organ"}, {"organizing", "organ"}, {"national", "nation"},
    {"nationalism", "nation"}, {"nationality", "nation"}, {"generically", "gener"},
    {"happiness", "happi"}, {"happier", "happier"}, {"studying", "studi"},
    {"studies", "studi"}, {"student", "student"}, {"computation", "comput"},
    {"computational", "comput"}, {"computer", "comput"}, {"computing", "comput"},
    {"computed", "comput"}, {"considering", "consid"}, {"consideration", "consider"},
    {"considered", "consid"}, {"detection", "detect"}, {"detecting", "detect"},
    {"detector", "detector"}, {"detectable", "detect"}, {"classified", "classifi"},
    {"classification", "classif"}, {"classifier", "classifi"}, {"ensembles", "ensembl"},
    {"ensemble", "ensembl"}, {"statistical", "statist"}, {"transformer", "transform"},
    {"transformers", "transform"}, {"neural", "neural"}, {"recurrent", "recurr"},
    {"convolutional", "convolut"}, {"embedding", "embed"}, {"embeddings", "embed"},
    {"attention", "attent"}, {"pooling", "pool"}, {"stemming", "stem"},
    {"stemmer", "stemmer"}, {"stopwords", "stopword"}, {"tokenization", "token"},
    {"vectorizer", "vector"}, {"precision", "precis"}, {"recall", "recal"},
    {"accuracy", "accuraci"}, {"generation", "gener"}, {"generated", "gener"},
    {"generating", "gener"}, {"generator", "gener"}, {"artificial", "artifici"},
    {"authenticity", "authent"}, {"distinguish", "distinguish"}, {"distinguishing", "distinguish"},
    {"written", "written"}, {"writing", "write"}, {"writes", "write"},
    {"machine", "machin"}, {"machines", "machin"}, {"learning", "learn"},
    {"learned", "learn"}, {"models", "model"}, {"modeling", "model"},
    {"knees", "knee"}, {"knee", "knee"}, {"skies", "ski"},
    {"enjoy", "enjoi"}, {"enjoys", "enjoi"}, {"enjoyed", "enjoi"},
    {"enjoying", "enjoi"}, {"agree", "agre"}, {"disagree", "disagre"},
    {"agrees", "agre"}, {"feelings", "feel"}
    };
    for (const auto& [word, expected] : kVectors) {
        CAPTURE(word);
        CHECK(porter_stem(word) == expected);
    }
}

TEST_CASE("porter leaves short and non-alphabetic tokens alone") {
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("by") == "by");
    CHECK(porter_stem("w017") == "w017");
    CHECK(porter_stem("caf\xC3\xA9") == "caf\xC3\xA9");
}

TEST_CASE("stem maps token-wise") {
    CHECK(stem({"caresses", "ponies", "sky"}) == TokenSequence{"caress", "poni", "sky"});
}

TEST_CASE("preprocess composes per pipeline variant") {
    const Stoplist stop{"the"};
    CHECK(preprocess("The ponies ran", PipelineVariant::Statistical, stop) ==
          TokenSequence{"poni", "ran"});
    CHECK(preprocess("The ponies ran", PipelineVariant::NeuralEnsemble, stop) ==
          TokenSequence{"the", "ponies", "ran"});
    CHECK(preprocess("The ponies ran", PipelineVariant::Raw, stop) ==
          TokenSequence{"the", "ponies", "ran"});
    CHECK(preprocess("\xE2\x80\xA6!!!", PipelineVariant::Statistical, stop).empty());
}

namespace {

std::string join(const TokenSequence& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::string random_text(Rng& rng) {
    static const char* pieces[] = {"The", "ponies", "RAN!", "far,", "away...",
                                   "caf\xC3\xA9", "123", "-", "(so)", "fast",
                                   "And", "then", "STOPPED."};
    std::string text;
    const std::size_t len = rng.below(12);
    for (std::size_t i = 0; i < len; ++i) {
        if (i > 0) text += ' ';
        text += pieces[rng.below(std::size(pieces))];
    }
    return text;
}

} // namespace

TEST_CASE("neural-ensemble preprocessing is idempotent in token space") {
    Rng rng(11);
    const Stoplist& stop = default_stoplist();
    for (int i = 0; i < 50; ++i) {
        const std::string text = random_text(rng);
        const auto once = preprocess(text, PipelineVariant::NeuralEnsemble, stop);
        const auto twice = preprocess(join(once), PipelineVariant::NeuralEnsemble, stop);
        CHECK(once == twice);
    }
}

TEST_CASE("statistical output is the stemmed stopword-filtered image of the neural output") {
    Rng rng(12);
    const Stoplist& stop = default_stoplist();
    for (int i = 0; i < 50; ++i) {
        const std::string text = random_text(rng);
        const auto neural = preprocess(text, PipelineVariant::NeuralEnsemble, stop);
        const auto statistical = preprocess(text, PipelineVariant::Statistical, stop);
        TokenSequence expected;
        for (const auto& t : neural)
            if (!stop.contains(t)) expected.push_back(porter_stem(t));
        CHECK(statistical == expected);
    }
}

TEST_CASE("pipeline outputs contain only lowercase alphanumeric tokens") {
    Rng rng(13);
    const Stoplist& stop = default_stoplist();
    for (int i = 0; i < 50; ++i) {
        for (const auto variant : {PipelineVariant::Statistical,
                                   PipelineVariant::NeuralEnsemble,
                                   PipelineVariant::Raw}) {
            for (const auto& tok : preprocess(random_text(rng), variant, stop)) {
                CHECK_FALSE(tok.empty());
                for (const char c : tok) {
                    const auto uc = static_cast<unsigned char>(c);
                    const bool ascii_ok =
                        (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
                    CHECK((ascii_ok || uc >= 0x80));
                    CHECK(uc != ' ');
                }
            }
        }
    }
}

TEST_CASE("stoplist files allow comments and blanks") {
    const std::string path = "gtd_test_stoplist.txt";
    {
        std::ofstream out(path);
        out << "# comment\n\nthe\nis  \n  a # trailing comment\n";
    }
    const Stoplist list = load_stoplist(path);
    std::remove(path.c_str());
    CHECK(list == Stoplist{"the", "is", "a"});
}

TEST_CASE("built-in stoplist matches the shipped data file") {
    const Stoplist from_file = load_stoplist(std::string(GTD_DATA_DIR) + "/stopwords_en.txt");
    CHECK(from_file == default_stoplist());
    CHECK(default_stoplist().size() == 179);
}
