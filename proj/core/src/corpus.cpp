#include "gtd/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "gtd/errors.hpp"
#include "gtd/rng.hpp"
#include "gtd/utf8.hpp"

namespace gtd {

namespace {

std::string lowercase_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return out;
}

// Trims Unicode whitespace from both ends.
std::string_view trim(std::string_view s) {
    std::size_t begin = 0;
    while (begin < s.size()) {
        std::size_t i = begin;
        const char32_t cp = utf8::decode(s, i);
        if (!utf8::is_space(cp)) break;
        begin = i;
    }
    // Scan forward remembering the end of the last non-space code point.
    std::size_t end = begin;
    std::size_t i = begin;
    while (i < s.size()) {
        const char32_t cp = utf8::decode(s, i);
        if (!utf8::is_space(cp)) end = i;
    }
    return s.substr(begin, end - begin);
}

void validate_and_add(std::vector<Document>& docs,
                      std::unordered_set<std::string>& seen_ids, Document doc,
                      std::size_t line_no, bool allow_unlabeled) {
    if (trim(doc.text).empty())
        throw DataError("line " + std::to_string(line_no) + ": empty text");
    if (!doc.label.has_value() && !allow_unlabeled)
        throw DataError("line " + std::to_string(line_no) +
                        ": missing label (required outside prediction mode)");
    if (!seen_ids.insert(doc.id).second)
        throw DataError("line " + std::to_string(line_no) + ": duplicate id \"" +
                        doc.id + "\"");
    docs.push_back(std::move(doc));
}

Corpus load_jsonl(std::istream& in, bool allow_unlabeled) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_index = 0;  // 0-based; used for auto ids
    while (std::getline(in, line)) {
        const std::size_t line_no = line_index + 1;
        if (trim(line).empty()) {
            ++line_index;
            continue;
        }
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("line " + std::to_string(line_no) +
                            ": malformed JSON: " + e.what());
        }
        if (!rec.is_object())
            throw DataError("line " + std::to_string(line_no) + ": record is not an object");
        if (!rec.contains("text") || !rec["text"].is_string())
            throw DataError("line " + std::to_string(line_no) + ": missing string field \"text\"");

        Document doc;
        doc.text = rec["text"].get<std::string>();
        if (rec.contains("id")) {
            const auto& id = rec["id"];
            if (id.is_string())
                doc.id = id.get<std::string>();
            else if (id.is_number_integer())
                doc.id = std::to_string(id.get<long long>());
            else
                throw DataError("line " + std::to_string(line_no) + ": id must be a string");
        } else {
            doc.id = std::to_string(line_index);
        }
        if (rec.contains("label") && !rec["label"].is_null()) {
            if (!rec["label"].is_string())
                throw DataError("line " + std::to_string(line_no) + ": label must be a string");
            doc.label = parse_label(rec["label"].get<std::string>());
        }
        validate_and_add(docs, seen_ids, std::move(doc), line_no, allow_unlabeled);
        ++line_index;
    }
    return Corpus(std::move(docs));
}

// RFC 4180 record reader: quoted fields, doubled quotes, embedded newlines.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Returns false at end of input. line() reports the 1-based line the
    // record started on.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        record_line_ = line_;
        std::string field;
        bool quoted = false;
        while (true) {
            if (c == EOF) {
                fields.push_back(field);
                if (quoted) throw DataError("line " + std::to_string(record_line_) +
                                            ": unterminated quoted field");
                return true;
            }
            if (quoted) {
                if (c == '"') {
                    const int peek = in_.peek();
                    if (peek == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(static_cast<char>(c));
                }
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else if (c == '\r' && in_.peek() == '\n') {
                in_.get();
                ++line_;
                fields.push_back(field);
                return true;
            } else if (c == '\n') {
                ++line_;
                fields.push_back(field);
                return true;
            } else {
                field.push_back(static_cast<char>(c));
            }
            c = in_.get();
        }
    }

    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 1;
};

Corpus load_csv(std::istream& in, bool allow_unlabeled) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return Corpus{};  // empty file -> empty corpus
    const std::vector<std::string> expected{"id", "text", "label"};
    if (fields != std::vector<std::string>(expected))
        throw DataError("line 1: CSV header must be exactly \"id,text,label\"");

    std::vector<Document> docs;
    std::unordered_set<std::string> seen_ids;
    while (reader.next(fields)) {
        const std::size_t line_no = reader.line();
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != 3)
            throw DataError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        Document doc;
        doc.id = fields[0];
        doc.text = fields[1];
        if (!fields[2].empty()) doc.label = parse_label(fields[2]);
        validate_and_add(docs, seen_ids, std::move(doc), line_no, allow_unlabeled);
    }
    return Corpus(std::move(docs));
}

} // namespace

Label parse_label(std::string_view s) {
    const std::string lower = lowercase_ascii(s);
    if (lower == "human") return Label::Human;
    if (lower == "generated") return Label::Generated;
    throw DataError("unknown label \"" + std::string(s) + "\" (expected \"human\" or \"generated\")");
}

std::string_view label_name(Label l) {
    return l == Label::Human ? "human" : "generated";
}

bool Corpus::all_labeled() const {
    return std::all_of(docs_.begin(), docs_.end(),
                       [](const Document& d) { return d.label.has_value(); });
}

CorpusFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : lowercase_ascii(path.substr(dot + 1));
    if (ext == "jsonl" || ext == "json") return CorpusFormat::Jsonl;
    if (ext == "csv") return CorpusFormat::Csv;
    throw DataError("cannot infer corpus format from \"" + path +
                    "\" (expected .jsonl or .csv)");
}

Corpus load_corpus(const std::string& path, CorpusFormat format, bool allow_unlabeled) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    return format == CorpusFormat::Jsonl ? load_jsonl(in, allow_unlabeled)
                                         : load_csv(in, allow_unlabeled);
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& c, double train_fraction,
                                       std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("train_fraction must be in (0, 1)");
    if (!c.all_labeled()) throw DataError("split requires a fully labeled corpus");

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < c.size(); ++i)
        by_class[static_cast<int>(*c[i].label)].push_back(i);
    for (const auto& cls : by_class)
        if (cls.size() < 2)
            throw DataError("each label class needs at least 2 documents to split");

    Rng rng(seed);
    std::vector<bool> in_train(c.size(), false);
    for (auto& cls : by_class) {
        rng.shuffle(cls);
        const auto n_train = std::max<std::size_t>(
            1, static_cast<std::size_t>(train_fraction * static_cast<double>(cls.size())));
        for (std::size_t k = 0; k < n_train; ++k) in_train[cls[k]] = true;
    }

    std::vector<Document> train, test;
    for (std::size_t i = 0; i < c.size(); ++i)
        (in_train[i] ? train : test).push_back(c[i]);
    return {Corpus(std::move(train)), Corpus(std::move(test))};
}

std::size_t whitespace_word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = utf8::decode(text, i);
        if (utf8::is_space(cp)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

CorpusStats corpus_stats(const Corpus& c) {
    if (!c.all_labeled()) throw DataError("corpus_stats requires a fully labeled corpus");

    std::array<LabelWordStats, 2> stats;
    std::array<std::size_t, 2> totals{0, 0};
    for (auto& s : stats) s.min_words = std::numeric_limits<std::size_t>::max();

    for (const auto& doc : c.docs()) {
        const int cls = static_cast<int>(*doc.label);
        const std::size_t words = whitespace_word_count(doc.text);
        auto& s = stats[cls];
        ++s.n_docs;
        totals[cls] += words;
        s.min_words = std::min(s.min_words, words);
        s.max_words = std::max(s.max_words, words);
    }
    for (int cls = 0; cls < 2; ++cls) {
        auto& s = stats[cls];
        if (s.n_docs == 0) {
            s.min_words = 0;
        } else {
            s.avg_words = static_cast<double>(totals[cls]) / static_cast<double>(s.n_docs);
        }
    }
    return CorpusStats{stats[0], stats[1]};
}

} // namespace gtd
