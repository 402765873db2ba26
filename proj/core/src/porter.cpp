#include "gtd/porter.hpp"

#include <algorithm>
#include <array>

namespace gtd {

namespace {

bool is_consonant(const std::string& w, std::size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(w, i - 1);
        default:
            return true;
    }
}

// m in [C](VC)^m[V].
int measure(const std::string& w, std::size_t len) {
    int m = 0;
    std::size_t i = 0;
    while (i < len && is_consonant(w, i)) ++i;
    while (true) {
        if (i == len) return m;
        while (i < len && !is_consonant(w, i)) ++i;
        if (i == len) return m;
        while (i < len && is_consonant(w, i)) ++i;
        ++m;
    }
}

bool has_vowel(const std::string& w, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool ends_double_consonant(const std::string& w) {
    const std::size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: stem ends cvc where the final c is not w, x or y.
bool ends_cvc(const std::string& w, std::size_t len) {
    if (len < 3) return false;
    if (!is_consonant(w, len - 3) || is_consonant(w, len - 2) ||
        !is_consonant(w, len - 1))
        return false;
    const char c = w[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() &&
           w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Applies the first rule whose suffix matches, if the stem measure exceeds
// min_measure. A matched suffix ends the search whether or not the
// condition holds. Lists are ordered so overlapping suffixes match
// longest-first.
bool apply_rules(std::string& w, std::initializer_list<Rule> rules, int min_measure) {
    for (const Rule& r : rules) {
        if (!ends_with(w, r.suffix)) continue;
        const std::size_t stem_len = w.size() - r.suffix.size();
        if (measure(w, stem_len) > min_measure) {
            w.resize(stem_len);
            w.append(r.replacement);
        }
        return true;
    }
    return false;
}

void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ss")) {
        // keep
    } else if (ends_with(w, "s")) {
        w.resize(w.size() - 1);
    }
}

void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
        if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);
        return;
    }
    bool stripped = false;
    if (ends_with(w, "ed")) {
        if (has_vowel(w, w.size() - 2)) {
            w.resize(w.size() - 2);
            stripped = true;
        }
    } else if (ends_with(w, "ing")) {
        if (has_vowel(w, w.size() - 3)) {
            w.resize(w.size() - 3);
            stripped = true;
        }
    }
    if (!stripped) return;
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
    } else if (ends_double_consonant(w)) {
        const char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (measure(w, w.size()) == 1 && ends_cvc(w, w.size())) {
        w.push_back('e');
    }
}

void step1c(std::string& w) {
    if (ends_with(w, "y") && has_vowel(w, w.size() - 1)) w.back() = 'i';
}

void step2(std::string& w) {
    apply_rules(w,
                {{"ational", "ate"}, {"ization", "ize"}, {"iveness", "ive"},
                 {"fulness", "ful"}, {"ousness", "ous"}, {"tional", "tion"},
                 {"biliti", "ble"},  {"entli", "ent"},   {"ousli", "ous"},
                 {"ation", "ate"},   {"alism", "al"},    {"aliti", "al"},
                 {"iviti", "ive"},   {"enci", "ence"},   {"anci", "ance"},
                 {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},
                 {"ator", "ate"},    {"eli", "e"}},
                0);
}

void step3(std::string& w) {
    apply_rules(w,
                {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                 {"ical", "ic"},  {"ness", ""},  {"ful", ""}},
                0);
}

void step4(std::string& w) {
    static constexpr std::array<std::string_view, 19> suffixes{
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ion",
        "ism",   "ate",  "iti",  "ous",  "ive",  "ize",  "al",  "er",  "ic",
        "ou"};
    for (const auto suffix : suffixes) {
        if (!ends_with(w, suffix)) continue;
        const std::size_t stem_len = w.size() - suffix.size();
        if (measure(w, stem_len) > 1) {
            if (suffix == "ion") {
                const char c = stem_len > 0 ? w[stem_len - 1] : '\0';
                if (c != 's' && c != 't') return;
            }
            w.resize(stem_len);
        }
        return;
    }
}

void step5a(std::string& w) {
    if (!ends_with(w, "e")) return;
    const std::size_t stem_len = w.size() - 1;
    const int m = measure(w, stem_len);
    if (m > 1 || (m == 1 && !ends_cvc(w, stem_len))) w.resize(stem_len);
}

void step5b(std::string& w) {
    if (w.back() == 'l' && ends_double_consonant(w) && measure(w, w.size()) > 1)
        w.pop_back();
}

} // namespace

std::string porter_stem(std::string_view word) {
    std::string w(word);
    if (w.size() <= 2) return w;
    if (!std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
        return w;
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5a(w);
    step5b(w);
    return w;
}

} // namespace gtd
