#include "sbs/stemmer.hpp"

#include <array>
#include <cstring>

namespace sbs {

namespace {

// 'y' counts as a vowel here; the marker 'Y' (set by the prelude for
// consonant-y positions) does not.
bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool ends_with(const std::string& w, std::string_view suf) {
    return w.size() >= suf.size() &&
           std::memcmp(w.data() + w.size() - suf.size(), suf.data(), suf.size()) == 0;
}

bool contains_vowel(const std::string& w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        if (is_vowel(w[i])) {
            return true;
        }
    }
    return false;
}

bool is_double(const std::string& w) {
    if (w.size() < 2) {
        return false;
    }
    const char c = w[w.size() - 1];
    if (c != w[w.size() - 2]) {
        return false;
    }
    return c == 'b' || c == 'd' || c == 'f' || c == 'g' || c == 'm' || c == 'n' ||
           c == 'p' || c == 'r' || c == 't';
}

// True when the chars just before position `pos` form a short syllable:
// non-vowel + vowel + non-vowel(not w/x/Y), or vowel + non-vowel at the
// start of the word.
bool short_syllable_before(const std::string& w, std::size_t pos) {
    if (pos == 2 && is_vowel(w[0]) && !is_vowel(w[1])) {
        return true;
    }
    if (pos >= 3) {
        const char c = w[pos - 1];
        if (!is_vowel(c) && c != 'w' && c != 'x' && c != 'Y' && is_vowel(w[pos - 2]) &&
            !is_vowel(w[pos - 3])) {
            return true;
        }
    }
    return false;
}

bool valid_li_ending(char c) {
    return c == 'c' || c == 'd' || c == 'e' || c == 'g' || c == 'h' || c == 'k' ||
           c == 'm' || c == 'n' || c == 'r' || c == 't';
}

struct Replacement {
    std::string_view suffix;
    std::string_view replacement;
};

const char* exception1(const std::string& w) {
    struct Pair {
        const char* word;
        const char* stem;
    };
    static constexpr Pair kTable[] = {
        {"skis", "ski"},     {"skies", "sky"},   {"dying", "die"},
        {"lying", "lie"},    {"tying", "tie"},   {"idly", "idl"},
        {"gently", "gentl"}, {"ugly", "ugli"},   {"early", "earli"},
        {"only", "onli"},    {"singly", "singl"}, {"sky", "sky"},
        {"news", "news"},    {"howe", "howe"},   {"atlas", "atlas"},
        {"cosmos", "cosmos"}, {"bias", "bias"},  {"andes", "andes"},
    };
    for (const Pair& p : kTable) {
        if (w == p.word) {
            return p.stem;
        }
    }
    return nullptr;
}

bool exception2(const std::string& w) {
    static constexpr const char* kStop[] = {"inning",  "outing", "canning", "herring",
                                            "earring", "proceed", "exceed", "succeed"};
    for (const char* s : kStop) {
        if (w == s) {
            return true;
        }
    }
    return false;
}

struct Regions {
    std::size_t p1;
    std::size_t p2;
};

Regions mark_regions(const std::string& w) {
    Regions r{w.size(), w.size()};
    std::size_t pos = 0;
    bool marked = false;
    // R1 starts right after these prefixes regardless of vowel structure.
    for (std::string_view prefix : {std::string_view("gener"), std::string_view("commun"),
                                    std::string_view("arsen")}) {
        if (w.size() >= prefix.size() &&
            std::memcmp(w.data(), prefix.data(), prefix.size()) == 0) {
            pos = prefix.size();
            marked = true;
            break;
        }
    }
    if (!marked) {
        while (pos < w.size() && !is_vowel(w[pos])) ++pos;
        while (pos < w.size() && is_vowel(w[pos])) ++pos;
        if (pos >= w.size()) {
            return r;
        }
        ++pos;
    }
    r.p1 = pos;
    while (pos < w.size() && !is_vowel(w[pos])) ++pos;
    while (pos < w.size() && is_vowel(w[pos])) ++pos;
    if (pos >= w.size()) {
        return r;
    }
    r.p2 = pos + 1;
    return r;
}

void step_0_and_1a(std::string& w) {
    if (ends_with(w, "'s'")) {
        w.erase(w.size() - 3);
    } else if (ends_with(w, "'s")) {
        w.erase(w.size() - 2);
    } else if (ends_with(w, "'")) {
        w.erase(w.size() - 1);
    }
    if (ends_with(w, "sses")) {
        w.erase(w.size() - 2);
    } else if (ends_with(w, "ied") || ends_with(w, "ies")) {
        if (w.size() > 4) {
            w.erase(w.size() - 2);  // -> i
        } else {
            w.erase(w.size() - 1);  // -> ie
        }
    } else if (ends_with(w, "us") || ends_with(w, "ss")) {
        // keep
    } else if (ends_with(w, "s")) {
        // Delete only if a vowel occurs before the char preceding the s.
        if (w.size() >= 3 && contains_vowel(w, 0, w.size() - 2)) {
            w.pop_back();
        }
    }
}

void step_1b(std::string& w, const Regions& r) {
    static constexpr Replacement kEe[] = {{"eedly", "ee"}, {"eed", "ee"}};
    for (const Replacement& rep : kEe) {
        if (ends_with(w, rep.suffix)) {
            if (w.size() - rep.suffix.size() >= r.p1) {
                w.erase(w.size() - rep.suffix.size());
                w += rep.replacement;
            }
            return;  // longest match decides; no fallthrough
        }
    }
    for (std::string_view suf : {std::string_view("ingly"), std::string_view("edly"),
                                 std::string_view("ing"), std::string_view("ed")}) {
        if (!ends_with(w, suf)) {
            continue;
        }
        if (!contains_vowel(w, 0, w.size() - suf.size())) {
            return;
        }
        w.erase(w.size() - suf.size());
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w += 'e';
        } else if (is_double(w)) {
            w.pop_back();
        } else if (w.size() == r.p1 && short_syllable_before(w, w.size())) {
            w += 'e';
        }
        return;
    }
}

void step_1c(std::string& w) {
    if (w.size() >= 3 && (w.back() == 'y' || w.back() == 'Y') &&
        !is_vowel(w[w.size() - 2])) {
        w.back() = 'i';
    }
}

void step_2(std::string& w, const Regions& r) {
    static constexpr Replacement kTable[] = {
        {"ization", "ize"}, {"ational", "ate"},  {"fulness", "ful"}, {"ousness", "ous"},
        {"iveness", "ive"}, {"tional", "tion"},  {"biliti", "ble"},  {"lessli", "less"},
        {"entli", "ent"},   {"ation", "ate"},    {"alism", "al"},    {"aliti", "al"},
        {"ousli", "ous"},   {"iviti", "ive"},    {"fulli", "ful"},   {"enci", "ence"},
        {"anci", "ance"},   {"abli", "able"},    {"izer", "ize"},    {"ator", "ate"},
        {"alli", "al"},     {"ogi", "og"},       {"bli", "ble"},     {"li", ""},
    };
    for (const Replacement& rep : kTable) {
        if (!ends_with(w, rep.suffix)) {
            continue;
        }
        const std::size_t start = w.size() - rep.suffix.size();
        if (start < r.p1) {
            return;
        }
        if (rep.suffix == "ogi") {
            if (start == 0 || w[start - 1] != 'l') {
                return;
            }
        }
        if (rep.suffix == "li") {
            if (start == 0 || !valid_li_ending(w[start - 1])) {
                return;
            }
        }
        w.erase(start);
        w += rep.replacement;
        return;
    }
}

void step_3(std::string& w, const Regions& r) {
    static constexpr Replacement kTable[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"alize", "al"}, {"icate", "ic"},
        {"iciti", "ic"},    {"ative", ""},      {"ical", "ic"},  {"ness", ""},
        {"ful", ""},
    };
    for (const Replacement& rep : kTable) {
        if (!ends_with(w, rep.suffix)) {
            continue;
        }
        const std::size_t start = w.size() - rep.suffix.size();
        if (start < r.p1) {
            return;
        }
        if (rep.suffix == "ative" && start < r.p2) {
            return;
        }
        w.erase(start);
        w += rep.replacement;
        return;
    }
}

void step_4(std::string& w, const Regions& r) {
    static constexpr std::string_view kTable[] = {
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
        "ate",   "iti",  "ous",  "ive",  "ize",  "ion",  "al",  "er",  "ic",
    };
    for (std::string_view suf : kTable) {
        if (!ends_with(w, suf)) {
            continue;
        }
        const std::size_t start = w.size() - suf.size();
        if (start < r.p2) {
            return;
        }
        if (suf == "ion") {
            if (start == 0 || (w[start - 1] != 's' && w[start - 1] != 't')) {
                return;
            }
        }
        w.erase(start);
        return;
    }
}

void step_5(std::string& w, const Regions& r) {
    if (w.empty()) {
        return;
    }
    if (w.back() == 'e') {
        const std::size_t pos = w.size() - 1;
        if (pos >= r.p2 || (pos >= r.p1 && !short_syllable_before(w, pos))) {
            w.pop_back();
        }
    } else if (w.back() == 'l') {
        const std::size_t pos = w.size() - 1;
        if (pos >= r.p2 && w.size() >= 2 && w[w.size() - 2] == 'l') {
            w.pop_back();
        }
    }
}

}  // namespace

std::string stem_english(std::string_view token) {
    std::string w(token);
    if (const char* exc = exception1(w)) {
        return exc;
    }
    if (w.size() < 3) {
        return w;
    }
    // Prelude: strip one leading apostrophe, mark consonant y as Y.
    if (w[0] == '\'') {
        w.erase(0, 1);
    }
    bool prev_vowel = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 'y' && (i == 0 || prev_vowel)) {
            w[i] = 'Y';
            prev_vowel = false;
        } else {
            prev_vowel = is_vowel(w[i]);
        }
    }
    const Regions r = mark_regions(w);
    step_0_and_1a(w);
    if (!exception2(w)) {
        step_1b(w, r);
        step_1c(w);
        step_2(w, r);
        step_3(w, r);
        step_4(w, r);
        step_5(w, r);
    }
    for (char& c : w) {
        if (c == 'Y') {
            c = 'y';
        }
    }
    return w;
}

}  // namespace sbs
