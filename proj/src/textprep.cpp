#include "sbs/textprep.hpp"

#include <algorithm>
#include <cctype>

#include "sbs/csv.hpp"
#include "sbs/stemmer.hpp"
#include "sbs/util.hpp"

namespace sbs {

namespace {

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower_copy(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = ascii_lower(c);
    }
    return out;
}

bool is_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c >= 0x80;
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> split_words(std::string_view phrase) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : phrase) {
        if (is_space(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                words.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(ascii_lower(c));
        }
    }
    if (!cur.empty()) {
        words.push_back(cur);
    }
    return words;
}

}  // namespace

void AliasMap::add(const std::string& canonical, const std::string& alias) {
    const std::string canon = lower_copy(canonical);
    if (canon.empty()) {
        throw ConfigError("alias map: empty canonical token");
    }
    for (char c : canon) {
        if (!is_word_char(static_cast<unsigned char>(c))) {
            throw ConfigError("alias map: canonical token '" + canon +
                              "' must be a single word (letters, digits, underscores)");
        }
    }
    Entry e;
    e.words = split_words(alias);
    if (e.words.empty()) {
        throw ConfigError("alias map: empty alias for canonical '" + canon + "'");
    }
    std::string phrase;
    for (std::size_t i = 0; i < e.words.size(); ++i) {
        if (i) {
            phrase.push_back(' ');
        }
        phrase += e.words[i];
    }
    auto [it, inserted] = by_phrase_.emplace(phrase, canon);
    if (!inserted) {
        if (it->second != canon) {
            throw ConfigError("alias map: alias '" + phrase + "' mapped to both '" +
                              it->second + "' and '" + canon + "'");
        }
        return;  // duplicate identical pair
    }
    e.canonical = canon;
    entries_.push_back(std::move(e));
    canonicals_.insert(canon);
    sorted_ = false;
}

void AliasMap::sort_entries() const {
    std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        if (a.words.size() != b.words.size()) {
            return a.words.size() > b.words.size();
        }
        std::size_t la = 0, lb = 0;
        for (const auto& w : a.words) la += w.size();
        for (const auto& w : b.words) lb += w.size();
        return la > lb;
    });
    sorted_ = true;
}

AliasMap AliasMap::load(const std::string& path) {
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    CsvReader reader(raw);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 2 || fields[0] != "canonical" ||
        fields[1] != "alias") {
        throw ConfigError(path + ": expected header canonical,alias");
    }
    AliasMap map;
    while (reader.next(fields)) {
        if (fields.size() < 2) {
            throw ConfigError(path + ": row " + std::to_string(reader.record_index() - 1) +
                              ": expected canonical,alias");
        }
        map.add(fields[0], fields[1]);
    }
    return map;
}

std::string AliasMap::apply(std::string_view text) const {
    if (entries_.empty()) {
        return std::string(text);
    }
    if (!sorted_) {
        sort_entries();
    }
    std::string out;
    out.reserve(text.size());
    const std::size_t n = text.size();
    std::size_t i = 0;
    bool prev_word_char = false;
    while (i < n) {
        bool matched = false;
        if (!prev_word_char) {
            for (const Entry& e : entries_) {
                // Try to match e.words starting at i: words match
                // case-insensitively, separated by whitespace runs, and the
                // match must end at a word boundary.
                std::size_t pos = i;
                bool ok = true;
                for (std::size_t wi = 0; wi < e.words.size() && ok; ++wi) {
                    if (wi) {
                        std::size_t ws = pos;
                        while (pos < n && is_space(static_cast<unsigned char>(text[pos]))) {
                            ++pos;
                        }
                        if (pos == ws) {
                            ok = false;
                            break;
                        }
                    }
                    const std::string& w = e.words[wi];
                    if (pos + w.size() > n) {
                        ok = false;
                        break;
                    }
                    for (std::size_t k = 0; k < w.size(); ++k) {
                        if (ascii_lower(text[pos + k]) != w[k]) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) {
                        pos += w.size();
                    }
                }
                if (ok && (pos == n || !is_word_char(static_cast<unsigned char>(text[pos])))) {
                    out += e.canonical;
                    i = pos;
                    matched = true;
                    prev_word_char = true;  // canonical ends with a word char
                    break;
                }
            }
        }
        if (!matched) {
            prev_word_char = is_word_char(static_cast<unsigned char>(text[i]));
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

StopwordList::StopwordList(const std::vector<std::string>& words) {
    for (const std::string& w : words) {
        for (const std::string& tok : tokenize(w)) {
            words_.insert(tok);
        }
    }
}

StopwordList StopwordList::load(const std::string& path) {
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    std::vector<std::string> words;
    std::string line;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t nl = raw.find('\n', pos);
        if (nl == std::string::npos) {
            nl = raw.size();
        }
        line = raw.substr(pos, nl - pos);
        pos = nl + 1;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) {
            ++start;
        }
        if (start < line.size()) {
            words.push_back(line.substr(start));
        }
        if (nl == raw.size()) {
            break;
        }
    }
    return StopwordList(words);
}

StopwordList StopwordList::default_english() {
    static const std::vector<std::string> kWords = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
        "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he",
        "him", "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's",
        "its", "itself", "they", "them", "their", "theirs", "themselves", "what",
        "which", "who", "whom", "this", "that", "that'll", "these", "those", "am", "is",
        "are", "was", "were", "be", "been", "being", "have", "has", "had", "having",
        "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
        "because", "as", "until", "while", "of", "at", "by", "for", "with", "about",
        "against", "between", "into", "through", "during", "before", "after", "above",
        "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
        "again", "further", "then", "once", "here", "there", "when", "where", "why",
        "how", "all", "any", "both", "each", "few", "more", "most", "other", "some",
        "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very",
        "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
        "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn",
        "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn",
        "hasn't", "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't",
        "mustn", "mustn't", "needn", "needn't", "shan", "shan't", "shouldn",
        "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
        "wouldn't",
    };
    return StopwordList(kWords);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == '\'') {
            ++i;
            continue;
        }
        // U+2019 right single quotation mark (0xE2 0x80 0x99)
        if (c == 0xE2 && i + 2 < n && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            static_cast<unsigned char>(text[i + 2]) == 0x99) {
            i += 3;
            continue;
        }
        if (is_word_char(c)) {
            cur.push_back(ascii_lower(static_cast<char>(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
        ++i;
    }
    if (!cur.empty()) {
        tokens.push_back(std::move(cur));
    }
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stopwords,
                                          const std::unordered_set<std::string>& brand_tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens) {
        if (stopwords.contains(t) && !brand_tokens.count(t)) {
            continue;
        }
        out.push_back(t);
    }
    return out;
}

std::vector<std::string> stem_tokens(const std::vector<std::string>& tokens,
                                     const std::unordered_set<std::string>& brand_tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens) {
        if (brand_tokens.count(t)) {
            out.push_back(t);
        } else {
            out.push_back(stem_english(t));
        }
    }
    return out;
}

TokenStream preprocess(const Document& doc, const AliasMap& aliases,
                       const StopwordList& stopwords) {
    TokenStream ts;
    ts.doc_id = doc.id;
    const std::string unified = aliases.apply(doc.text);
    ts.tokens = stem_tokens(remove_stopwords(tokenize(unified), stopwords,
                                             aliases.canonical_tokens()),
                            aliases.canonical_tokens());
    return ts;
}

}  // namespace sbs
