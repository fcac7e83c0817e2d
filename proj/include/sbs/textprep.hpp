#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sbs/corpus.hpp"

namespace sbs {

// Maps surface phrases (case-insensitive, possibly multi-word) to canonical
// brand tokens. Canonical tokens are lowercase, survive stopword removal
// and stemming, and may contain underscores.
class AliasMap {
public:
    AliasMap() = default;

    // Throws ConfigError if the alias phrase is already mapped to a
    // different canonical token.
    void add(const std::string& canonical, const std::string& alias);

    // Delimited file, header canonical,alias; one pair per row.
    static AliasMap load(const std::string& path);

    bool empty() const { return entries_.empty(); }

    const std::unordered_set<std::string>& canonical_tokens() const { return canonicals_; }

    // Replaces every word-boundary-anchored occurrence of an alias phrase
    // (longest match first) by its canonical token.
    std::string apply(std::string_view text) const;

private:
    struct Entry {
        std::vector<std::string> words;  // lowercase alias words
        std::string canonical;
    };
    // Longest match first: sorted by word count desc, then length desc.
    mutable std::vector<Entry> entries_;
    mutable bool sorted_ = false;
    std::unordered_map<std::string, std::string> by_phrase_;
    std::unordered_set<std::string> canonicals_;

    void sort_entries() const;
};

class StopwordList {
public:
    StopwordList() = default;
    explicit StopwordList(const std::vector<std::string>& words);

    // One word per line; '#' starts a comment. Every entry is run through
    // the tokenizer so that surface forms like "you're" match the
    // apostrophe-free tokens they become.
    static StopwordList load(const std::string& path);

    // The built-in English list used when no file is configured.
    static StopwordList default_english();

    bool contains(const std::string& token) const { return words_.count(token) > 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

struct TokenStream {
    std::string doc_id;
    std::vector<std::string> tokens;
};

// Lowercases and splits into maximal runs of [a-z0-9_]. Apostrophes
// (ASCII and U+2019) are deleted so "don't" stays a single token; every
// other punctuation byte separates tokens. Bytes >= 0x80 are kept as
// token characters.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stopwords,
                                          const std::unordered_set<std::string>& brand_tokens);

// Stems every token with the English Snowball stemmer; brand canonical
// tokens pass through unchanged.
std::vector<std::string> stem_tokens(const std::vector<std::string>& tokens,
                                     const std::unordered_set<std::string>& brand_tokens);

// apply_aliases -> tokenize -> remove_stopwords -> stem, in that order.
TokenStream preprocess(const Document& doc, const AliasMap& aliases,
                       const StopwordList& stopwords);

}  // namespace sbs
