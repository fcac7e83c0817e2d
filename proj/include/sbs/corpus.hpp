#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sbs {

// One timestamped text unit, e.g. a forum post.
struct Document {
    std::string id;      // non-empty, unique within a corpus
    std::string source;  // e.g. the city forum it came from
    int64_t period;      // ordered period key, e.g. calendar year
    std::string text;    // raw text, may be empty
};

enum class CorpusFormat {
    DelimitedTable,        // CSV with header id,source,period,text
    LineDelimitedRecords,  // one JSON object per line, same keys
};

using SliceKey = std::pair<std::string, int64_t>;

struct LoadReport {
    std::size_t records = 0;
    std::size_t invalid_utf8_replacements = 0;
    std::vector<std::string> warnings;
};

// Immutable after loading; iteration order is ingestion order.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);

    const std::vector<Document>& documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

    // Distinct labels/keys in first-seen order.
    const std::vector<std::string>& sources() const { return sources_; }
    const std::vector<int64_t>& periods() const { return periods_; }

    // Splits into (source, period) sub-corpora. Every document lands in
    // exactly one slice and slice-internal order is ingestion order.
    std::map<SliceKey, Corpus> partition() const;

private:
    std::vector<Document> docs_;
    std::vector<std::string> sources_;
    std::vector<int64_t> periods_;
};

Corpus load_corpus(const std::string& path, CorpusFormat format,
                   LoadReport* report = nullptr);

struct OutcomeRow {
    std::string entity;
    int64_t period;
    double value;  // non-negative count, e.g. annual visitors
};

// Parses a delimited file with header entity,period,value. Rejects
// duplicate (entity, period) keys, negative or non-numeric values, and
// per-entity period gaps.
std::vector<OutcomeRow> load_outcomes(const std::string& path);

CorpusFormat corpus_format_from_string(const std::string& s);

}  // namespace sbs
