#include "sbs/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sbs/csv.hpp"
#include "sbs/util.hpp"

namespace sbs {

namespace {

int64_t parse_period(const std::string& s, const std::string& where) {
    int64_t v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
        throw DataError(where + ": invalid period '" + s + "'");
    }
    return v;
}

Corpus load_delimited(const std::string& path, LoadReport& report) {
    const std::string raw = read_file(path);
    CsvReader reader(raw);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        throw DataError(path + ": empty file, expected header id,source,period,text");
    }
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        col[fields[i]] = i;
    }
    for (const char* name : {"id", "source", "period", "text"}) {
        if (!col.count(name)) {
            throw DataError(path + ": header missing field " + std::string(name));
        }
    }
    std::vector<Document> docs;
    std::size_t rec = 0;
    while (reader.next(fields)) {
        ++rec;
        const std::string where = "record " + std::to_string(rec);
        auto get = [&](const char* name) -> const std::string& {
            const std::size_t idx = col.at(name);
            if (idx >= fields.size()) {
                throw DataError(where + ": missing field " + std::string(name));
            }
            return fields[idx];
        };
        Document d;
        d.id = get("id");
        d.source = get("source");
        d.period = parse_period(get("period"), where);
        std::size_t replaced = 0;
        d.text = sanitize_utf8(get("text"), &replaced);
        report.invalid_utf8_replacements += replaced;
        if (d.id.empty()) {
            throw DataError(where + ": missing field id");
        }
        docs.push_back(std::move(d));
    }
    report.records = docs.size();
    return Corpus(std::move(docs));
}

Corpus load_line_records(const std::string& path, LoadReport& report) {
    const std::string raw = read_file(path);
    std::vector<Document> docs;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        std::size_t nl = raw.find('\n', pos);
        if (nl == std::string::npos) {
            nl = raw.size();
        }
        std::string_view line(raw.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        const std::string where = "record " + std::to_string(line_no);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw DataError(where + ": not a valid JSON object");
        }
        Document d;
        for (const char* name : {"id", "source", "period", "text"}) {
            if (!j.contains(name)) {
                throw DataError(where + ": missing field " + std::string(name));
            }
        }
        if (!j["id"].is_string() || !j["source"].is_string() || !j["text"].is_string()) {
            throw DataError(where + ": id/source/text must be strings");
        }
        d.id = j["id"].get<std::string>();
        d.source = j["source"].get<std::string>();
        if (j["period"].is_number_integer()) {
            d.period = j["period"].get<int64_t>();
        } else if (j["period"].is_string()) {
            d.period = parse_period(j["period"].get<std::string>(), where);
        } else {
            throw DataError(where + ": invalid period");
        }
        std::size_t replaced = 0;
        d.text = sanitize_utf8(j["text"].get<std::string>(), &replaced);
        report.invalid_utf8_replacements += replaced;
        if (d.id.empty()) {
            throw DataError(where + ": missing field id");
        }
        docs.push_back(std::move(d));
    }
    report.records = docs.size();
    return Corpus(std::move(docs));
}

}  // namespace

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::unordered_set<std::string> seen_ids;
    std::unordered_set<std::string> seen_sources;
    std::unordered_set<int64_t> seen_periods;
    for (const Document& d : docs_) {
        if (!seen_ids.insert(d.id).second) {
            throw DataError("duplicate document id '" + d.id + "'");
        }
        if (seen_sources.insert(d.source).second) {
            sources_.push_back(d.source);
        }
        if (seen_periods.insert(d.period).second) {
            periods_.push_back(d.period);
        }
    }
}

std::map<SliceKey, Corpus> Corpus::partition() const {
    std::map<SliceKey, std::vector<Document>> buckets;
    for (const Document& d : docs_) {
        buckets[{d.source, d.period}].push_back(d);
    }
    std::map<SliceKey, Corpus> out;
    for (auto& [key, docs] : buckets) {
        out.emplace(key, Corpus(std::move(docs)));
    }
    return out;
}

Corpus load_corpus(const std::string& path, CorpusFormat format, LoadReport* report) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    switch (format) {
        case CorpusFormat::DelimitedTable:
            return load_delimited(path, rep);
        case CorpusFormat::LineDelimitedRecords:
            return load_line_records(path, rep);
    }
    throw ConfigError("unknown corpus format");
}

std::vector<OutcomeRow> load_outcomes(const std::string& path) {
    const std::string raw = read_file(path);
    CsvReader reader(raw);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        throw DataError(path + ": empty file, expected header entity,period,value");
    }
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        col[fields[i]] = i;
    }
    for (const char* name : {"entity", "period", "value"}) {
        if (!col.count(name)) {
            throw DataError(path + ": header missing field " + std::string(name));
        }
    }
    std::vector<OutcomeRow> rows;
    std::unordered_set<std::string> keys;
    std::size_t rec = 0;
    while (reader.next(fields)) {
        ++rec;
        const std::string where = "row " + std::to_string(rec);
        if (fields.size() < col.size()) {
            throw DataError(where + ": expected " + std::to_string(col.size()) + " fields");
        }
        OutcomeRow r;
        r.entity = fields[col.at("entity")];
        r.period = parse_period(fields[col.at("period")], where);
        const std::string& vs = fields[col.at("value")];
        try {
            std::size_t consumed = 0;
            r.value = std::stod(vs, &consumed);
            if (consumed != vs.size()) {
                throw std::invalid_argument(vs);
            }
        } catch (const std::exception&) {
            throw DataError(where + ": non-numeric value '" + vs + "'");
        }
        if (r.value < 0) {
            throw DataError(where + ": negative value " + vs);
        }
        const std::string key = r.entity + "\x1f" + std::to_string(r.period);
        if (!keys.insert(key).second) {
            throw DataError(where + ": duplicate (entity, period) = (" + r.entity + ", " +
                            std::to_string(r.period) + ")");
        }
        rows.push_back(std::move(r));
    }
    // Periods must form a contiguous run per entity.
    std::map<std::string, std::vector<int64_t>> per_entity;
    for (const OutcomeRow& r : rows) {
        per_entity[r.entity].push_back(r.period);
    }
    for (auto& [entity, periods] : per_entity) {
        std::sort(periods.begin(), periods.end());
        for (std::size_t i = 1; i < periods.size(); ++i) {
            if (periods[i] != periods[i - 1] + 1) {
                throw DataError("entity '" + entity + "': periods not contiguous between " +
                                std::to_string(periods[i - 1]) + " and " +
                                std::to_string(periods[i]));
            }
        }
    }
    return rows;
}

CorpusFormat corpus_format_from_string(const std::string& s) {
    if (s == "delimited-table") {
        return CorpusFormat::DelimitedTable;
    }
    if (s == "line-delimited-records") {
        return CorpusFormat::LineDelimitedRecords;
    }
    throw ConfigError("unknown corpus format '" + s + "'");
}

}  // namespace sbs
