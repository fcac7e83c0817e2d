#include "sbs/csv.hpp"

#include "sbs/util.hpp"

namespace sbs {

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= data_.size()) {
        return false;
    }
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    while (pos_ < data_.size()) {
        const char c = data_[pos_];
        if (in_quotes) {
            if (c == '"') {
                if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
                    field.push_back('"');
                    pos_ += 2;
                } else {
                    in_quotes = false;
                    ++pos_;
                }
            } else {
                field.push_back(c);
                ++pos_;
            }
            continue;
        }
        if (c == '"') {
            if (!field.empty() || quoted_field) {
                throw DataError("csv: unexpected quote in record " +
                                std::to_string(record_index_ + 1));
            }
            in_quotes = true;
            quoted_field = true;
            ++pos_;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
            ++pos_;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n') {
                ++pos_;
            }
            ++pos_;
            fields.push_back(std::move(field));
            ++record_index_;
            return true;
        } else {
            field.push_back(c);
            ++pos_;
        }
    }
    if (in_quotes) {
        throw DataError("csv: unterminated quoted field in record " +
                        std::to_string(record_index_ + 1));
    }
    fields.push_back(std::move(field));
    ++record_index_;
    return true;
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out.push_back(',');
        }
        out += csv_escape(fields[i]);
    }
    return out;
}

}  // namespace sbs
