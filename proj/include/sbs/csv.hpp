#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sbs {

// RFC-4180-style CSV: double-quoted fields may contain commas, doubled
// quotes and embedded newlines. Both \n and \r\n row separators accepted.
class CsvReader {
public:
    explicit CsvReader(std::string_view data) : data_(data) {}

    // Reads the next record. Returns false at end of input.
    // Throws DataError on a lone quote inside an unquoted field or an
    // unterminated quoted field.
    bool next(std::vector<std::string>& fields);

    std::size_t record_index() const { return record_index_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
    std::size_t record_index_ = 0;
};

std::string csv_escape(std::string_view field);

std::string csv_join(const std::vector<std::string>& fields);

}  // namespace sbs
