#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taoquant/dates.hpp"

namespace taoquant {

/// Streaming CSV reader. First row is the header. Fields may be double-quoted
/// ("" escapes a quote); embedded newlines are not supported. All parse errors
/// carry the file path and 1-based line number.
class CsvReader {
  public:
    explicit CsvReader(const std::string& path);

    [[nodiscard]] const std::vector<std::string>& header() const { return header_; }

    /// Index of a required column; throws ParseError if missing.
    [[nodiscard]] std::size_t column(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> find_column(std::string_view name) const;

    /// Advances to the next data row, skipping blank lines. False at EOF.
    bool next();

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] std::size_t field_count() const { return fields_.size(); }

    [[nodiscard]] std::string_view field(std::size_t i) const;
    [[nodiscard]] double number(std::size_t i) const;
    [[nodiscard]] std::int64_t integer(std::size_t i) const;
    [[nodiscard]] bool boolean(std::size_t i) const;
    [[nodiscard]] Date date(std::size_t i) const;

    /// Empty field, or one spelled "nan"/"NaN" -> no value.
    [[nodiscard]] std::optional<double> maybe_number(std::size_t i) const;

  private:
    [[noreturn]] void fail(const std::string& what) const;
    bool read_record(std::vector<std::string>& out);

    std::string path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::vector<std::string> fields_;
    std::size_t line_ = 0;
};

/// Streaming CSV writer. Quotes only when a field needs it.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void write_row(std::span<const std::string> fields);
    void write_row(std::initializer_list<std::string> fields);

  private:
    std::string path_;
    std::ofstream out_;
};

/// Shortest decimal string that round-trips the value (std::to_chars).
/// NaN renders as "nan".
std::string format_double(double v);

std::string format_int(std::int64_t v);

}  // namespace taoquant
