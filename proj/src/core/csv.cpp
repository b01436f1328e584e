#include "taoquant/csv.hpp"

#include <charconv>

#include "taoquant/errors.hpp"

namespace taoquant {

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path);
    if (!read_record(header_)) fail("empty file, expected a header row");
}

std::size_t CsvReader::column(std::string_view name) const {
    if (auto idx = find_column(name)) return *idx;
    throw ParseError(path_, 1, "missing required column '" + std::string(name) + "'");
}

std::optional<std::size_t> CsvReader::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    return std::nullopt;
}

bool CsvReader::next() {
    while (read_record(fields_)) {
        if (fields_.size() == 1 && fields_[0].empty()) continue;  // blank line
        return true;
    }
    return false;
}

bool CsvReader::read_record(std::vector<std::string>& out) {
    std::string raw;
    if (!std::getline(in_, raw)) return false;
    ++line_;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();

    out.clear();
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) fail("unterminated quoted field");
    out.push_back(std::move(field));
    return true;
}

std::string_view CsvReader::field(std::size_t i) const {
    if (i >= fields_.size())
        fail("row has " + std::to_string(fields_.size()) + " fields, needed column " +
             std::to_string(i + 1));
    return fields_[i];
}

double CsvReader::number(std::size_t i) const {
    const std::string_view f = field(i);
    double v = 0.0;
    const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
    if (r.ec != std::errc{} || r.ptr != f.data() + f.size())
        fail("expected a number, got '" + std::string(f) + "'");
    return v;
}

std::int64_t CsvReader::integer(std::size_t i) const {
    const std::string_view f = field(i);
    std::int64_t v = 0;
    const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
    if (r.ec != std::errc{} || r.ptr != f.data() + f.size())
        fail("expected an integer, got '" + std::string(f) + "'");
    return v;
}

bool CsvReader::boolean(std::size_t i) const {
    const std::string_view f = field(i);
    if (f == "true" || f == "True" || f == "1") return true;
    if (f == "false" || f == "False" || f == "0") return false;
    fail("expected a boolean, got '" + std::string(f) + "'");
}

Date CsvReader::date(std::size_t i) const {
    try {
        return Date::parse(field(i));
    } catch (const ParseError& e) {
        fail(e.what());
    }
}

std::optional<double> CsvReader::maybe_number(std::size_t i) const {
    const std::string_view f = field(i);
    if (f.empty() || f == "nan" || f == "NaN") return std::nullopt;
    return number(i);
}

void CsvReader::fail(const std::string& what) const { throw ParseError(path_, line_, what); }

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw DataError("cannot open " + path + " for writing");
}

void CsvWriter::write_row(std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            out_ << '"';
            for (const char c : f) {
                if (c == '"') out_ << '"';
                out_ << c;
            }
            out_ << '"';
        } else {
            out_ << f;
        }
    }
    out_ << '\n';
    if (!out_) throw DataError("write failed: " + path_);
}

void CsvWriter::write_row(std::initializer_list<std::string> fields) {
    write_row(std::span<const std::string>(fields.begin(), fields.size()));
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string format_int(std::int64_t v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace taoquant
