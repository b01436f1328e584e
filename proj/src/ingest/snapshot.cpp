#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "json_row.hpp"
#include "taoquant/csv.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/ingest.hpp"

namespace taoquant::ingest {

namespace {

constexpr const char* kColumns[] = {"date",        "netuid",        "price_tao",
                                    "mcap_tao",    "tau_reserve",   "alpha_reserve",
                                    "alpha_staked", "emission_rao_per_day", "startup_mode"};

void check_sorted_unique(std::vector<RawSnapshotRow>& rows, const std::string& path) {
    std::sort(rows.begin(), rows.end(), [](const RawSnapshotRow& a, const RawSnapshotRow& b) {
        if (a.date != b.date) return a.date < b.date;
        return a.netuid < b.netuid;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date && rows[i].netuid == rows[i - 1].netuid)
            throw DataError(path + ": duplicate snapshot key (" + rows[i].date.to_string() +
                            ", netuid " + std::to_string(rows[i].netuid) + ")");
    }
}

double json_number(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!it->is_number()) throw ParseError(std::string("field '") + key + "' is not a number");
    return it->get<double>();
}

}  // namespace

namespace detail {

RawSnapshotRow parse_json_row(const nlohmann::json& obj) {
    if (!obj.is_object()) throw ParseError("snapshot row is not an object");
    RawSnapshotRow row;
    const auto date_it = obj.find("date");
    if (date_it == obj.end() || !date_it->is_string())
        throw ParseError("snapshot row missing string field 'date'");
    row.date = Date::parse(date_it->get<std::string>());
    const auto uid_it = obj.find("netuid");
    if (uid_it == obj.end() || !uid_it->is_number_integer())
        throw ParseError("snapshot row missing integer field 'netuid'");
    row.netuid = uid_it->get<int>();
    if (row.netuid < 0) throw ParseError("netuid must be >= 0");
    row.price_tao = json_number(obj, "price_tao");
    row.mcap_tao = json_number(obj, "mcap_tao");
    row.tau_reserve = json_number(obj, "tau_reserve");
    row.alpha_reserve = json_number(obj, "alpha_reserve");
    row.alpha_staked = json_number(obj, "alpha_staked");
    row.emission_rao_per_day = json_number(obj, "emission_rao_per_day");
    const auto su_it = obj.find("startup_mode");
    if (su_it == obj.end() || !su_it->is_boolean())
        throw ParseError("snapshot row missing boolean field 'startup_mode'");
    row.startup_mode = su_it->get<bool>();
    return row;
}

}  // namespace detail

std::vector<RawSnapshotRow> load_snapshot_csv(const std::string& path) {
    CsvReader r(path);
    constexpr std::size_t n_cols = std::size(kColumns);
    if (r.header().size() != n_cols)
        throw ParseError(path, 1,
                         "expected " + std::to_string(n_cols) + " columns, got " +
                             std::to_string(r.header().size()));
    for (std::size_t i = 0; i < n_cols; ++i) {
        if (r.header()[i] != kColumns[i])
            throw ParseError(path, 1,
                             "column " + std::to_string(i + 1) + " must be '" + kColumns[i] +
                                 "', got '" + r.header()[i] + "'");
    }

    const auto nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<RawSnapshotRow> rows;
    while (r.next()) {
        RawSnapshotRow row;
        row.date = r.date(0);
        const std::int64_t uid = r.integer(1);
        if (uid < 0) throw ParseError(path, r.line(), "netuid must be >= 0");
        row.netuid = static_cast<int>(uid);
        row.price_tao = r.maybe_number(2).value_or(nan);
        row.mcap_tao = r.maybe_number(3).value_or(nan);
        row.tau_reserve = r.maybe_number(4).value_or(nan);
        row.alpha_reserve = r.maybe_number(5).value_or(nan);
        row.alpha_staked = r.maybe_number(6).value_or(nan);
        row.emission_rao_per_day = r.maybe_number(7).value_or(nan);
        row.startup_mode = r.boolean(8);
        rows.push_back(row);
    }
    check_sorted_unique(rows, path);
    return rows;
}

std::vector<RawSnapshotRow> load_snapshot_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path, 0, e.what());
    }
    const nlohmann::json* arr = &doc;
    if (doc.is_object()) {
        const auto it = doc.find("rows");
        if (it == doc.end() || !it->is_array())
            throw ParseError(path, 0, "expected a JSON array or an object with a 'rows' array");
        arr = &*it;
    } else if (!doc.is_array()) {
        throw ParseError(path, 0, "expected a JSON array or an object with a 'rows' array");
    }

    std::vector<RawSnapshotRow> rows;
    rows.reserve(arr->size());
    for (std::size_t i = 0; i < arr->size(); ++i) {
        try {
            rows.push_back(detail::parse_json_row((*arr)[i]));
        } catch (const ParseError& e) {
            throw ParseError(path, 0, "row " + std::to_string(i) + ": " + e.what());
        }
    }
    check_sorted_unique(rows, path);
    return rows;
}

std::vector<RawSnapshotRow> load_snapshot(const std::string& path, SnapshotFormat format) {
    return format == SnapshotFormat::csv ? load_snapshot_csv(path) : load_snapshot_json(path);
}

void write_snapshot_csv(const std::string& path, std::span<const RawSnapshotRow> rows) {
    CsvWriter w(path);
    std::vector<std::string> header(std::begin(kColumns), std::end(kColumns));
    w.write_row(header);
    for (const RawSnapshotRow& row : rows) {
        w.write_row({row.date.to_string(), format_int(row.netuid), format_double(row.price_tao),
                     format_double(row.mcap_tao), format_double(row.tau_reserve),
                     format_double(row.alpha_reserve), format_double(row.alpha_staked),
                     format_double(row.emission_rao_per_day),
                     row.startup_mode ? "true" : "false"});
    }
}

}  // namespace taoquant::ingest
