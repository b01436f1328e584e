#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "json_row.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/hash.hpp"
#include "taoquant/ingest.hpp"

namespace taoquant::ingest {

namespace {

constexpr const char* kPoolsPath = "/v1/pools";

std::string cache_file(const HttpConfig& config, const std::string& query) {
    // Content-addressed by the full request identity.
    const std::uint64_t key = fnv1a64(config.base_url + kPoolsPath + "?" + query);
    return (std::filesystem::path(config.cache_dir) / (hex64(key) + ".json")).string();
}

std::optional<std::string> cache_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void cache_write(const std::string& path, const std::string& body) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    // Write-then-rename so a crashed run never leaves a torn cache entry.
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << body;
        if (!out) throw DataError("cache write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string fetch_one(httplib::Client& client, const HttpConfig& config, const std::string& query) {
    httplib::Headers headers{{"Authorization", "Bearer " + config.api_key}};
    double delay_ms = config.backoff_initial_ms;
    std::string last_failure;
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(
                std::chrono::duration<double, std::milli>(delay_ms));
            delay_ms *= 2.0;
        }
        auto res = client.Get(std::string(kPoolsPath) + "?" + query, headers);
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw ConfigError("authentication failed (HTTP " + std::to_string(res->status) +
                              "); check the API key (TAOQUANT_API_KEY)");
        if (res->status == 429 || res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw NetworkError("unexpected HTTP " + std::to_string(res->status) + " for " +
                               kPoolsPath + "?" + query);
        return res->body;
    }
    throw NetworkError("request " + std::string(kPoolsPath) + "?" + query + " failed after " +
                       std::to_string(config.max_attempts) + " attempts; last: " + last_failure);
}

void parse_body(const std::string& body, const std::string& context,
                std::vector<RawSnapshotRow>& rows, FetchReport& report) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(context + ": " + e.what());
    }
    const auto it = doc.is_object() ? doc.find("rows") : doc.end();
    if (it == doc.end() || !it->is_array())
        throw ParseError(context + ": payload missing 'rows' array");
    for (std::size_t i = 0; i < it->size(); ++i) {
        try {
            rows.push_back(detail::parse_json_row((*it)[i]));
            ++report.rows_accepted;
        } catch (const ParseError& e) {
            // Row-level damage is reported, not fatal; the run continues.
            report.rejected.push_back(context + " row " + std::to_string(i) + ": " + e.what());
        }
    }
}

}  // namespace

std::vector<RawSnapshotRow> fetch_remote(const HttpConfig& config, Date begin, Date end,
                                         FetchReport* report) {
    FetchReport local;
    FetchReport& rep = report ? *report : local;
    std::vector<RawSnapshotRow> rows;
    if (begin > end) return rows;

    HttpConfig cfg = config;
    if (cfg.api_key.empty()) {
        if (const char* env = std::getenv("TAOQUANT_API_KEY")) cfg.api_key = env;
    }
    if (cfg.api_key.empty())
        throw ConfigError("no API credentials: pass --api-key or set TAOQUANT_API_KEY");
    if (cfg.base_url.empty()) throw ConfigError("no API base URL configured");

    httplib::Client client(cfg.base_url);
    for (Date d = begin; d <= end; ++d) {
        const std::string query = "date=" + d.to_string();
        std::string body;
        bool from_cache = false;
        if (!cfg.cache_dir.empty()) {
            if (auto cached = cache_read(cache_file(cfg, query))) {
                body = std::move(*cached);
                from_cache = true;
                ++rep.cache_hits;
            }
        }
        if (!from_cache) {
            body = fetch_one(client, cfg, query);
            ++rep.cache_misses;
            if (!cfg.cache_dir.empty()) cache_write(cache_file(cfg, query), body);
        }
        parse_body(body, "pools " + d.to_string(), rows, rep);
    }
    return rows;
}

}  // namespace taoquant::ingest
